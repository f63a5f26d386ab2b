#include "mmca/json_io.hpp"

#include <filesystem>
#include <fstream>

namespace mmca {

using nlohmann::json;

namespace {

json matrix_row_major(const Matrix& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int c = 0; c < m.cols(); ++c) out.push_back(m(i, c));
  return out;
}

Matrix matrix_from_row_major(const json& j, int rows, int cols) {
  if (static_cast<int>(j.size()) != rows * cols)
    throw ParseError("fit JSON: matrix payload has wrong length");
  Matrix m(rows, cols);
  int pos = 0;
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) m(i, c) = j[static_cast<size_t>(pos++)].get<double>();
  return m;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace

json fit_result_to_json(const FitResult& result, double lambda,
                        const std::vector<Variable>* variables) {
  const ModelParams& p = result.params;
  json j;
  j["format_version"] = 1;
  j["n"] = p.n();
  j["p"] = p.rank();
  j["shape"] = p.shape.sizes();
  j["lambda"] = lambda;
  j["mu"] = vector_json(p.mu);
  j["d"] = vector_json(p.d);
  j["U"] = matrix_row_major(p.U);
  j["V"] = matrix_row_major(p.V);
  j["trace"] = result.deviance_trace;
  j["converged"] = result.converged;
  j["iterations"] = result.iterations;
  j["effective_rank"] = result.effective_rank;
  if (variables) {
    json vars = json::array();
    for (const auto& v : *variables)
      vars.push_back(json{{"name", v.name}, {"categories", v.categories}});
    j["variables"] = vars;
  }
  return j;
}

FitResult fit_result_from_json(const json& j) {
  if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
    throw ParseError("fit JSON: unsupported format_version");
  FitResult result;
  const int n = j.at("n").get<int>();
  const int p = j.at("p").get<int>();
  result.params.shape = BlockShape(j.at("shape").get<std::vector<int>>());
  const int K = result.params.shape.total();
  result.params.mu = vector_from_json(j.at("mu"));
  result.params.d = vector_from_json(j.at("d"));
  result.params.U = matrix_from_row_major(j.at("U"), n, p);
  result.params.V = matrix_from_row_major(j.at("V"), K, p);
  result.deviance_trace = j.at("trace").get<std::vector<double>>();
  result.converged = j.at("converged").get<bool>();
  result.iterations = j.at("iterations").get<int>();
  result.effective_rank = j.at("effective_rank").get<int>();
  if (result.params.mu.size() != K) throw ParseError("fit JSON: mu length mismatch");
  if (result.params.d.size() != p) throw ParseError("fit JSON: d length mismatch");
  return result;
}

json qut_result_to_json(const QutResult& result, const QutConfig& config) {
  json j;
  j["format_version"] = 1;
  j["lambda_qut"] = result.lambda_qut;
  j["estimated_rank"] = result.estimated_rank;
  j["alpha_used"] = result.alpha_used;
  j["replicates"] = config.replicates;
  j["seed"] = config.seed;
  j["null_singular_values"] = result.null_singular_values;
  return j;
}

json cv_result_to_json(const CvResult& result, int rank, int folds) {
  json j;
  j["format_version"] = 1;
  j["lambda_grid"] = result.lambda_grid;
  j["mean_heldout_deviance"] = result.mean_heldout_deviance;
  j["lambda_star"] = result.lambda_star;
  j["seed"] = result.seed;
  j["rank"] = rank;
  j["folds"] = folds;
  return j;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    out << content;
    if (!out) throw Error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mmca
