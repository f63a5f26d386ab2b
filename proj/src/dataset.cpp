#include "mmca/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "mmca/rng.hpp"

namespace mmca {

// ============================================================================
// CategoricalDataset
// ============================================================================

CategoricalDataset::CategoricalDataset(int n, std::vector<Variable> variables,
                                       std::vector<int> cells)
    : n_(n), vars_(std::move(variables)), cells_(std::move(cells)) {
  if (n_ < 0) throw ShapeError("negative observation count");
  if (cells_.size() != static_cast<size_t>(n_) * vars_.size())
    throw ShapeError("cell table does not match n x J");
  for (const auto& v : vars_) {
    if (v.categories.size() < 2)
      throw DegenerateVariableError("variable '" + v.name + "' has fewer than 2 categories");
    std::vector<std::string> sorted = v.categories;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ParseError("duplicate category label in variable '" + v.name + "'");
  }
  const int nvars = static_cast<int>(vars_.size());
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < nvars; ++j) {
      int c = cell(i, j);
      if (c == kMissing) continue;
      if (c < 0 || c >= static_cast<int>(vars_[static_cast<size_t>(j)].categories.size()))
        throw ShapeError("cell index out of range for variable '" +
                         vars_[static_cast<size_t>(j)].name + "'");
    }
  }
}

BlockShape CategoricalDataset::shape() const {
  std::vector<int> sizes;
  sizes.reserve(vars_.size());
  for (const auto& v : vars_) sizes.push_back(static_cast<int>(v.categories.size()));
  return BlockShape(sizes);
}

// ============================================================================
// IndicatorMatrix
// ============================================================================

int IndicatorMatrix::cell_index(int i, int j) const {
  const int off = shape.offset(j);
  for (int k = 0; k < shape.size(j); ++k)
    if (values(i, off + k) == 1.0) return k;
  return -1;
}

int IndicatorMatrix::observed_cells() const {
  int count = 0;
  for (int i = 0; i < rows(); ++i)
    for (int j = 0; j < shape.variables(); ++j)
      if (observed(i, j)) ++count;
  return count;
}

void IndicatorMatrix::validate() const {
  if (values.rows() != mask.rows() || values.cols() != mask.cols())
    throw ShapeError("values/mask dimension mismatch");
  if (values.cols() != shape.total()) throw ShapeError("column count does not match shape");
  for (int i = 0; i < rows(); ++i) {
    for (int j = 0; j < shape.variables(); ++j) {
      const int off = shape.offset(j);
      const int kj = shape.size(j);
      double vsum = 0.0, msum = 0.0;
      for (int k = 0; k < kj; ++k) {
        const double v = values(i, off + k);
        const double m = mask(i, off + k);
        if (v != 0.0 && v != 1.0) throw ShapeError("indicator entries must be 0/1");
        if (m != 0.0 && m != 1.0) throw ShapeError("mask entries must be 0/1");
        vsum += v;
        msum += m;
      }
      const bool obs = msum > 0.0;
      if (obs && (vsum != 1.0 || msum != kj))
        throw ShapeError("observed block must be one-hot with full mask");
      if (!obs && vsum != 0.0)
        throw ShapeError("missing block must be all-zero");
    }
  }
}

// ============================================================================
// CSV parsing
// ============================================================================

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

CategoricalDataset parse_csv(std::istream& in, const std::string& na_token) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input: missing header row");
  const auto header = split_fields(line);
  if (header.empty()) throw ParseError("empty header row");
  const int nvars = static_cast<int>(header.size());

  std::vector<Variable> vars(header.size());
  std::vector<std::unordered_map<std::string, int>> index(header.size());
  for (int j = 0; j < nvars; ++j) vars[static_cast<size_t>(j)].name = header[static_cast<size_t>(j)];

  std::vector<int> cells;
  int n = 0;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;  // ignore blank lines
    const auto fields = split_fields(line);
    if (static_cast<int>(fields.size()) != nvars)
      throw ParseError("ragged row at line " + std::to_string(lineno) + ": expected " +
                       std::to_string(nvars) + " fields, got " + std::to_string(fields.size()));
    for (int j = 0; j < nvars; ++j) {
      const std::string& f = fields[static_cast<size_t>(j)];
      if (f == na_token) {
        cells.push_back(CategoricalDataset::kMissing);
        continue;
      }
      auto& idx = index[static_cast<size_t>(j)];
      auto it = idx.find(f);
      if (it == idx.end()) {
        const int code = static_cast<int>(idx.size());
        idx.emplace(f, code);
        vars[static_cast<size_t>(j)].categories.push_back(f);
        cells.push_back(code);
      } else {
        cells.push_back(it->second);
      }
    }
    ++n;
  }
  if (n == 0) throw ParseError("no data rows");
  for (const auto& v : vars)
    if (v.categories.size() < 2)
      throw DegenerateVariableError("variable '" + v.name +
                                    "' has fewer than 2 distinct observed categories");
  return CategoricalDataset(n, std::move(vars), std::move(cells));
}

// ============================================================================
// Indicator construction
// ============================================================================

IndicatorMatrix build_indicator(const CategoricalDataset& data) {
  const BlockShape shape = data.shape();
  const int n = data.n();
  const int K = shape.total();
  IndicatorMatrix g{Matrix::Zero(n, K), Matrix::Zero(n, K), shape};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < data.variables(); ++j) {
      const int c = data.cell(i, j);
      if (c == CategoricalDataset::kMissing) continue;
      const int off = shape.offset(j);
      g.values(i, off + c) = 1.0;
      g.mask.block(i, off, 1, shape.size(j)).setOnes();
    }
  }
  return g;
}

std::vector<int> decode_cells(const IndicatorMatrix& g) {
  std::vector<int> cells;
  cells.reserve(static_cast<size_t>(g.rows()) * g.shape.variables());
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.shape.variables(); ++j)
      cells.push_back(g.observed(i, j) ? g.cell_index(i, j) : CategoricalDataset::kMissing);
  return cells;
}

Vector category_margins(const IndicatorMatrix& g) {
  return g.values.colwise().sum().transpose();
}

// ============================================================================
// Simulation
// ============================================================================

IndicatorMatrix simulate_multinomial(const Vector& mu, const Matrix& interaction,
                                     const BlockShape& shape, std::uint64_t seed) {
  const int K = shape.total();
  if (mu.size() != K) throw ShapeError("mu length does not match shape");
  if (interaction.cols() != K) throw ShapeError("interaction columns do not match shape");
  const int n = static_cast<int>(interaction.rows());
  if (!mu.allFinite() || !interaction.allFinite())
    throw NumericalError("non-finite linear predictor in simulation");

  IndicatorMatrix g{Matrix::Zero(n, K), Matrix::Ones(n, K), shape};
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < shape.variables(); ++j) {
      const int off = shape.offset(j);
      const int kj = shape.size(j);
      // stable softmax of theta_ij.
      double m = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < kj; ++k)
        m = std::max(m, mu(off + k) + interaction(i, off + k));
      double denom = 0.0;
      for (int k = 0; k < kj; ++k)
        denom += std::exp(mu(off + k) + interaction(i, off + k) - m);
      const double u = rng::cell_uniform(seed, i, j);
      // inverse CDF
      double acc = 0.0;
      int chosen = kj - 1;
      for (int k = 0; k < kj; ++k) {
        acc += std::exp(mu(off + k) + interaction(i, off + k) - m) / denom;
        if (u < acc) {
          chosen = k;
          break;
        }
      }
      g.values(i, off + chosen) = 1.0;
    }
  }
  return g;
}

void write_indicator_csv(std::ostream& out, const IndicatorMatrix& g) {
  for (int j = 0; j < g.shape.variables(); ++j)
    for (int k = 0; k < g.shape.size(j); ++k)
      out << (j == 0 && k == 0 ? "" : ",") << "v" << j << "_c" << k;
  out << "\n";
  for (int i = 0; i < g.rows(); ++i) {
    for (int c = 0; c < g.cols(); ++c)
      out << (c == 0 ? "" : ",") << static_cast<int>(g.values(i, c));
    out << "\n";
  }
}

}  // namespace mmca
