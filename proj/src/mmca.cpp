#include "mmca/mmca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmca/kernels.hpp"
#include "mmca/linalg.hpp"

namespace mmca {

// ============================================================================
// Parameter validation
// ============================================================================

void ModelParams::validate(double tol) const {
  const int K = shape.total();
  if (mu.size() != K) throw ShapeError("params: mu length does not match shape");
  if (V.rows() != K) throw ShapeError("params: V rows do not match shape");
  if (U.cols() != d.size() || V.cols() != d.size())
    throw ShapeError("params: inconsistent rank across U, d, V");

  for (int j = 0; j < shape.variables(); ++j) {
    const double s = mu.segment(shape.offset(j), shape.size(j)).sum();
    if (std::abs(s) > tol) throw ShapeError("params: mu block not centered");
  }
  const int p = rank();
  if (p > 0) {
    if ((U.colwise().sum().array().abs() > tol).any())
      throw ShapeError("params: U columns not centered");
    if (((U.transpose() * U - Matrix::Identity(p, p)).array().abs() > tol).any())
      throw ShapeError("params: U not orthonormal");
    if (((V.transpose() * V - Matrix::Identity(p, p)).array().abs() > tol).any())
      throw ShapeError("params: V not orthonormal");
    for (int j = 0; j < shape.variables(); ++j) {
      const auto blk = V.middleRows(shape.offset(j), shape.size(j));
      if ((blk.colwise().sum().array().abs() > tol).any())
        throw ShapeError("params: V block not centered");
    }
    for (int s = 0; s < p; ++s) {
      if (d(s) < 0.0) throw ShapeError("params: negative singular value");
      if (s > 0 && d(s) > d(s - 1) + tol) throw ShapeError("params: d not nonincreasing");
    }
  }
}

void ProbabilityMatrix::validate(double tol) const {
  if ((values.array() <= 0.0).any() || (values.array() >= 1.0).any())
    throw ShapeError("probabilities must lie in (0, 1)");
  for (int j = 0; j < shape.variables(); ++j) {
    const auto blk = values.middleCols(shape.offset(j), shape.size(j));
    if (((blk.rowwise().sum().array() - 1.0).abs() > tol).any())
      throw ShapeError("probability block rows must sum to 1");
  }
}

// ============================================================================
// Objective pieces
// ============================================================================

Matrix linear_predictor(const ModelParams& params) {
  const int n = params.n();
  Matrix theta;
  if (params.rank() > 0)
    theta = params.U * params.d.asDiagonal() * params.V.transpose();
  else
    theta = Matrix::Zero(n, params.shape.total());
  theta.rowwise() += params.mu.transpose();
  return theta;
}

ProbabilityMatrix softmax_probs(const Matrix& theta, const BlockShape& shape) {
  if (!theta.allFinite()) throw NumericalError("softmax_probs: non-finite input");
  ProbabilityMatrix pi{Matrix(), shape};
  kernels::softmax_rows(theta, shape, pi.values);
  return pi;
}

double deviance(const IndicatorMatrix& g, const ProbabilityMatrix& pi) {
  if (g.values.rows() != pi.values.rows() || g.values.cols() != pi.values.cols())
    throw ShapeError("deviance: dimension mismatch");
  double total = 0.0;
  for (int i = 0; i < g.rows(); ++i)
    for (int c = 0; c < g.cols(); ++c)
      if (g.values(i, c) == 1.0) total -= std::log(pi.values(i, c));
  return total;
}

double penalized_deviance(const IndicatorMatrix& g, const ModelParams& params, double lambda) {
  const Matrix theta = linear_predictor(params);
  return kernels::deviance_from_theta(g.values, theta, params.shape) + lambda * params.d.sum();
}

Vector deviance_gradient_block(const Vector& g, const Vector& pi) {
  return pi - g;
}

namespace {

double block_deviance(const Vector& theta, const Vector& g) {
  const double m = theta.maxCoeff();
  const double lse = m + std::log((theta.array() - m).exp().sum());
  double f = 0.0;
  for (int k = 0; k < theta.size(); ++k)
    if (g(k) != 0.0) f += g(k) * (lse - theta(k));
  return f;
}

}  // namespace

double majorizer_value(const Vector& theta, const Vector& theta0, const Vector& g,
                       const Vector& pi0) {
  const Vector diff = theta - theta0;
  return block_deviance(theta0, g) + diff.dot(pi0 - g) + 0.25 * diff.squaredNorm();
}

Matrix hessian_block(const Vector& pi) {
  Matrix h = Matrix(pi.asDiagonal()) - pi * pi.transpose();
  return h;
}

Matrix build_working_matrix(const IndicatorMatrix& g, const ModelParams& params) {
  const Matrix theta = linear_predictor(params);
  Matrix pi;
  kernels::softmax_rows(theta, params.shape, pi);
  Matrix z;
  kernels::working_matrix(g.values, g.mask, theta, pi, params.shape, z);
  return z;
}

double soft_threshold(double phi, double t) {
  return std::max(0.0, phi - t);
}

// ============================================================================
// Solver
// ============================================================================

namespace {

// Leading p singular vector pairs of a row- and block-centered matrix.
// Columns whose singular value fell below the rank cutoff are replaced by a
// deterministic orthonormal completion inside the constraint spaces so the
// identification constraints hold even for dead dimensions.
void truncated_factors(const SvdResult& svd, int p, const BlockShape& shape, double lambda,
                       Matrix& u_out, Vector& d_out, Matrix& v_out) {
  const int avail = static_cast<int>(svd.phi.size());
  int r = 0;
  while (r < std::min(p, avail) && svd.phi(r) > 0.0) ++r;

  d_out = Vector::Zero(p);
  for (int s = 0; s < r; ++s) d_out(s) = soft_threshold(svd.phi(s), 2.0 * lambda);
  // soft threshold preserves the nonincreasing order
  u_out = complete_centered_basis(svd.P.leftCols(r), p);
  v_out = complete_block_centered_basis(svd.Q.leftCols(r), p, shape);
}

ModelParams make_initial_params(const IndicatorMatrix& g, const FitConfig& config) {
  ModelParams params;
  params.shape = g.shape;
  const int n = g.rows();

  if (config.init == Init::log_margins) {
    params.mu = detail::log_margin_effects(g);
  } else {
    // mu0 = J_c G' 1 / n
    Matrix mu_row = g.values.colwise().mean();
    params.mu = block_center(mu_row, g.shape).transpose();
  }

  if (config.p > 0) {
    const Matrix centered = row_center(block_center(g.values, g.shape));
    const SvdResult svd = thin_svd(centered);
    truncated_factors(svd, config.p, g.shape, config.lambda, params.U, params.d, params.V);
  } else {
    params.U = Matrix::Zero(n, 0);
    params.V = Matrix::Zero(g.shape.total(), 0);
    params.d = Vector::Zero(0);
  }
  return params;
}

FitResult run_fit(const IndicatorMatrix& g, const FitConfig& config, ModelParams params) {
  FitResult result;
  result.deviance_trace.reserve(static_cast<size_t>(config.max_iter) + 1);

  double level = penalized_deviance(g, params, config.lambda);
  if (!std::isfinite(level)) throw NumericalError("fit: non-finite deviance at initialization");
  result.deviance_trace.push_back(level);

  for (int t = 1; t <= config.max_iter; ++t) {
    params = mm_step(g, params, config.lambda);
#ifndef NDEBUG
    params.validate(1e-6);
#endif
    const double next = penalized_deviance(g, params, config.lambda);
    if (!std::isfinite(next)) throw NumericalError("fit: non-finite deviance at iteration " +
                                                   std::to_string(t));
    result.deviance_trace.push_back(next);
    result.iterations = t;
    if (next == 0.0 || (level - next) / next < config.epsilon) {
      result.converged = true;
      level = next;
      break;
    }
    level = next;
  }

  result.params = std::move(params);
  result.effective_rank = result.params.effective_rank();
  return result;
}

}  // namespace

ModelParams mm_step(const IndicatorMatrix& g, const ModelParams& params, double lambda) {
  const int n = g.rows();
  ModelParams next;
  next.shape = params.shape;

  const Matrix z = build_working_matrix(g, params);
  next.mu = z.colwise().mean().transpose();

  const int p = params.rank();
  if (p > 0) {
    const SvdResult svd = thin_svd(row_center(z));
    truncated_factors(svd, p, params.shape, lambda, next.U, next.d, next.V);
  } else {
    next.U = Matrix::Zero(n, 0);
    next.V = Matrix::Zero(params.shape.total(), 0);
    next.d = Vector::Zero(0);
  }
  return next;
}

FitResult fit(const IndicatorMatrix& g, const FitConfig& config) {
  const int pstar = g.shape.max_rank(g.rows());
  if (config.p < 0 || config.p > pstar)
    throw RankError("fit: rank must be in [0, " + std::to_string(pstar) + "]");
  if (config.lambda < 0.0) throw Error("fit: lambda must be nonnegative");
  if (config.epsilon <= 0.0) throw Error("fit: epsilon must be positive");
  return run_fit(g, config, make_initial_params(g, config));
}

FitResult fit(const IndicatorMatrix& g, const FitConfig& config, const ModelParams& init) {
  if (init.rank() != config.p) throw RankError("fit: warm start rank does not match config");
  if (!(init.shape == g.shape) || init.n() != g.rows())
    throw ShapeError("fit: warm start shape does not match data");
  return run_fit(g, config, init);
}

// ============================================================================
// Diagnostics and export
// ============================================================================

namespace {

Vector cell_theta(const ModelParams& params, int i, int j) {
  const int off = params.shape.offset(j);
  const int kj = params.shape.size(j);
  Vector theta = params.mu.segment(off, kj);
  for (int s = 0; s < params.rank(); ++s)
    theta += params.U(i, s) * params.d(s) * params.V.col(s).segment(off, kj);
  return theta;
}

}  // namespace

std::vector<Vector> predict_proba(const ModelParams& params,
                                  std::span<const std::pair<int, int>> cells) {
  std::vector<Vector> out;
  out.reserve(cells.size());
  for (const auto& [i, j] : cells) {
    if (i < 0 || i >= params.n() || j < 0 || j >= params.shape.variables())
      throw ShapeError("predict_proba: cell index out of range");
    const Vector theta = cell_theta(params, i, j);
    const double m = theta.maxCoeff();
    Vector e = (theta.array() - m).exp();
    out.push_back(e / e.sum());
  }
  return out;
}

double log_predictive(const ModelParams& params, int i, int j, int k) {
  if (i < 0 || i >= params.n() || j < 0 || j >= params.shape.variables() || k < 0 ||
      k >= params.shape.size(j))
    throw ShapeError("log_predictive: cell index out of range");
  const Vector theta = cell_theta(params, i, j);
  const double m = theta.maxCoeff();
  const double lse = m + std::log((theta.array() - m).exp().sum());
  return theta(k) - lse;
}

BiplotCoords biplot_coords(const ModelParams& params, BiplotScaling scaling) {
  const double root_n = std::sqrt(static_cast<double>(params.n()));
  BiplotCoords out;
  out.scaling = scaling;
  if (scaling == BiplotScaling::interaction) {
    out.X = root_n * params.U;
    out.A = params.V * params.d.asDiagonal() / root_n;
  } else {
    const Vector quarter = params.d.array().pow(0.25);
    out.X = root_n * params.U * quarter.asDiagonal();
    out.A = params.V * quarter.asDiagonal() / root_n;
  }
  return out;
}

Matrix centroid_bias(const IndicatorMatrix& g, const ProbabilityMatrix& pi, const Matrix& x) {
  const Vector counts = category_margins(g);
  if ((counts.array() <= 0.0).any())
    throw DegenerateCategoryError("centroid_bias: category with zero observed count");
  return counts.cwiseInverse().asDiagonal() * (g.values - pi.values).transpose() * x;
}

namespace detail {

Vector log_margin_effects(const IndicatorMatrix& g) {
  const Vector counts = category_margins(g);
  Vector mu(g.shape.total());
  for (int j = 0; j < g.shape.variables(); ++j) {
    const int off = g.shape.offset(j);
    const int kj = g.shape.size(j);
    const double total = counts.segment(off, kj).sum();
    double mean_log = 0.0;
    for (int k = 0; k < kj; ++k) {
      if (counts(off + k) <= 0.0)
        throw DegenerateCategoryError("null main effects: zero category count");
      mu(off + k) = std::log(counts(off + k) / total);
      mean_log += mu(off + k);
    }
    mean_log /= kj;
    for (int k = 0; k < kj; ++k) mu(off + k) -= mean_log;
  }
  return mu;
}

}  // namespace detail

}  // namespace mmca
