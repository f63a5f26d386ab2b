#ifndef MMCA_MMCA_HPP
#define MMCA_MMCA_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mmca/dataset.hpp"
#include "mmca/types.hpp"

namespace mmca {

// ============================================================================
// Parameters and results
// ============================================================================

/// MMCA parameter set (mu, U, D, V) under the identification constraints:
/// mu block-centered, 1'U = 0, U'U = I, V'V = I, V block-centered,
/// d_1 >= ... >= d_p >= 0. The interaction is U diag(d) V'.
struct ModelParams {
  Vector mu;        // length K
  Matrix U;         // n x p
  Vector d;         // length p, nonnegative nonincreasing
  Matrix V;         // K x p
  BlockShape shape;

  int n() const { return static_cast<int>(U.rows()); }
  int rank() const { return static_cast<int>(d.size()); }
  int effective_rank() const { return static_cast<int>((d.array() > 0.0).count()); }

  /// Throws ShapeError if any identification constraint is violated beyond tol.
  void validate(double tol = 1e-8) const;
};

/// Row-block-stochastic softmax probabilities.
struct ProbabilityMatrix {
  Matrix values;
  BlockShape shape;

  void validate(double tol = 1e-12) const;
};

enum class Init { margins, log_margins };

struct FitConfig {
  int p = 0;               // requested interaction rank, 0 <= p <= p*
  double lambda = 0.0;     // nuclear norm penalty weight, >= 0
  double epsilon = 1e-8;   // relative convergence tolerance
  int max_iter = 5000;
  Init init = Init::margins;
};

struct FitResult {
  ModelParams params;
  std::vector<double> deviance_trace;  // penalized deviance per iteration
  bool converged = false;
  int iterations = 0;
  int effective_rank = 0;
};

enum class BiplotScaling { interaction, symmetric };

struct BiplotCoords {
  Matrix X;  // n x p row coordinates
  Matrix A;  // K x p category coordinates
  BiplotScaling scaling = BiplotScaling::interaction;
};

// ============================================================================
// Objective pieces
// ============================================================================

/// Theta = 1 mu' + U diag(d) V'.
Matrix linear_predictor(const ModelParams& params);

/// Blockwise softmax with per-block max subtraction.
ProbabilityMatrix softmax_probs(const Matrix& theta, const BlockShape& shape);

/// -sum g log pi over observed cells (missing blocks have g = 0).
double deviance(const IndicatorMatrix& g, const ProbabilityMatrix& pi);

/// deviance + lambda * sum d_ss, evaluated stably from the linear predictor.
double penalized_deviance(const IndicatorMatrix& g, const ModelParams& params, double lambda);

/// Gradient pi - g of one block's deviance term.
Vector deviance_gradient_block(const Vector& g, const Vector& pi);

/// Quadratic majorizer f(theta0) + (theta-theta0)'(pi0-g) + ||theta-theta0||^2/4.
double majorizer_value(const Vector& theta, const Vector& theta0, const Vector& g,
                       const Vector& pi0);

/// Diag(pi) - pi pi'; its top eigenvalue is at most 1/2.
Matrix hessian_block(const Vector& pi);

/// Z = [(1 mu' + U D V') + 2 (G - W .* Pi)] J_c with Pi computed from params.
Matrix build_working_matrix(const IndicatorMatrix& g, const ModelParams& params);

/// max(0, phi - t).
double soft_threshold(double phi, double t);

// ============================================================================
// Solver
// ============================================================================

/// One majorization cycle: working matrix, mu update, thin SVD of JZ
/// truncated at the params' rank, soft threshold of the singular values at
/// 2 * lambda. The output satisfies all ModelParams constraints.
ModelParams mm_step(const IndicatorMatrix& g, const ModelParams& params, double lambda);

/// Run the majorizing algorithm until the relative decrease of the penalized
/// deviance drops below epsilon or max_iter is reached. Deterministic and
/// value-identical for any thread count.
FitResult fit(const IndicatorMatrix& g, const FitConfig& config);

/// Warm-started variant; `init` must satisfy the ModelParams constraints and
/// match the requested rank.
FitResult fit(const IndicatorMatrix& g, const FitConfig& config, const ModelParams& init);

// ============================================================================
// Diagnostics and export
// ============================================================================

/// Softmax probability vectors of selected (i, j) cells.
std::vector<Vector> predict_proba(const ModelParams& params,
                                  std::span<const std::pair<int, int>> cells);

/// log pi_ijk for one cell, computed via logsumexp (finite for finite theta).
double log_predictive(const ModelParams& params, int i, int j, int k);

/// interaction: X = sqrt(n) U, A = V D / sqrt(n)  (X A' = U D V').
/// symmetric:   X = sqrt(n) U D^{1/4}, A = V D^{1/4} / sqrt(n).
BiplotCoords biplot_coords(const ModelParams& params, BiplotScaling scaling);

/// Centroid bias B = Diag(1'G)^{-1} (G - Pi)' X.
Matrix centroid_bias(const IndicatorMatrix& g, const ProbabilityMatrix& pi, const Matrix& x);

namespace detail {

/// Block-centered log of observed category proportions (null-model MLE).
/// Throws DegenerateCategoryError on a zero count.
Vector log_margin_effects(const IndicatorMatrix& g);

}  // namespace detail

}  // namespace mmca

#endif  // MMCA_MMCA_HPP
