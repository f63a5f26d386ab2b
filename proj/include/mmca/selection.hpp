#ifndef MMCA_SELECTION_HPP
#define MMCA_SELECTION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mmca/dataset.hpp"
#include "mmca/mmca.hpp"
#include "mmca/types.hpp"

namespace mmca {

// ============================================================================
// Quantile universal threshold
// ============================================================================

struct QutConfig {
  int replicates = 1000;
  std::uint64_t seed = 0;
  std::optional<double> alpha_override;  // default level 1/sqrt(log(max(n, K-J)))
};

struct QutResult {
  double lambda_qut = 0.0;
  int estimated_rank = 0;
  std::vector<double> null_singular_values;  // statistic sample, replicate order
  double alpha_used = 0.0;
};

/// Block-centered log of observed category proportions: the MLE of the
/// no-interaction model.
Vector null_main_effects(const IndicatorMatrix& g);

/// Simulate `replicates` datasets under the no-interaction null (margins
/// estimated from g, observation mask mirrored), take the top singular value
/// of the row-centered working matrix for each, and set lambda_qut to half
/// the empirical (1-alpha)-quantile. The estimated rank is the effective
/// rank of a full fit of g at that threshold. Replicates run concurrently;
/// the result is identical for any thread count.
QutResult qut_lambda(const IndicatorMatrix& g, const QutConfig& config, int threads = 0);

// ============================================================================
// Cell-wise cross-validation
// ============================================================================

struct CvResult {
  std::vector<double> lambda_grid;             // strictly increasing
  std::vector<double> mean_heldout_deviance;   // per grid value
  std::uint64_t seed = 0;                      // fold assignment seed
  double lambda_star = 0.0;                    // argmin, ties to the smallest
};

/// Near-equal random partition of cell indices 0..n_cells-1 into k folds,
/// deterministic given seed. k = n_cells is leave-one-out.
std::vector<std::vector<int>> cv_folds(int n_cells, int k, std::uint64_t seed);

/// K-fold cell-wise cross-validation at fixed rank p: each fold's cells are
/// masked, the model is refit on the rest for every lambda (descending, warm
/// started), and the held-out cells are scored by predictive deviance.
/// A partition that empties a category is redrawn (at most 10 retries).
/// Folds run concurrently; the result is identical for any thread count.
CvResult cross_validate(const IndicatorMatrix& g, int p, std::vector<double> lambda_grid, int k,
                        std::uint64_t seed, int threads = 0);

}  // namespace mmca

#endif  // MMCA_SELECTION_HPP
