#include "mmca/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mmca/linalg.hpp"
#include "mmca/rng.hpp"

namespace mmca {

namespace {

int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

// Empirical quantile, inverse-ECDF convention on the sorted sample.
double empirical_quantile(std::vector<double> sample, double level) {
  std::sort(sample.begin(), sample.end());
  const int r = static_cast<int>(sample.size());
  int idx = static_cast<int>(std::ceil(level * r)) - 1;
  idx = std::clamp(idx, 0, r - 1);
  return sample[static_cast<size_t>(idx)];
}

// Runs `body(index)` for index in [0, count) across threads, capturing the
// first exception and rethrowing it after the join.
template <typename Body>
void parallel_indexed(int count, int threads, Body&& body) {
  std::exception_ptr error = nullptr;
  std::mutex error_mutex;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int idx = 0; idx < count; ++idx) {
    try {
      body(idx);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  (void)threads;
  if (error) std::rethrow_exception(error);
}

}  // namespace

// ============================================================================
// QUT
// ============================================================================

Vector null_main_effects(const IndicatorMatrix& g) {
  return detail::log_margin_effects(g);
}

QutResult qut_lambda(const IndicatorMatrix& g, const QutConfig& config, int threads) {
  if (config.replicates < 100) throw Error("qut_lambda: replicates must be >= 100");
  const int n = g.rows();
  const int K = g.shape.total();
  const int J = g.shape.variables();
  const bool fully_observed = g.fully_observed();

  const Vector mu0 = null_main_effects(g);
  ModelParams null_params;
  null_params.shape = g.shape;
  null_params.mu = mu0;
  null_params.U = Matrix::Zero(n, 0);
  null_params.V = Matrix::Zero(K, 0);
  null_params.d = Vector::Zero(0);

  QutResult out;
  out.null_singular_values.assign(static_cast<size_t>(config.replicates), 0.0);

  const int nthreads = resolve_threads(threads);
  parallel_indexed(config.replicates, nthreads, [&](int r) {
    IndicatorMatrix sim = simulate_multinomial(
        mu0, Matrix::Zero(n, K), g.shape, rng::derive(config.seed, static_cast<std::uint64_t>(r)));
    if (!fully_observed) {
      // mirror the observation pattern of the data
      sim.mask = g.mask;
      sim.values = sim.values.cwiseProduct(g.mask);
    }
    const Matrix z = build_working_matrix(sim, null_params);
    const SvdResult svd = thin_svd(row_center(z));
    out.null_singular_values[static_cast<size_t>(r)] = svd.phi.size() > 0 ? svd.phi(0) : 0.0;
  });

  double alpha;
  if (config.alpha_override) {
    alpha = *config.alpha_override;
  } else {
    const double m = static_cast<double>(std::max(n, K - J));
    alpha = 1.0 / std::sqrt(std::log(m));
  }
  // guard degenerate levels at tiny n
  alpha = std::clamp(alpha, 1e-9, 1.0 - 1e-9);
  out.alpha_used = alpha;
  out.lambda_qut = 0.5 * empirical_quantile(out.null_singular_values, 1.0 - alpha);

  FitConfig fit_config;
  fit_config.p = g.shape.max_rank(n);
  fit_config.lambda = out.lambda_qut;
  out.estimated_rank = fit(g, fit_config).effective_rank;
  return out;
}

// ============================================================================
// Cross-validation
// ============================================================================

std::vector<std::vector<int>> cv_folds(int n_cells, int k, std::uint64_t seed) {
  if (k < 2) throw FoldError("cv_folds: need at least 2 folds");
  if (k > n_cells) throw FoldError("cv_folds: more folds than cells");

  std::vector<int> order(static_cast<size_t>(n_cells));
  std::iota(order.begin(), order.end(), 0);
  rng::Stream stream(seed);
  for (int i = n_cells - 1; i > 0; --i) {
    const int j = static_cast<int>(stream.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }

  std::vector<std::vector<int>> folds(static_cast<size_t>(k));
  const int base = n_cells / k;
  const int extra = n_cells % k;
  int pos = 0;
  for (int f = 0; f < k; ++f) {
    const int size = base + (f < extra ? 1 : 0);
    folds[static_cast<size_t>(f)].assign(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  return folds;
}

namespace {

struct Cell {
  int i;
  int j;
};

// True if removing the fold's cells empties some category that has
// observations in the full data.
bool fold_empties_category(const IndicatorMatrix& g, const std::vector<Cell>& cells,
                           const std::vector<int>& fold) {
  Vector counts = category_margins(g);
  for (int id : fold) {
    const Cell& c = cells[static_cast<size_t>(id)];
    const int k = g.cell_index(c.i, c.j);
    counts(g.shape.offset(c.j) + k) -= 1.0;
  }
  const Vector total = category_margins(g);
  for (int col = 0; col < g.cols(); ++col)
    if (total(col) > 0.0 && counts(col) <= 0.0) return true;
  return false;
}

IndicatorMatrix mask_cells(const IndicatorMatrix& g, const std::vector<Cell>& cells,
                           const std::vector<int>& fold) {
  IndicatorMatrix out = g;
  for (int id : fold) {
    const Cell& c = cells[static_cast<size_t>(id)];
    const int off = g.shape.offset(c.j);
    const int kj = g.shape.size(c.j);
    out.values.block(c.i, off, 1, kj).setZero();
    out.mask.block(c.i, off, 1, kj).setZero();
  }
  return out;
}

}  // namespace

CvResult cross_validate(const IndicatorMatrix& g, int p, std::vector<double> lambda_grid, int k,
                        std::uint64_t seed, int threads) {
  if (lambda_grid.empty()) throw Error("cross_validate: empty lambda grid");
  std::sort(lambda_grid.begin(), lambda_grid.end());
  lambda_grid.erase(std::unique(lambda_grid.begin(), lambda_grid.end()), lambda_grid.end());
  if (lambda_grid.front() < 0.0) throw Error("cross_validate: negative lambda");

  // observed cells in row-major order
  std::vector<Cell> cells;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.shape.variables(); ++j)
      if (g.observed(i, j)) cells.push_back({i, j});
  const int n_cells = static_cast<int>(cells.size());

  // partition, redrawn when a fold would empty a category
  std::vector<std::vector<int>> folds;
  bool valid = false;
  for (int attempt = 0; attempt < 10 && !valid; ++attempt) {
    folds = cv_folds(n_cells, k, attempt == 0 ? seed : rng::derive(seed, static_cast<std::uint64_t>(attempt)));
    valid = true;
    for (const auto& fold : folds)
      if (fold_empties_category(g, cells, fold)) {
        valid = false;
        break;
      }
    if (!valid && attempt < 9)
      std::fprintf(stderr, "cross_validate: fold empties a category, resampling partition (attempt %d)\n",
                   attempt + 1);
  }
  if (!valid) throw FoldError("cross_validate: could not draw folds that keep every category observed");

  const int n_lambda = static_cast<int>(lambda_grid.size());
  // score[fold][grid]
  std::vector<std::vector<double>> score(static_cast<size_t>(k),
                                         std::vector<double>(static_cast<size_t>(n_lambda), 0.0));

  const int nthreads = resolve_threads(threads);
  parallel_indexed(k, nthreads, [&](int f) {
    const auto& fold = folds[static_cast<size_t>(f)];
    const IndicatorMatrix train = mask_cells(g, cells, fold);
    ModelParams warm;
    bool have_warm = false;
    // descending lambda with warm starts
    for (int gi = n_lambda - 1; gi >= 0; --gi) {
      FitConfig config;
      config.p = p;
      config.lambda = lambda_grid[static_cast<size_t>(gi)];
      const FitResult res = have_warm ? fit(train, config, warm) : fit(train, config);
      warm = res.params;
      have_warm = true;
      double dev = 0.0;
      for (int id : fold) {
        const Cell& c = cells[static_cast<size_t>(id)];
        dev -= log_predictive(res.params, c.i, c.j, g.cell_index(c.i, c.j));
      }
      score[static_cast<size_t>(f)][static_cast<size_t>(gi)] = dev;
    }
  });

  CvResult out;
  out.lambda_grid = lambda_grid;
  out.seed = seed;
  out.mean_heldout_deviance.assign(static_cast<size_t>(n_lambda), 0.0);
  for (int gi = 0; gi < n_lambda; ++gi) {
    double sum = 0.0;
    for (int f = 0; f < k; ++f) sum += score[static_cast<size_t>(f)][static_cast<size_t>(gi)];
    out.mean_heldout_deviance[static_cast<size_t>(gi)] = sum / k;
  }
  int best = 0;
  for (int gi = 1; gi < n_lambda; ++gi)
    if (out.mean_heldout_deviance[static_cast<size_t>(gi)] <
        out.mean_heldout_deviance[static_cast<size_t>(best)])
      best = gi;
  out.lambda_star = lambda_grid[static_cast<size_t>(best)];
  return out;
}

}  // namespace mmca
