#include "mmca/kernels.hpp"

#include <cmath>
#include <vector>

namespace mmca::kernels {

namespace {

// One row of the blockwise softmax.
inline void softmax_row(const Matrix& theta, const BlockShape& shape, int i, Matrix& pi) {
  for (int j = 0; j < shape.variables(); ++j) {
    const int off = shape.offset(j);
    const int kj = shape.size(j);
    double m = theta(i, off);
    for (int k = 1; k < kj; ++k) m = std::max(m, theta(i, off + k));
    double denom = 0.0;
    for (int k = 0; k < kj; ++k) denom += std::exp(theta(i, off + k) - m);
    for (int k = 0; k < kj; ++k) pi(i, off + k) = std::exp(theta(i, off + k) - m) / denom;
  }
}

// Deviance contribution of row i: sum over blocks of g'(lse - theta).
inline double deviance_row(const Matrix& g, const Matrix& theta, const BlockShape& shape, int i) {
  double term = 0.0;
  for (int j = 0; j < shape.variables(); ++j) {
    const int off = shape.offset(j);
    const int kj = shape.size(j);
    double m = theta(i, off);
    for (int k = 1; k < kj; ++k) m = std::max(m, theta(i, off + k));
    double denom = 0.0;
    for (int k = 0; k < kj; ++k) denom += std::exp(theta(i, off + k) - m);
    const double lse = m + std::log(denom);
    for (int k = 0; k < kj; ++k) {
      const double gv = g(i, off + k);
      if (gv != 0.0) term += gv * (lse - theta(i, off + k));
    }
  }
  return term;
}

// Row i of Z = [theta + 2 (G - W .* Pi)] J_c.
inline void working_row(const Matrix& g, const Matrix& w, const Matrix& theta, const Matrix& pi,
                        const BlockShape& shape, int i, Matrix& z) {
  for (int j = 0; j < shape.variables(); ++j) {
    const int off = shape.offset(j);
    const int kj = shape.size(j);
    double mean = 0.0;
    for (int k = 0; k < kj; ++k) {
      const int c = off + k;
      const double v = theta(i, c) + 2.0 * (g(i, c) - w(i, c) * pi(i, c));
      z(i, c) = v;
      mean += v;
    }
    mean /= kj;
    for (int k = 0; k < kj; ++k) z(i, off + k) -= mean;
  }
}

// Neumaier-compensated fold of the per-row buffer (fixed order).
inline double compensated_sum(const std::vector<double>& terms) {
  double sum = 0.0, comp = 0.0;
  for (double t : terms) {
    const double s = sum + t;
    if (std::abs(sum) >= std::abs(t))
      comp += (sum - s) + t;
    else
      comp += (t - s) + sum;
    sum = s;
  }
  return sum + comp;
}

}  // namespace

void softmax_rows(const Matrix& theta, const BlockShape& shape, Matrix& pi) {
  const int n = static_cast<int>(theta.rows());
  pi.resize(n, theta.cols());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) softmax_row(theta, shape, i, pi);
}

double deviance_from_theta(const Matrix& g_values, const Matrix& theta, const BlockShape& shape) {
  const int n = static_cast<int>(theta.rows());
  std::vector<double> terms(static_cast<size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) terms[static_cast<size_t>(i)] = deviance_row(g_values, theta, shape, i);
  return compensated_sum(terms);
}

void working_matrix(const Matrix& g_values, const Matrix& mask, const Matrix& theta,
                    const Matrix& pi, const BlockShape& shape, Matrix& z) {
  const int n = static_cast<int>(theta.rows());
  z.resize(n, theta.cols());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) working_row(g_values, mask, theta, pi, shape, i, z);
}

// ============================================================================
// Serial reference (independent plain loops, kept for testing)
// ============================================================================

namespace serial {

void softmax_rows(const Matrix& theta, const BlockShape& shape, Matrix& pi) {
  pi.resize(theta.rows(), theta.cols());
  for (int i = 0; i < theta.rows(); ++i) {
    for (int j = 0; j < shape.variables(); ++j) {
      const int off = shape.offset(j);
      const int kj = shape.size(j);
      double m = theta(i, off);
      for (int k = 1; k < kj; ++k)
        if (theta(i, off + k) > m) m = theta(i, off + k);
      double denom = 0.0;
      for (int k = 0; k < kj; ++k) denom += std::exp(theta(i, off + k) - m);
      for (int k = 0; k < kj; ++k) pi(i, off + k) = std::exp(theta(i, off + k) - m) / denom;
    }
  }
}

double deviance_from_theta(const Matrix& g_values, const Matrix& theta, const BlockShape& shape) {
  double sum = 0.0, comp = 0.0;
  for (int i = 0; i < theta.rows(); ++i) {
    double term = 0.0;
    for (int j = 0; j < shape.variables(); ++j) {
      const int off = shape.offset(j);
      const int kj = shape.size(j);
      double m = theta(i, off);
      for (int k = 1; k < kj; ++k)
        if (theta(i, off + k) > m) m = theta(i, off + k);
      double denom = 0.0;
      for (int k = 0; k < kj; ++k) denom += std::exp(theta(i, off + k) - m);
      const double lse = m + std::log(denom);
      for (int k = 0; k < kj; ++k)
        if (g_values(i, off + k) != 0.0)
          term += g_values(i, off + k) * (lse - theta(i, off + k));
    }
    const double s = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - s) + term;
    else
      comp += (term - s) + sum;
    sum = s;
  }
  return sum + comp;
}

void working_matrix(const Matrix& g_values, const Matrix& mask, const Matrix& theta,
                    const Matrix& pi, const BlockShape& shape, Matrix& z) {
  z.resize(theta.rows(), theta.cols());
  for (int i = 0; i < theta.rows(); ++i) {
    for (int j = 0; j < shape.variables(); ++j) {
      const int off = shape.offset(j);
      const int kj = shape.size(j);
      double mean = 0.0;
      for (int k = 0; k < kj; ++k) {
        const int c = off + k;
        z(i, c) = theta(i, c) + 2.0 * (g_values(i, c) - mask(i, c) * pi(i, c));
        mean += z(i, c);
      }
      mean /= kj;
      for (int k = 0; k < kj; ++k) z(i, off + k) -= mean;
    }
  }
}

}  // namespace serial

}  // namespace mmca::kernels
