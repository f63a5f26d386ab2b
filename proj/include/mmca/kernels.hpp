#ifndef MMCA_KERNELS_HPP
#define MMCA_KERNELS_HPP

#include "mmca/types.hpp"

namespace mmca::kernels {

// Row-parallel inner loops of the solver. Parallelism is over rows and every
// output element is written by exactly one thread with a fixed within-row
// evaluation order, so results are bitwise identical for any thread count
// (including 1). The deviance reduction fills a per-row buffer in parallel
// and folds it serially with compensated summation.
//
// kernels::serial holds an independently written reference implementation;
// tests assert exact agreement and tools/mmca_bench compares throughput.

/// Blockwise softmax of theta into pi (max-subtraction for overflow safety).
void softmax_rows(const Matrix& theta, const BlockShape& shape, Matrix& pi);

/// Deviance -sum_ij g' log pi via logsumexp; blocks with g = 0 contribute 0.
double deviance_from_theta(const Matrix& g_values, const Matrix& theta, const BlockShape& shape);

/// Working matrix Z = [theta + 2 (G - W .* Pi)] J_c.
void working_matrix(const Matrix& g_values, const Matrix& mask, const Matrix& theta,
                    const Matrix& pi, const BlockShape& shape, Matrix& z);

namespace serial {

void softmax_rows(const Matrix& theta, const BlockShape& shape, Matrix& pi);
double deviance_from_theta(const Matrix& g_values, const Matrix& theta, const BlockShape& shape);
void working_matrix(const Matrix& g_values, const Matrix& mask, const Matrix& theta,
                    const Matrix& pi, const BlockShape& shape, Matrix& z);

}  // namespace serial

}  // namespace mmca::kernels

#endif  // MMCA_KERNELS_HPP
