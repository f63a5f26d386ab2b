#ifndef MMCA_LINALG_HPP
#define MMCA_LINALG_HPP

#include "mmca/types.hpp"

namespace mmca {

/// Thin SVD M = P * diag(phi) * Q'. Singular values are nonincreasing and
/// nonnegative; values below 1e-12 * phi(0) are flattened to exactly zero.
struct SvdResult {
  Matrix P;    // left singular vectors, orthonormal columns
  Vector phi;  // singular values
  Matrix Q;    // right singular vectors, orthonormal columns
};

/// Thin SVD with a deterministic sign convention: in each left singular
/// vector the entry of largest magnitude is positive (ties break to the
/// lowest row index).
SvdResult thin_svd(const Matrix& m);

/// J * M with J = I - 11'/n: subtracts the column means.
Matrix row_center(const Matrix& m);

/// M * J_c where J_c is block diagonal with blocks I - 11'/K_j: within each
/// variable block every row is centered.
Matrix block_center(const Matrix& m, const BlockShape& shape);

/// Generalized SVD of the triplet (m, col_weights, row_weights): returns
/// (U~, phi, V~) with U~' diag(row_weights) U~ = I and
/// V~' diag(col_weights) V~ = I, computed by symmetric scaling, plain SVD
/// and back-scaling. With unit weights this is exactly thin_svd.
SvdResult weighted_gsvd(const Matrix& m, const Vector& row_weights, const Vector& col_weights);

/// First ncols columns of an orthonormal basis of the column-centered
/// subspace {x : 1'x = 0}, continuing a given partial basis. Used to pad
/// singular vector matrices when the working matrix is rank deficient.
Matrix complete_centered_basis(const Matrix& partial, int ncols);

/// Same for the block-centered subspace {x : 1'x_j = 0 for every block j}.
Matrix complete_block_centered_basis(const Matrix& partial, int ncols, const BlockShape& shape);

}  // namespace mmca

#endif  // MMCA_LINALG_HPP
