#include "mmca/linalg.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace mmca {

namespace {

constexpr double kRankCutoff = 1e-12;

// Largest-magnitude entry of each left singular vector made positive; the
// paired right vector is flipped with it so P * Phi * Q' is unchanged.
void apply_sign_convention(Matrix& p, Matrix& q) {
  for (int s = 0; s < p.cols(); ++s) {
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < p.rows(); ++i) {
      const double a = std::abs(p(i, s));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (p(arg, s) < 0.0) {
      p.col(s) = -p.col(s);
      if (s < q.cols()) q.col(s) = -q.col(s);
    }
  }
}

}  // namespace

SvdResult thin_svd(const Matrix& m) {
  if (!m.allFinite()) throw NumericalError("thin_svd: non-finite input");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw NumericalError("thin_svd: factorization did not converge");
  SvdResult out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  if (out.phi.size() > 0) {
    const double cutoff = kRankCutoff * out.phi(0);
    for (int s = 0; s < out.phi.size(); ++s)
      if (out.phi(s) < cutoff) out.phi(s) = 0.0;
  }
  apply_sign_convention(out.P, out.Q);
  return out;
}

Matrix row_center(const Matrix& m) {
  return m.rowwise() - m.colwise().mean();
}

Matrix block_center(const Matrix& m, const BlockShape& shape) {
  if (m.cols() != shape.total())
    throw ShapeError("block_center: column count does not match shape");
  Matrix out = m;
  for (int j = 0; j < shape.variables(); ++j) {
    auto blk = out.middleCols(shape.offset(j), shape.size(j));
    blk.colwise() -= blk.rowwise().mean().eval();
  }
  return out;
}

SvdResult weighted_gsvd(const Matrix& m, const Vector& row_weights, const Vector& col_weights) {
  if (row_weights.size() != m.rows() || col_weights.size() != m.cols())
    throw ShapeError("weighted_gsvd: weight dimensions do not match matrix");
  if ((row_weights.array() <= 0.0).any() || (col_weights.array() <= 0.0).any())
    throw WeightError("weighted_gsvd: weights must be strictly positive");

  const Vector rw_sqrt = row_weights.array().sqrt();
  const Vector cw_sqrt = col_weights.array().sqrt();
  const Matrix scaled = rw_sqrt.asDiagonal() * m * cw_sqrt.asDiagonal();
  SvdResult inner = thin_svd(scaled);
  SvdResult out;
  out.phi = std::move(inner.phi);
  out.P = rw_sqrt.cwiseInverse().asDiagonal() * inner.P;
  out.Q = cw_sqrt.cwiseInverse().asDiagonal() * inner.Q;
  return out;
}

namespace {

// Modified Gram-Schmidt of `candidate` against the columns of `basis`;
// returns false if the residual is numerically dependent.
bool orthogonalize_into(const Matrix& basis, int used, Vector& candidate) {
  for (int pass = 0; pass < 2; ++pass)
    for (int s = 0; s < used; ++s)
      candidate -= basis.col(s).dot(candidate) * basis.col(s);
  const double nrm = candidate.norm();
  if (nrm < 1e-8) return false;
  candidate /= nrm;
  return true;
}

}  // namespace

Matrix complete_centered_basis(const Matrix& partial, int ncols) {
  const int n = static_cast<int>(partial.rows());
  Matrix out(n, ncols);
  const int have = static_cast<int>(partial.cols());
  out.leftCols(have) = partial;
  int used = have;
  for (int i = 0; i < n && used < ncols; ++i) {
    Vector cand = Vector::Zero(n);
    cand(i) = 1.0;
    cand.array() -= 1.0 / n;  // center
    if (orthogonalize_into(out, used, cand)) out.col(used++) = cand;
  }
  if (used < ncols) throw NumericalError("could not complete centered basis");
  return out;
}

Matrix complete_block_centered_basis(const Matrix& partial, int ncols, const BlockShape& shape) {
  const int k = shape.total();
  Matrix out(k, ncols);
  const int have = static_cast<int>(partial.cols());
  out.leftCols(have) = partial;
  int used = have;
  for (int c = 0; c < k && used < ncols; ++c) {
    Vector cand = Vector::Zero(k);
    cand(c) = 1.0;
    const int j = shape.block_of(c);
    cand.segment(shape.offset(j), shape.size(j)).array() -= 1.0 / shape.size(j);
    if (orthogonalize_into(out, used, cand)) out.col(used++) = cand;
  }
  if (used < ncols) throw NumericalError("could not complete block-centered basis");
  return out;
}

}  // namespace mmca
