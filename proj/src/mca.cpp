#include "mmca/mca.hpp"

#include <cmath>

#include "mmca/linalg.hpp"

namespace mmca {

McaResult fit_mca(const IndicatorMatrix& g, int p) {
  if (!g.fully_observed())
    throw MissingDataError("fit_mca requires fully observed data");
  const int n = g.rows();
  const int J = g.shape.variables();
  const int pstar = g.shape.max_rank(n);
  if (p < 1 || p > pstar)
    throw RankError("fit_mca: rank must be in [1, " + std::to_string(pstar) + "]");

  const Vector counts = category_margins(g);
  if ((counts.array() <= 0.0).any())
    throw DegenerateCategoryError("fit_mca: category with zero observed count");

  // Triplet (JG, D_c^{-1/2}/J, I_n/n).
  const Matrix centered = row_center(g.values);
  const Vector row_w = Vector::Constant(n, 1.0 / n);
  const Vector col_w = counts.array().rsqrt() / static_cast<double>(J);
  SvdResult gsvd = weighted_gsvd(centered, row_w, col_w);

  McaResult out;
  out.shape = g.shape;
  out.p = p;
  out.U_tilde = gsvd.P.leftCols(p);
  out.V_tilde = gsvd.Q.leftCols(p);
  out.lambda = gsvd.phi.head(p);
  const Vector quarter = out.lambda.array().sqrt();  // Lambda^{1/4}
  out.X = out.U_tilde * quarter.asDiagonal();
  out.A = out.V_tilde * quarter.asDiagonal();
  out.mu = g.values.colwise().mean().transpose();
  return out;
}

Matrix reconstruct(const McaResult& result) {
  Matrix ghat = result.X * result.A.transpose();
  ghat.rowwise() += result.mu.transpose();
  return ghat;
}

}  // namespace mmca
