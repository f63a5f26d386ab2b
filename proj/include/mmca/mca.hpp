#ifndef MMCA_MCA_HPP
#define MMCA_MCA_HPP

#include "mmca/dataset.hpp"
#include "mmca/types.hpp"

namespace mmca {

/// Classical multiple correspondence analysis of a fully observed indicator
/// matrix: generalized SVD of the triplet (JG, D_c^{-1/2}/J, I_n/n).
struct McaResult {
  Matrix U_tilde;   // n x p, U~' (I/n) U~ = I
  Vector lambda;    // singular values Lambda^{1/2}, nonincreasing
  Matrix V_tilde;   // K x p, V~' (D_c^{-1/2}/J) V~ = I
  Matrix X;         // n x p, U~ Lambda^{1/4}
  Matrix A;         // K x p, V~ Lambda^{1/4}
  Vector mu;        // category main effects: column means of G
  BlockShape shape;
  int p = 0;
};

/// Fit MCA at rank p, 1 <= p <= min(n-1, K-J). Requires full observation;
/// a zero-count category makes the column weights singular.
McaResult fit_mca(const IndicatorMatrix& g, int p);

/// Reconstruction g^_ijk = mu_jk + x_i' a_jk, i.e. 1 mu' + X A'.
Matrix reconstruct(const McaResult& result);

}  // namespace mmca

#endif  // MMCA_MCA_HPP
