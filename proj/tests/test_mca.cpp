#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mmca/linalg.hpp"
#include "mmca/mca.hpp"
#include "test_support.hpp"

using namespace mmca;
using mmca::testing::example_indicator;

namespace {

// Weighted MCA loss ||JG - XA'||^2 in the (D_c^{-1/2}/J, I/n) metric.
double mca_loss(const IndicatorMatrix& g, const McaResult& r) {
  const Matrix t = row_center(g.values) - r.X * r.A.transpose();
  const Vector counts = category_margins(g);
  const Vector cw = counts.array().rsqrt() / g.shape.variables();
  return (t * cw.asDiagonal() * t.transpose()).trace() / g.rows();
}

}  // namespace

TEST_CASE("fit_mca on the example: spectrum and loss monotone in p") {
  const IndicatorMatrix g = example_indicator();
  const int pstar = g.shape.max_rank(g.rows());
  CHECK(pstar == 5);

  double prev_loss = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= pstar; ++p) {
    const McaResult r = fit_mca(g, p);
    for (int s = 1; s < r.lambda.size(); ++s) CHECK(r.lambda(s) <= r.lambda(s - 1));
    const double loss = mca_loss(g, r);
    CHECK(loss <= prev_loss + 1e-12);
    prev_loss = loss;
  }
}

TEST_CASE("fit_mca result satisfies the triplet normalizations") {
  const IndicatorMatrix g = example_indicator();
  const McaResult r = fit_mca(g, 3);
  const int n = g.rows();
  const Matrix un = r.U_tilde.transpose() * r.U_tilde / n;
  CHECK((un - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
  const Vector counts = category_margins(g);
  const Vector cw = counts.array().rsqrt() / g.shape.variables();
  const Matrix vn = r.V_tilde.transpose() * cw.asDiagonal() * r.V_tilde;
  CHECK((vn - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
  // row coordinates are centered
  CHECK(r.X.colwise().sum().cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fit_mca agrees with the raw generalized SVD of the triplet") {
  const IndicatorMatrix g = example_indicator();
  const McaResult r = fit_mca(g, 2);
  const Vector counts = category_margins(g);
  const SvdResult s = weighted_gsvd(row_center(g.values),
                                    Vector::Constant(g.rows(), 1.0 / g.rows()),
                                    counts.array().rsqrt() / g.shape.variables());
  CHECK((r.U_tilde - s.P.leftCols(2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.V_tilde - s.Q.leftCols(2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.lambda - s.phi.head(2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("full-rank reconstruction recovers G") {
  const IndicatorMatrix g = example_indicator();
  const McaResult r = fit_mca(g, g.shape.max_rank(g.rows()));
  CHECK((reconstruct(r) - g.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("reconstruction block row sums equal 1 (so grand row sums equal J)") {
  // resolves the open reading of the row-sum identity: it holds per variable
  // block at every rank, hence the grand row sum is J
  const IndicatorMatrix g = example_indicator();
  for (int p : {1, 2, 4}) {
    const Matrix ghat = reconstruct(fit_mca(g, p));
    for (int j = 0; j < g.shape.variables(); ++j) {
      const auto blk = ghat.middleCols(g.shape.offset(j), g.shape.size(j));
      CHECK((blk.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-8);
    }
    CHECK((ghat.rowwise().sum().array() - g.shape.variables()).abs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("fitted values can be negative: the motivating defect") {
  const IndicatorMatrix g = example_indicator();
  const Matrix ghat = reconstruct(fit_mca(g, 1));
  CHECK(ghat.minCoeff() < -0.1);  // -0.366 on this fixture
}

TEST_CASE("rank-0 reconstruction is the category proportions") {
  const IndicatorMatrix g = example_indicator();
  McaResult r;
  r.shape = g.shape;
  r.p = 0;
  r.U_tilde = Matrix::Zero(g.rows(), 0);
  r.V_tilde = Matrix::Zero(g.cols(), 0);
  r.lambda = Vector::Zero(0);
  r.X = Matrix::Zero(g.rows(), 0);
  r.A = Matrix::Zero(g.cols(), 0);
  r.mu = g.values.colwise().mean().transpose();
  const Matrix ghat = reconstruct(r);
  for (int c = 0; c < g.cols(); ++c) {
    CHECK(ghat(0, c) == doctest::Approx(g.values.col(c).mean()));
    CHECK((ghat.col(c).array() - ghat(0, c)).abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("rank-deficient data: duplicate row patterns give trailing zero spectrum") {
  std::vector<Variable> vars{{"v0", {"a", "b"}}, {"v1", {"x", "y"}}};
  std::vector<int> cells;
  for (int i = 0; i < 10; ++i) {
    if (i % 2 == 0) {
      cells.push_back(0);
      cells.push_back(0);
    } else {
      cells.push_back(1);
      cells.push_back(1);
    }
  }
  const IndicatorMatrix g = build_indicator(CategoricalDataset(10, vars, cells));
  const McaResult r = fit_mca(g, 2);
  CHECK(r.lambda(0) > 0.1);
  CHECK(r.lambda(1) == 0.0);  // below the rank cutoff, flattened
}

TEST_CASE("fit_mca error paths") {
  const IndicatorMatrix g = example_indicator();
  SUBCASE("rank out of range") {
    CHECK_THROWS_AS(fit_mca(g, 0), RankError);
    CHECK_THROWS_AS(fit_mca(g, 6), RankError);
  }
  SUBCASE("missing cells rejected") {
    IndicatorMatrix masked = g;
    masked.values.block(0, 0, 1, 3).setZero();
    masked.mask.block(0, 0, 1, 3).setZero();
    CHECK_THROWS_AS(fit_mca(masked, 2), MissingDataError);
  }
  SUBCASE("all rows identical: unused categories have zero counts") {
    std::vector<Variable> vars{{"v0", {"a", "b"}}, {"v1", {"x", "y"}}};
    std::vector<int> cells;
    for (int i = 0; i < 6; ++i) {
      cells.push_back(0);
      cells.push_back(1);
    }
    const IndicatorMatrix constant = build_indicator(CategoricalDataset(6, vars, cells));
    CHECK_THROWS_AS(fit_mca(constant, 1), DegenerateCategoryError);
  }
}
