#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "mmca/dataset.hpp"
#include "test_support.hpp"

using namespace mmca;
using mmca::testing::example_indicator;

TEST_CASE("parse_csv reproduces the three-variable example") {
  std::ifstream in(testing::data_path("paper_example.csv"));
  REQUIRE(in.good());
  const CategoricalDataset data = parse_csv(in);
  CHECK(data.n() == 10);
  CHECK(data.variables() == 3);
  CHECK(data.variable(0).categories == std::vector<std::string>{"a", "b", "c"});
  CHECK(data.variable(1).categories == std::vector<std::string>{"x", "y", "z"});
  CHECK(data.variable(2).categories == std::vector<std::string>{"p", "q"});

  const IndicatorMatrix g = build_indicator(data);
  const IndicatorMatrix expected = example_indicator();
  CHECK((g.values - expected.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.mask.minCoeff() == 1.0);
  g.validate();
}

TEST_CASE("parse_csv enumerates categories in first-appearance order") {
  std::istringstream in("v\na\na\na\nb\n");
  const CategoricalDataset data = parse_csv(in);
  CHECK(data.variable(0).categories == std::vector<std::string>{"a", "b"});
  CHECK(data.cell(0, 0) == 0);
  CHECK(data.cell(1, 0) == 0);
  CHECK(data.cell(2, 0) == 0);
  CHECK(data.cell(3, 0) == 1);
}

TEST_CASE("parse_csv error paths") {
  SUBCASE("ragged row") {
    std::istringstream in("a,b\n1,2\n1\n");
    CHECK_THROWS_AS(parse_csv(in), ParseError);
  }
  SUBCASE("column entirely missing") {
    std::istringstream in("a,b\n1,NA\n2,NA\n");
    CHECK_THROWS_AS(parse_csv(in), DegenerateVariableError);
  }
  SUBCASE("single observed category") {
    std::istringstream in("a,b\n1,z\n2,z\n");
    CHECK_THROWS_AS(parse_csv(in), DegenerateVariableError);
  }
  SUBCASE("custom na token") {
    std::istringstream in("a,b\n1,x\n.,y\n2,x\n");
    const CategoricalDataset data = parse_csv(in, ".");
    CHECK(data.missing(1, 0));
    CHECK(!data.missing(1, 1));
  }
}

TEST_CASE("build_indicator column sums match observed counts") {
  const IndicatorMatrix g = example_indicator();
  const Vector margins = category_margins(g);
  Vector expected(8);
  expected << 6, 2, 2, 8, 1, 1, 2, 8;
  CHECK((margins - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("missing cells become all-zero blocks in values and mask") {
  std::vector<Variable> vars{{"v0", {"a", "b"}}, {"v1", {"x", "y"}}, {"v2", {"s", "t", "u"}}};
  std::vector<int> cells{0, 1, 2,
                         1, 0, CategoricalDataset::kMissing};
  const CategoricalDataset data(2, vars, cells);
  const IndicatorMatrix g = build_indicator(data);
  g.validate();
  CHECK(g.values.block(1, 4, 1, 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.mask.block(1, 4, 1, 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.mask.block(0, 4, 1, 3).minCoeff() == 1.0);
}

TEST_CASE("category_margins edge cases") {
  SUBCASE("all cells missing in a copy") {
    IndicatorMatrix g = example_indicator();
    g.values.setZero();
    g.mask.setZero();
    CHECK(category_margins(g).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single fully observed row") {
    std::vector<Variable> vars{{"v0", {"a", "b"}}, {"v1", {"x", "y"}}};
    const CategoricalDataset data(1, vars, {1, 0});
    const Vector m = category_margins(build_indicator(data));
    CHECK(m.sum() == 2.0);
    CHECK(m(1) == 1.0);
    CHECK(m(2) == 1.0);
  }
}

TEST_CASE("decode then rebuild is the identity on fully observed data") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const IndicatorMatrix g = testing::random_indicator(25, {3, 4, 2, 5}, seed);
    const std::vector<int> cells = decode_cells(g);
    std::vector<Variable> vars;
    for (int j = 0; j < g.shape.variables(); ++j) {
      Variable v{"v" + std::to_string(j), {}};
      for (int k = 0; k < g.shape.size(j); ++k) v.categories.push_back("c" + std::to_string(k));
      vars.push_back(v);
    }
    const IndicatorMatrix rebuilt = build_indicator(CategoricalDataset(g.rows(), vars, cells));
    CHECK((rebuilt.values - g.values).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("row block sums: one per observed g block, K_j per mask block") {
  IndicatorMatrix g = testing::random_indicator(30, {2, 3, 4}, 7);
  testing::mask_random_cells(g, 0.2, 11);
  g.validate();
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.shape.variables(); ++j) {
      const double gs = g.values.block(i, g.shape.offset(j), 1, g.shape.size(j)).sum();
      const double ws = g.mask.block(i, g.shape.offset(j), 1, g.shape.size(j)).sum();
      if (g.observed(i, j)) {
        CHECK(gs == 1.0);
        CHECK(ws == static_cast<double>(g.shape.size(j)));
      } else {
        CHECK(gs == 0.0);
        CHECK(ws == 0.0);
      }
    }
  }
}

TEST_CASE("simulate_multinomial uniform frequencies pass a chi-square check") {
  const BlockShape shape({4});
  const int n = 10000;
  const IndicatorMatrix g =
      simulate_multinomial(Vector::Zero(4), Matrix::Zero(n, 4), shape, 42);
  g.validate();
  const Vector counts = category_margins(g);
  double chi2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double expected = n / 4.0;
    chi2 += (counts(k) - expected) * (counts(k) - expected) / expected;
  }
  // chi-square(3) critical value at alpha = 0.01
  CHECK(chi2 < 11.345);
}

TEST_CASE("simulate_multinomial log-odds: centered (log 9, 0) gives odds 9") {
  const BlockShape shape({2});
  const int n = 50000;
  Vector mu(2);
  mu << std::log(9.0) / 2.0, -std::log(9.0) / 2.0;
  const IndicatorMatrix g = simulate_multinomial(mu, Matrix::Zero(n, 2), shape, 1234);
  const Vector counts = category_margins(g);
  const double odds = counts(0) / counts(1);
  // pi = (0.9, 0.1); 4-sigma band for the count ratio
  CHECK(odds == doctest::Approx(9.0).epsilon(0.07));
}

TEST_CASE("simulate_multinomial is deterministic given the seed") {
  const BlockShape shape({3, 2});
  Matrix inter = Matrix::Zero(20, 5);
  Vector mu = Vector::Zero(5);
  const IndicatorMatrix a = simulate_multinomial(mu, inter, shape, 99);
  const IndicatorMatrix b = simulate_multinomial(mu, inter, shape, 99);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
  const IndicatorMatrix c = simulate_multinomial(mu, inter, shape, 100);
  CHECK((a.values - c.values).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("simulate_multinomial rejects non-finite predictors") {
  const BlockShape shape({2});
  Vector mu(2);
  mu << std::numeric_limits<double>::infinity(), 0.0;
  CHECK_THROWS_AS(simulate_multinomial(mu, Matrix::Zero(3, 2), shape, 0), NumericalError);
}
