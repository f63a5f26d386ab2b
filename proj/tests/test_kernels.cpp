#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mmca/kernels.hpp"
#include "mmca/linalg.hpp"
#include "mmca/rng.hpp"
#include "test_support.hpp"

using namespace mmca;

namespace {

Matrix random_theta(int n, const BlockShape& shape, std::uint64_t seed, double scale = 2.0) {
  rng::Stream stream(seed);
  Matrix theta(n, shape.total());
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < shape.total(); ++c) theta(i, c) = scale * (2.0 * stream.uniform() - 1.0);
  return theta;
}

}  // namespace

TEST_CASE("parallel kernels agree exactly with the serial reference") {
  const BlockShape shape({3, 4, 2, 5});
  IndicatorMatrix g = testing::random_indicator(64, {3, 4, 2, 5}, 5);
  testing::mask_random_cells(g, 0.15, 9);
  const Matrix theta = random_theta(64, shape, 21);

  Matrix pi_par, pi_ser;
  kernels::softmax_rows(theta, shape, pi_par);
  kernels::serial::softmax_rows(theta, shape, pi_ser);
  CHECK((pi_par - pi_ser).cwiseAbs().maxCoeff() == 0.0);

  const double dev_par = kernels::deviance_from_theta(g.values, theta, shape);
  const double dev_ser = kernels::serial::deviance_from_theta(g.values, theta, shape);
  CHECK(dev_par == dev_ser);

  Matrix z_par, z_ser;
  kernels::working_matrix(g.values, g.mask, theta, pi_par, shape, z_par);
  kernels::serial::working_matrix(g.values, g.mask, theta, pi_ser, shape, z_ser);
  CHECK((z_par - z_ser).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("softmax blocks") {
  const BlockShape shape({3, 2});
  Matrix theta(1, 5);
  theta << 0.0, 0.0, 0.0, std::log(2.0), 0.0;
  Matrix pi;
  kernels::softmax_rows(theta, shape, pi);
  CHECK(pi(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(pi(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(pi(0, 2) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(pi(0, 3) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(pi(0, 4) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("softmax is overflow safe at extreme utilities") {
  const BlockShape shape({2});
  Matrix theta(1, 2);
  theta << 1000.0, 0.0;
  Matrix pi;
  kernels::softmax_rows(theta, shape, pi);
  // exact softmax is (1 - e^-1000, e^-1000); e^-1000 underflows to 0
  CHECK(std::isfinite(pi(0, 0)));
  CHECK(pi(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pi(0, 1) >= 0.0);
  CHECK(pi(0, 1) < 1e-300);
  CHECK(pi(0, 0) + pi(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("working matrix rows are block centered; missing rows carry no data pull") {
  const BlockShape shape({3, 2});
  IndicatorMatrix g = testing::random_indicator(12, {3, 2}, 3);
  // fully missing row 4
  g.values.row(4).setZero();
  g.mask.row(4).setZero();
  const Matrix theta = random_theta(12, shape, 8);
  Matrix pi, z;
  kernels::softmax_rows(theta, shape, pi);
  kernels::working_matrix(g.values, g.mask, theta, pi, shape, z);

  for (int j = 0; j < shape.variables(); ++j)
    CHECK(z.middleCols(shape.offset(j), shape.size(j)).rowwise().sum().cwiseAbs().maxCoeff() <
          1e-12);

  const Matrix centered_theta = block_center(theta, shape);
  CHECK((z.row(4) - centered_theta.row(4)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("working matrix with pi equal to g is the block-centered predictor") {
  const BlockShape shape({2, 3});
  const IndicatorMatrix g = testing::random_indicator(9, {2, 3}, 13);
  const Matrix theta = random_theta(9, shape, 14);
  Matrix z;
  kernels::working_matrix(g.values, g.mask, theta, g.values, shape, z);
  CHECK((z - block_center(theta, shape)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("deviance kernel handles zero-g blocks as zero contributions") {
  const BlockShape shape({2});
  Matrix theta(2, 2);
  theta << 0.3, -0.3, 5.0, 1.0;
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = 1.0;  // row 1 entirely missing
  const double dev = kernels::deviance_from_theta(g, theta, shape);
  const double expected = -std::log(std::exp(0.3) / (std::exp(0.3) + std::exp(-0.3)));
  CHECK(dev == doctest::Approx(expected).epsilon(1e-14));
}
