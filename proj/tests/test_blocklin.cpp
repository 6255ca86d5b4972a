#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "lk/blocklin.hpp"
#include "lk/checks.hpp"
#include "lk/error.hpp"
#include "lk/fit.hpp"
#include "lk/rng.hpp"

using namespace lk;

namespace {

Eigen::MatrixXd random_block(int r, int c, SplitMix64& rng) {
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = 2 * rng.uniform() - 1;
  return m;
}

Eigen::MatrixXd random_spd(int n, SplitMix64& rng) {
  const Eigen::MatrixXd m = random_block(n, n, rng);
  return m * m.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("invert") {
  CHECK(invert(Eigen::MatrixXd::Identity(3, 3)) == Eigen::MatrixXd::Identity(3, 3));
  Eigen::MatrixXd d(2, 2);
  d << 2, 0, 0, 3;
  const Eigen::MatrixXd di = invert(d);
  CHECK(di(0, 0) == doctest::Approx(0.5));
  CHECK(di(1, 1) == doctest::Approx(1.0 / 3));
  CHECK(di(0, 1) == 0);

  SplitMix64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXd m = random_spd(5, rng);
    CHECK(max_abs(m * invert(m) - Eigen::MatrixXd::Identity(5, 5)) < 1e-12);
  }

  Eigen::MatrixXd singular(2, 2);
  singular << 1, 1, 1, 1;
  CHECK_THROWS_AS(invert(singular), NumericError);
}

TEST_CASE("det") {
  CHECK(det(Eigen::MatrixXd::Identity(4, 4)) == 1);
  Eigen::MatrixXd d(2, 2);
  d << 4, 0, 0, 9;
  CHECK(det(d) == doctest::Approx(36));
  SplitMix64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXd m = random_spd(4, rng);
    CHECK(det(m) == doctest::Approx(m.determinant()).epsilon(1e-12));
  }
}

TEST_CASE("block split validation") {
  CHECK_NOTHROW((BlockSplit{{0, 1}, {2}}.validate(3)));
  CHECK_NOTHROW((BlockSplit{{2}, {0, 1}}.validate(3)));
  CHECK_THROWS_AS((BlockSplit{{0, 1}, {1}}.validate(3)), InputError);
  CHECK_THROWS_AS((BlockSplit{{0, 1, 2}, {}}.validate(3)), InputError);
  CHECK_THROWS_AS((BlockSplit{{0}, {1}}.validate(3)), InputError);
  CHECK_THROWS_AS((BlockSplit{{0}, {3}}.validate(2)), InputError);
}

TEST_CASE("decoupled block inverse") {
  Eigen::MatrixXd a(1, 1), d(1, 1);
  a << 2;
  d << 3;
  const Eigen::MatrixXd b = Eigen::MatrixXd::Zero(1, 1), c = Eigen::MatrixXd::Zero(1, 1);
  const BlockInverse bi = lemma_block_inverse(a, b, c, d, 0.1);
  CHECK(bi.inverse(0, 0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(bi.inverse(1, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(bi.inverse(0, 1) == 0);
  CHECK(bi.leading_upper_left(0, 0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(bi.leading_lower_right(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(max_abs(bi.upper_left() - bi.leading_upper_left) < 1e-14);
}

TEST_CASE("block inverse matches the dense inverse") {
  SplitMix64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXd a = random_block(2, 2, rng) + 3 * Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd d = random_block(3, 3, rng) + 4 * Eigen::MatrixXd::Identity(3, 3);
    const Eigen::MatrixXd b = random_block(2, 3, rng), c = random_block(3, 2, rng);
    for (double eps : {1.0, 0.1, 0.01}) {
      const Eigen::MatrixXd full = scaled_block_matrix(a, b, c, d, eps);
      CHECK(full(0, 0) == doctest::Approx(eps * a(0, 0)));
      CHECK(full(4, 4) == d(2, 2));
      const BlockInverse bi = lemma_block_inverse(a, b, c, d, eps);
      const Eigen::MatrixXd dense = full.inverse();
      CHECK(max_abs(bi.inverse - dense) <= 1e-10 * max_abs(dense));
      CHECK(bi.upper_size() == 2);
      CHECK(bi.upper_right().rows() == 2);
      CHECK(bi.upper_right().cols() == 3);
      CHECK(bi.lower_left().rows() == 3);
    }
  }
}

TEST_CASE("block expansion error structure") {
  SplitMix64 rng(4);
  const Eigen::MatrixXd a = random_spd(2, rng), d = random_spd(3, rng);
  const Eigen::MatrixXd b = random_block(2, 3, rng), c = random_block(3, 2, rng);
  std::vector<double> eps{1e-1, 1e-2, 1e-3}, ul, lr;
  for (double e : eps) {
    const BlockInverse bi = lemma_block_inverse(a, b, c, d, e);
    ul.push_back(max_abs(bi.upper_left() - bi.leading_upper_left));
    lr.push_back(max_abs(bi.lower_right() - bi.leading_lower_right));
  }
  CHECK(ul[2] <= 2 * ul[0] + 1e-12);
  CHECK(loglog_slope(eps, lr) == doctest::Approx(1.0).epsilon(0.15));

  const BlockHarnessReport h = block_inverse_harness(100, 7);
  CHECK(h.matrices == 100);
  CHECK(h.pass);
  CHECK(h.max_dense_mismatch <= 1e-9);
  CHECK(h.min_lower_right_slope >= 0.85);
  CHECK(h.max_lower_right_slope <= 1.15);
}

TEST_CASE("block inverse errors") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2), d = Eigen::MatrixXd::Identity(1, 1);
  const Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 1), c = Eigen::MatrixXd::Zero(1, 2);
  CHECK_THROWS(lemma_block_inverse(a, b, c, d, 0.0));
  CHECK_THROWS(lemma_block_inverse(a, b, c, d, -1.0));
  CHECK_THROWS(lemma_block_inverse(Eigen::MatrixXd::Zero(2, 2), b, c, d, 0.5));
}

TEST_CASE("slope and richardson fits") {
  const std::vector<double> x{0.5, 0.25, 0.125};
  const std::vector<double> y{0.5 * 0.5 * 3, 0.25 * 0.25 * 3, 0.125 * 0.125 * 3};
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::isnan(loglog_slope(x, std::vector<double>{0, 0, 1})));
  const std::vector<double> v{1 + 2 * 0.5, 1 + 2 * 0.25, 1 + 2 * 0.125};
  CHECK(richardson_limit(x, v) == doctest::Approx(1.0).epsilon(1e-14));
}
