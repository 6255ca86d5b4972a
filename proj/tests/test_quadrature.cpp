#include <doctest.h>

#include <cmath>
#include <cstring>
#include <memory>
#include <numbers>
#include <vector>

#include "lk/curvature.hpp"
#include "lk/error.hpp"
#include "lk/quadrature.hpp"
#include "lk/rng.hpp"
#include "lk/summation.hpp"
#include "lk/zoo.hpp"

using namespace lk;

namespace {

constexpr double kPi = std::numbers::pi;

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

double gauss_curvature(std::span<const double>, const MetricJet& mj) {
  return sectional(curvature_bundle(mj), mj.g, 0, 1);
}

}  // namespace

TEST_CASE("gauss-legendre rules") {
  for (int m : {1, 2, 5, 8, 17}) {
    const QuadratureRule r = gauss_legendre(m, -1, 2);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(m));
    double s = 0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      CHECK(r.nodes[k] > -1);
      CHECK(r.nodes[k] < 2);
      s += r.weights[k];
    }
    CHECK(s == doctest::Approx(3.0).epsilon(1e-14));
    // exact for degree 2m - 1
    const int deg = 2 * m - 1;
    double q = 0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) q += r.weights[k] * std::pow(r.nodes[k], deg);
    const double exact = (std::pow(2.0, deg + 1) - std::pow(-1.0, deg + 1)) / (deg + 1);
    CHECK(q == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gauss_legendre(0, 0, 1), InputError);
}

TEST_CASE("trapezoid rule is spectral on periodic functions") {
  const QuadratureRule r = trapezoid(16, 0, 2 * kPi);
  double s = 0, c = 0;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) {
    s += r.weights[k];
    c += r.weights[k] * std::exp(std::cos(r.nodes[k]));
  }
  CHECK(s == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(c == doctest::Approx(2 * kPi * std::cyl_bessel_i(0.0, 1.0)).epsilon(1e-13));
  CHECK(r.nodes.front() == 0);
}

TEST_CASE("grid") {
  const Box box{{{0, 1}, {0, 2 * kPi}}, {false, true}};
  const QuadratureGrid g(box, 4);
  CHECK(g.size() == 16);
  CHECK(g.dim() == 2);
  CHECK(g.weight_sum() == doctest::Approx(2 * kPi).epsilon(1e-14));
  std::vector<double> x(2);
  const double w = g.node(5, x);
  CHECK(w > 0);
  CHECK(box.contains(x));
}

TEST_CASE("areas") {
  const QuadratureOptions opt;
  CHECK(volume(zoo::make("sphere").atlas, opt).value == doctest::Approx(4 * kPi).epsilon(1e-8));
  CHECK(volume(zoo::make("sphere", {{"r", 2.0}}).atlas, opt).value == doctest::Approx(16 * kPi).epsilon(1e-8));
  const Atlas torus = zoo::make("flat_torus").atlas;
  for (int order : {1, 2, 3, 8})
    CHECK(integrate_at_order(*torus.front(), [](auto, const MetricJet&) { return 1.0; }, order, 1) ==
          doctest::Approx(4 * kPi * kPi).epsilon(1e-14));
  CHECK(integrate(zoo::make("sphere").atlas, gauss_curvature, opt).value == doctest::Approx(4 * kPi).epsilon(1e-8));
}

TEST_CASE("warped volume matches the reduced integral") {
  const QuadratureOptions opt;
  const QuadratureRule r = trapezoid(64, 0, 2 * kPi);
  double reduced = 0;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) {
    const double f = 1 + 0.3 * std::sin(r.nodes[k]);
    reduced += r.weights[k] * 4 * kPi * f * f;
  }
  CHECK(volume(zoo::make("warped_s2_over_s1").atlas, opt).value == doctest::Approx(reduced).epsilon(1e-9));
}

TEST_CASE("deterministic across worker counts") {
  const Atlas atlas = zoo::make("warped_s2_over_s1").atlas;
  QuadratureOptions opt;
  opt.workers = 1;
  const double v1 = volume(atlas, opt).value;
  for (int w : {2, 8}) {
    opt.workers = w;
    CHECK(same_bits(volume(atlas, opt).value, v1));
  }
  SplitMix64 rng(3);
  std::vector<double> terms(100000);
  for (double& t : terms) t = (rng.uniform() - 0.5) * std::pow(10.0, 8 * rng.uniform());
  const auto term = [&](std::size_t i) { return terms[i]; };
  const double s1 = deterministic_sum(terms.size(), 1, term);
  CHECK(same_bits(deterministic_sum(terms.size(), 2, term), s1));
  CHECK(same_bits(deterministic_sum(terms.size(), 8, term), s1));
}

TEST_CASE("compensated summation") {
  CompensatedSum s;
  s.add(1.0);
  for (int k = 0; k < 1000; ++k) s.add(1e-16);
  CHECK(s.value() == doctest::Approx(1.0 + 1e-13).epsilon(1e-15));
  const std::vector<double> v{1e16, 1.0, -1e16};
  CompensatedSum t;
  for (double x : v) t.add(x);
  CHECK(t.value() == 1.0);
}

TEST_CASE("node cap raises a convergence error") {
  QuadratureOptions opt;
  opt.max_nodes = 100;
  CHECK_THROWS_AS(volume(zoo::make("warped_s2_over_s1").atlas, opt), ConvergenceError);
  opt.max_nodes = 300;
  opt.abs_tol = 1e-300;
  opt.rel_tol = 0;
  CHECK_THROWS_AS(volume(zoo::make("sphere").atlas, opt), ConvergenceError);
}

TEST_CASE("spectral convergence past 32 nodes") {
  const Atlas atlas = zoo::make("ring_torus").atlas;
  const auto one = [](auto, const MetricJet&) { return 1.0; };
  const double a = integrate_at_order(*atlas.front(), one, 32, 1);
  const double b = integrate_at_order(*atlas.front(), one, 64, 1);
  CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("exceptions in workers propagate") {
  const Atlas atlas = zoo::make("sphere").atlas;
  QuadratureOptions opt;
  opt.workers = 4;
  CHECK_THROWS_AS(integrate(atlas, [](auto, const MetricJet&) -> double { throw DomainError("boom"); }, opt),
                  DomainError);
}
