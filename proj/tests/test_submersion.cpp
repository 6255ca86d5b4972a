#include <doctest.h>

#include <cmath>
#include <cstring>
#include <memory>
#include <numbers>
#include <stop_token>
#include <vector>

#include "lk/error.hpp"
#include "lk/fit.hpp"
#include "lk/submersion.hpp"
#include "lk/weyl.hpp"
#include "lk/zoo.hpp"

using namespace lk;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const Chart> chart(Box box, const std::vector<std::vector<std::string>>& upper) {
  return std::make_shared<const Chart>(Chart::from_strings(std::move(box), upper));
}

std::shared_ptr<const SubmersionChart> zoo_submersion(const std::string& name, const zoo::Params& p = {}) {
  return zoo::make(name, p).submersion;
}

// g = dx^2 + dy^2 + (dt + sin x dy)^2 over the flat torus (x, y)
std::shared_ptr<const SubmersionChart> twisted_t3() {
  const Box box{{{0, 2 * kPi}, {0, 2 * kPi}, {0, 2 * kPi}}, {true, true, true}};
  auto total = chart(box, {{"1", "0", "0"}, {"1 + sin(x0)^2", "sin(x0)"}, {"1"}});
  auto base = chart(Box{{{0, 2 * kPi}, {0, 2 * kPi}}, {true, true}}, {{"1", "0"}, {"1"}});
  return std::make_shared<const SubmersionChart>(total, base, BlockSplit{{2}, {0, 1}});
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("submersion chart construction") {
  const auto sc = zoo_submersion("product_s2_s1");
  CHECK(sc->dim() == 3);
  CHECK(sc->fiber_dim() == 2);
  CHECK(sc->base_dim() == 1);
  CHECK(sc->project(std::vector<double>{0.1, 0.2, 0.3}) == std::vector<double>{0.3});

  auto total = chart(Box{{{0, 1}, {0, 1}}, {true, true}}, {{"1", "0"}, {"1"}});
  auto base = chart(Box{{{0, 2}}, {true}}, {{"1"}});
  CHECK_THROWS_AS(SubmersionChart(total, base, BlockSplit{{0}, {1}}), InputError);
  CHECK_THROWS_AS(SubmersionChart(total, base, BlockSplit{{0, 1}, {}}), InputError);

  const char* text = R"({
    "total_chart": {"dim": 2, "domain": [[0, 6.283185307179586], [0, 6.283185307179586]],
                    "periodic": [true, true], "metric": [["1", "0.2"], ["1"]]},
    "base_chart": {"dim": 1, "domain": [[0, 6.283185307179586]], "periodic": [true], "metric": [["0.96"]]},
    "fiber_dims": [0], "base_dims": [1]})";
  const SubmersionChart js = SubmersionChart::from_json_text(text);
  CHECK(js.fiber_dim() == 1);
  CHECK(validate(js, 20).pass);
  CHECK_THROWS_AS(SubmersionChart::from_json_text("{}"), InputError);
}

TEST_CASE("horizontal lift") {
  const auto prod = zoo_submersion("product_s2_s1");
  const HorizontalLift l = horizontal_lift(*prod, std::vector<double>{1.0, 2.0, 3.0});
  CHECK(l.h.cwiseAbs().maxCoeff() == 0);
  CHECK(l.xi(2, 0) == 1);
  CHECK(l.xi(0, 0) == 0);
  CHECK(l.xi(1, 0) == 0);

  const double c = 0.1;
  const auto coupled = zoo_submersion("coupled_t2_over_s1", {{"c", c}});
  const std::vector<double> x{0.4, 1.7};
  const HorizontalLift lc = horizontal_lift(*coupled, x);
  const Eigen::MatrixXd g = coupled->total().metric(x);
  CHECK(lc.h(0, 0) == doctest::Approx(-g(1, 0) / g(0, 0)).epsilon(1e-15));
  CHECK(lc.h(0, 0) == doctest::Approx(-c).epsilon(1e-15));
  CHECK(horizontal_metric(*coupled, x)(0, 0) == doctest::Approx(1 - c * c).epsilon(1e-15));
}

TEST_CASE("validation") {
  for (const std::string& name : zoo::names()) {
    const zoo::Entry e = zoo::make(name);
    if (!e.submersion) continue;
    const ValidationReport v = validate(*e.submersion, 100);
    CHECK_MESSAGE(v.pass, name);
    CHECK(v.samples == 100);
    CHECK(v.isometry_residual <= 1e-12);
    CHECK(v.orthogonality_residual <= 1e-12);
  }
  // base metric off by a factor 1.1
  const auto prod = zoo_submersion("product_s2_s1");
  auto base = chart(prod->base().box(), {{"1.1"}});
  const SubmersionChart bad(prod->total_ptr(), base, prod->split());
  const ValidationReport v = validate(bad, 50);
  CHECK_FALSE(v.pass);
  CHECK(v.isometry_residual == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(validate(*twisted_t3(), 100).pass);
}

TEST_CASE("scaled metric") {
  const auto w = zoo_submersion("warped_s2_over_s1");
  const std::vector<double> x{1.1, 0.3, 2.0};
  const MetricJet one = scale_metric(*w, x, 1.0);
  const MetricJet ref = w->total().metric_jet(x);
  CHECK(one.g == ref.g);
  CHECK(one.dg == ref.dg);
  CHECK(one.ddg == ref.ddg);

  // block diagonal: fiber block eps g_ij, base block g_ab
  const MetricJet s = scale_metric(*w, x, 0.25);
  CHECK(s.g(0, 0) == doctest::Approx(0.25 * ref.g(0, 0)).epsilon(1e-15));
  CHECK(s.g(1, 1) == doctest::Approx(0.25 * ref.g(1, 1)).epsilon(1e-15));
  CHECK(s.g(2, 2) == ref.g(2, 2));
  CHECK(s.dg(2, 0, 0) == doctest::Approx(0.25 * ref.dg(2, 0, 0)).epsilon(1e-14));

  // coupled: mixed eps c, base 1 - (1 - eps) c^2
  const double c = 0.1, eps = 0.3;
  const auto coupled = zoo_submersion("coupled_t2_over_s1", {{"c", c}});
  const std::vector<double> y{0.5, 0.5};
  const MetricJet m = scale_metric(*coupled, y, eps);
  CHECK(m.g(0, 0) == doctest::Approx(eps).epsilon(1e-15));
  CHECK(m.g(0, 1) == doctest::Approx(eps * c).epsilon(1e-15));
  CHECK(m.g(1, 1) == doctest::Approx(1 - (1 - eps) * c * c).epsilon(1e-15));
  const MetricJet naive = scale_metric_naive(*coupled, y, eps);
  CHECK(naive.g(0, 1) == doctest::Approx(eps * c).epsilon(1e-15));
  CHECK(naive.g(1, 1) == 1);
  CHECK_THROWS_AS(scale_metric(*coupled, y, 0.0), InputError);
}

TEST_CASE("scaled metric jets agree with finite differences") {
  const auto t = twisted_t3();
  const std::vector<double> x{0.7, 1.3, 2.1};
  const double eps = 0.2, h = 1e-4;
  const MetricJet m = scale_metric(*t, x, eps);
  for (int p = 0; p < 3; ++p) {
    std::vector<double> a = x, b = x;
    a[p] += h;
    b[p] -= h;
    const Eigen::MatrixXd d = (scale_metric(*t, a, eps).g - scale_metric(*t, b, eps).g) / (2 * h);
    for (int q = 0; q < 3; ++q)
      for (int r = 0; r < 3; ++r) CHECK(m.dg(p, q, r) == doctest::Approx(d(q, r)).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("volume form scaling") {
  for (const std::string& name : zoo::names()) {
    const zoo::Entry e = zoo::make(name);
    if (!e.submersion) continue;
    for (double eps : {0.5, 0.1, 0.01}) {
      const VolumeScalingReport r = volume_scaling_check(*e.submersion, eps, 30);
      CHECK_MESSAGE(r.max_det_deviation <= 1e-10, name);
      CHECK(r.max_form_deviation <= 1e-10);
    }
  }
  CHECK(volume_scaling_check(*twisted_t3(), 0.05, 30).max_det_deviation <= 1e-10);

  // constant metric with a full mixed block
  const auto total = chart(Box{{{0, 1}, {0, 1}, {0, 1}}, {true, true, true}},
                           {{"2", "0.3", "-0.4"}, {"1.5", "0.2"}, {"1.8"}});
  const Eigen::Matrix3d g = total->metric(std::vector<double>{0.5, 0.5, 0.5});
  const double schur = g(2, 2) - g.block<1, 2>(2, 0) * g.block<2, 2>(0, 0).inverse() * g.block<2, 1>(0, 2);
  const auto exact_base = std::make_shared<const Chart>(
      Chart(Box{{{0, 1}}, {true}}, {{Expr::num(schur)}}));
  const SubmersionChart sc(total, exact_base, BlockSplit{{0, 1}, {2}});
  CHECK(validate(sc, 10).isometry_residual <= 1e-12);
  CHECK(volume_scaling_check(sc, 0.01, 10).max_det_deviation <= 1e-10);

  // N = 2 fiber: dvol ratio eps
  const auto prod = std::make_shared<const SubmersionChart>(*zoo_submersion("product_s2_s1"));
  const QuadratureOptions opt;
  const double v = volume({prod->total_ptr()}, opt).value;
  const double v4 = volume({std::make_shared<const ScaledPatch>(prod, 0.25)}, opt).value;
  CHECK(v4 / v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("fiber euler characteristic") {
  const QuadratureOptions opt;
  CHECK(fiber_euler(zoo_submersion("product_s2_s1"), opt) == 2);
  CHECK(fiber_euler(zoo_submersion("warped_s2_over_s1"), opt) == 2);
  CHECK(fiber_euler(zoo_submersion("torus_fiber_bundle"), opt) == 0);
  CHECK(fiber_euler(zoo_submersion("flat_t2_over_s1"), opt) == 0);

  const auto prod = zoo_submersion("product_s2_s1");
  const FiberPatch fiber(prod, {1.0});
  CHECK(fiber.dim() == 2);
  CHECK(volume({std::make_shared<const FiberPatch>(prod, std::vector<double>{1.0})}, opt).value ==
        doctest::Approx(4 * kPi).epsilon(1e-8));
}

TEST_CASE("schedules") {
  const std::vector<double> s = default_schedule();
  REQUIRE(s.size() == 8);
  CHECK(s.front() == 0.25);
  CHECK(s.back() == std::ldexp(1.0, -9));
  CHECK(geometric_schedule(1, 0.1, 3) == std::vector<double>{1, 0.1, 1 * 0.1 * 0.1});
  CHECK_THROWS_AS(geometric_schedule(0, 0.5, 3), InputError);
}

TEST_CASE("product sweep is constant") {
  const QuadratureOptions opt;
  const SweepRecord r = collapse_sweep(zoo_submersion("product_s2_s1"), 1, default_schedule(), opt);
  CHECK(r.complete);
  CHECK(r.fiber_euler == 2);
  CHECK(r.target == doctest::Approx(4 * kPi).epsilon(1e-12));
  for (double v : r.values) CHECK(std::abs(v - 4 * kPi) <= 1e-6);
  CHECK(r.pass());
  for (double eps : {1.0, 0.1, 0.01}) {
    const auto sc = zoo_submersion("product_s2_s1");
    CHECK(intrinsic_volume({std::make_shared<const ScaledPatch>(sc, eps)}, 1, opt).value ==
          doctest::Approx(4 * kPi).epsilon(1e-7));
  }
}

TEST_CASE("warped sweep converges to chi times the base volume") {
  const QuadratureOptions opt;
  const SweepRecord r = collapse_sweep(zoo_submersion("warped_s2_over_s1"), 1, default_schedule(), opt);
  CHECK(std::abs(r.extrapolated - 4 * kPi) <= 1e-3);
  CHECK(r.slope >= 0.9);
  CHECK(r.pass());
  CHECK(r.base_volume_i == doctest::Approx(2 * kPi).epsilon(1e-12));
  // V_1(M(eps)) = 4 pi + 2 pi a^2 eps for this family
  for (std::size_t k = 0; k < r.eps.size(); ++k)
    CHECK(r.values[k] == doctest::Approx(4 * kPi + 2 * kPi * 0.09 * r.eps[k]).epsilon(1e-7));

  const SweepRecord z = collapse_sweep(zoo_submersion("warped_s2_over_s1"), 0, default_schedule(), opt);
  for (double v : z.values) CHECK(v == 0.0);
}

TEST_CASE("flat sweep is zero") {
  const QuadratureOptions opt;
  const SweepRecord r = collapse_sweep(zoo_submersion("flat_t2_over_s1"), 1, default_schedule(), opt);
  for (double v : r.values) CHECK(v == 0.0);
  CHECK(r.target == 0.0);
  CHECK(r.pass());
}

TEST_CASE("sweep input checks and cancellation") {
  const QuadratureOptions opt;
  const auto prod = zoo_submersion("product_s2_s1");
  CHECK_THROWS_AS(collapse_sweep(prod, 1, {0.5, 0.25, 0.125}, opt), InputError);
  CHECK_THROWS_AS(collapse_sweep(prod, 1, {0.5, 0.25, 0.25, 0.1}, opt), InputError);
  CHECK_THROWS_AS(collapse_sweep(prod, 4, default_schedule(), opt), InputError);

  auto base = chart(prod->base().box(), {{"1.1"}});
  const auto bad = std::make_shared<const SubmersionChart>(prod->total_ptr(), base, prod->split());
  CHECK_THROWS_AS(collapse_sweep(bad, 1, default_schedule(), opt), ValidationError);

  std::stop_source stop;
  stop.request_stop();
  const SweepRecord r = collapse_sweep(prod, 1, default_schedule(), opt, stop.get_token());
  CHECK_FALSE(r.complete);
  CHECK(r.values.size() < 8);

  QuadratureOptions tiny;
  tiny.max_nodes = 1024;
  try {
    collapse_sweep(zoo_submersion("warped_s2_over_s1"), 1, default_schedule(), tiny);
    FAIL("no throw");
  } catch (const ConvergenceError& e) {
    CHECK(std::string(e.what()).find("eps") != std::string::npos);
  }
}

TEST_CASE("curvature limits") {
  const std::vector<double> sched = geometric_schedule(0.1, 0.5, 6);
  const CurvatureLimitReport p =
      curvature_limit_check(zoo_submersion("product_s2_s1"), std::vector<double>{1.0, 2.0, 3.0}, sched);
  for (std::size_t k = 0; k < sched.size(); ++k) {
    CHECK(p.base_deviation[k] <= 1e-10);
    CHECK(p.fiber_deviation[k] <= 1e-10);
  }

  const CurvatureLimitReport w =
      curvature_limit_check(zoo_submersion("warped_s2_over_s1"), std::vector<double>{1.0, 2.0, 0.4}, sched);
  CHECK(w.fiber_slope == doctest::Approx(1.0).epsilon(0.2));
  // one-dimensional base: no base curvature components at all
  for (double d : w.base_deviation) CHECK(d == 0.0);

  const CurvatureLimitReport t = curvature_limit_check(twisted_t3(), std::vector<double>{0.7, 1.3, 2.1}, sched);
  CHECK(t.base_deviation.front() > 1e-3);
  CHECK(t.base_slope == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("scaled integrand stays bounded") {
  const std::vector<double> sched = default_schedule();
  for (const char* name : {"warped_s2_over_s1", "torus_fiber_bundle"}) {
    const std::vector<double> sup = scaled_integrand_bounds(*zoo_submersion(name), 2, sched, 50);
    REQUIRE(sup.size() == sched.size());
    CHECK(sup.back() <= 2 * sup[sup.size() / 2]);
  }
}

TEST_CASE("sectional sweeps") {
  const std::vector<double> sched = default_schedule();
  const SectionalSweep s = sectional_sweep(*zoo_submersion("product_s2_s1"), sched, 50);
  CHECK(s.bounded_below);
  for (std::size_t k = 0; k < sched.size(); ++k) CHECK(s.overall_min(k) >= -1e-9);

  const SectionalSweep t = sectional_sweep(*zoo_submersion("torus_fiber_bundle"), sched, 200);
  CHECK_FALSE(t.bounded_below);
  CHECK(t.fiber_limit == doctest::Approx(-1.0).epsilon(0.05));
  for (std::size_t k = 0; k < sched.size(); ++k) CHECK(std::abs(t.min_base_fiber[k]) <= 10);

  const SectionalSweep f = sectional_sweep(*zoo_submersion("flat_t2_over_s1"), sched, 20);
  CHECK(std::isnan(f.min_base_base[0]));
  CHECK(std::isnan(f.min_fiber_fiber[0]));
  CHECK(std::string(plane_class_name(PlaneClass::BaseFiber)) == "base-fiber");
}

TEST_CASE("random points are reproducible and inside the box") {
  const Box b{{{0, 1}, {-2, 2}}, {false, true}};
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::vector<double> x = random_point(b, 9, i);
    CHECK(b.contains(x));
    CHECK(x == random_point(b, 9, i));
  }
  CHECK(random_point(b, 9, 0) != random_point(b, 10, 0));
}

TEST_CASE("naive scaling differs only with a mixed block") {
  const auto w = zoo_submersion("warped_s2_over_s1");
  const std::vector<double> x{1.0, 1.0, 1.0};
  CHECK(scale_metric(*w, x, 0.1).g == scale_metric_naive(*w, x, 0.1).g);
  const auto c = zoo_submersion("coupled_t2_over_s1");
  const std::vector<double> y{1.0, 1.0};
  CHECK_FALSE(same_bits(scale_metric(*c, y, 0.1).g(1, 1), scale_metric_naive(*c, y, 0.1).g(1, 1)));
}
