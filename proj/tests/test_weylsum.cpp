#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "lk/checks.hpp"
#include "lk/error.hpp"
#include "lk/weyl.hpp"
#include "lk/zoo.hpp"

using namespace lk;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const Chart> make_chart(Box box, const std::vector<std::vector<std::string>>& upper,
                                        const std::string& weight = "") {
  return std::make_shared<const Chart>(Chart::from_strings(std::move(box), upper, weight));
}

std::shared_ptr<const Chart> scaled(const Chart& c, double k) {
  std::vector<std::vector<std::string>> upper(c.dim());
  for (int p = 0; p < c.dim(); ++p)
    for (int q = p; q < c.dim(); ++q) upper[p].push_back(std::to_string(k) + "*(" + to_string(c.component(p, q)) + ")");
  return make_chart(c.box(), upper);
}

std::shared_ptr<const Chart> unit_s4() {
  return make_chart(Box{{{0, kPi}, {0, kPi}, {0, kPi}, {0, 2 * kPi}}, {false, false, false, true}},
                    {{"1", "0", "0", "0"},
                     {"sin(x0)^2", "0", "0"},
                     {"sin(x0)^2*sin(x1)^2", "0"},
                     {"sin(x0)^2*sin(x1)^2*sin(x2)^2"}});
}

}  // namespace

TEST_CASE("lk spec") {
  const LkSpec s = LkSpec::make(4, 2);
  CHECK(s.normalization == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-15));
  CHECK(s.table->size() == enumerate_couplings(4, 2).size());
  CHECK_THROWS_AS(LkSpec::make(3, 1), InputError);
  CHECK_THROWS_AS(LkSpec::make(2, 4), InputError);
  CHECK(LkSpec::make(3, 0).normalization == 1.0);
}

TEST_CASE("integrand on flat and round metrics") {
  const Chart flat = Chart::from_strings(Box{{{0, 1}, {0, 1}, {0, 1}, {0, 1}}, {true, true, true, true}},
                                         {{"1", "0", "0", "0"}, {"1", "0", "0"}, {"1", "0"}, {"1"}});
  const CurvatureBundle fb = curvature_bundle(flat.metric_jet(std::vector<double>{0.1, 0.2, 0.3, 0.4}));
  for (int e : {2, 4}) CHECK(lk_integrand(fb, LkSpec::make(4, e)) == 0);
  CHECK(lk_integrand(fb, LkSpec::make(4, 0)) == 1);
  const MetricJet fj = flat.metric_jet(std::vector<double>{0.1, 0.2, 0.3, 0.4});
  CHECK(gb_density_pfaffian(fb, fj.g) == 0);

  const auto s2 = zoo::make("sphere").atlas.front();
  const LkSpec spec = LkSpec::make(2, 2);
  for (double theta : {0.3, 1.2, 2.8}) {
    const MetricJet mj = s2->metric_jet(std::vector<double>{theta, 0.5});
    const CurvatureBundle b = curvature_bundle(mj);
    const double v = spec.normalization * lk_integrand(b, spec);
    CHECK(v == doctest::Approx(1 / (2 * kPi)).epsilon(1e-12));
    CHECK(v == doctest::Approx(gb_density_pfaffian(b, mj.g)).epsilon(1e-9));
  }
}

TEST_CASE("pfaffian oracle on random jets") {
  for (int n : {2, 4}) {
    SplitMix64 rng(500 + n);
    const LkSpec spec = LkSpec::make(n, n);
    for (int k = 0; k < 100; ++k) {
      const MetricJet mj = random_metric_jet(n, rng);
      const CurvatureBundle b = curvature_bundle(mj);
      const double pf = gb_density_pfaffian(b, mj.g);
      CHECK(spec.normalization * lk_integrand(b, spec) == doctest::Approx(pf).epsilon(1e-8));
    }
  }
  SplitMix64 rng(1);
  const MetricJet odd = random_metric_jet(3, rng);
  CHECK_THROWS_AS(gb_density_pfaffian(curvature_bundle(odd), odd.g), InputError);
}

TEST_CASE("intrinsic volumes of the unit sphere") {
  const QuadratureOptions opt;
  const Atlas atlas = zoo::make("sphere").atlas;
  CHECK(intrinsic_volume(atlas, 0, opt).value == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(intrinsic_volume(atlas, 2, opt).value == doctest::Approx(4 * kPi).epsilon(1e-6));
  const QuadratureResult v1 = intrinsic_volume(atlas, 1, opt);
  CHECK(v1.value == 0.0);
  CHECK(v1.nodes == 0);
  CHECK_THROWS_AS(intrinsic_volume(atlas, 3, opt), InputError);
  CHECK_THROWS_AS(intrinsic_volume(Atlas{}, 0, opt), InputError);
}

TEST_CASE("intrinsic volumes of flat tori") {
  const QuadratureOptions opt;
  const Atlas atlas = zoo::make("flat_torus").atlas;
  CHECK(intrinsic_volume(atlas, 2, opt).value == doctest::Approx(4 * kPi * kPi).epsilon(1e-12));
  CHECK(intrinsic_volume(atlas, 0, opt).value == 0.0);
  CHECK(std::abs(intrinsic_volume(zoo::make("ring_torus").atlas, 0, opt).value) < 1e-6);
}

TEST_CASE("two-chart partition of unity on the sphere") {
  // second chart has its polar axis along x; weights 1 - z^2 and z^2
  const Box box{{{0, kPi}, {0, 2 * kPi}}, {false, true}};
  const Atlas atlas{make_chart(box, {{"1", "0"}, {"sin(x0)^2"}}, "sin(x0)^2"),
                    make_chart(box, {{"1", "0"}, {"sin(x0)^2"}}, "(sin(x0)*sin(x1))^2")};
  const QuadratureOptions opt;
  CHECK(volume(atlas, opt).value == doctest::Approx(4 * kPi).epsilon(1e-8));
  CHECK(intrinsic_volume(atlas, 0, opt).value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("four-sphere") {
  QuadratureOptions opt;
  opt.initial_order = 12;
  const Atlas atlas{unit_s4()};
  CHECK(intrinsic_volume(atlas, 4, opt).value == doctest::Approx(8 * kPi * kPi / 3).epsilon(1e-6));
  CHECK(intrinsic_volume(atlas, 2, opt).value == doctest::Approx(8 * kPi).epsilon(1e-6));
  CHECK(intrinsic_volume(atlas, 0, opt).value == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(intrinsic_volume(atlas, 1, opt).value == 0.0);
  CHECK(intrinsic_volume(atlas, 3, opt).value == 0.0);
}

TEST_CASE("scaling the metric by c scales V_i by c^(i/2)") {
  const QuadratureOptions opt;
  const zoo::Entry w = zoo::make("warped_s2_over_s1");
  const auto& base = dynamic_cast<const Chart&>(*w.atlas.front());
  for (double c : {0.25, 4.0}) {
    const Atlas sc{scaled(base, c)};
    for (int i : {1, 3}) {
      const double v = intrinsic_volume(w.atlas, i, opt).value;
      CHECK(intrinsic_volume(sc, i, opt).value == doctest::Approx(std::pow(c, 0.5 * i) * v).epsilon(1e-7));
    }
  }
  const zoo::Entry s = zoo::make("sphere", {{"r", 2.0}});
  CHECK(intrinsic_volume(s.atlas, 2, opt).value == doctest::Approx(16 * kPi).epsilon(1e-8));
  CHECK(intrinsic_volume(s.atlas, 0, opt).value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("warped first intrinsic volume") {
  const QuadratureOptions opt;
  const zoo::Entry w = zoo::make("warped_s2_over_s1", {{"a", 0.3}});
  CHECK(intrinsic_volume(w.atlas, 1, opt).value == doctest::Approx(*w.reference("V1")).epsilon(1e-7));
  CHECK(intrinsic_volume(w.atlas, 0, opt).value == 0.0);
  CHECK(intrinsic_volume(w.atlas, 2, opt).value == 0.0);
}

TEST_CASE("check suites") {
  const QuadratureOptions opt;
  for (const char* name : {"gauss-bonnet", "pfaffian", "symmetries"}) {
    const std::vector<CheckResult> r = run_check(name, opt);
    REQUIRE(r.size() == 1);
    CHECK_MESSAGE(r[0].pass, name);
    CHECK_FALSE(r[0].lines.empty());
  }
  CHECK(check_names().back() == "all");
  CHECK_THROWS_AS(run_check("nope", opt), InputError);
}
