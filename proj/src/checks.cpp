#include "lk/checks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lk/blocklin.hpp"
#include "lk/curvature.hpp"
#include "lk/error.hpp"
#include "lk/fit.hpp"
#include "lk/submersion.hpp"
#include "lk/weyl.hpp"
#include "lk/zoo.hpp"

namespace lk {

namespace {

double symmetric_uniform(SplitMix64& rng) { return 2.0 * rng.uniform() - 1.0; }

Eigen::MatrixXd random_matrix(int rows, int cols, SplitMix64& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = symmetric_uniform(rng);
  return m;
}

template <typename... Args>
std::string line(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

CheckResult gauss_bonnet(const QuadratureOptions& opt) {
  CheckResult r{"gauss-bonnet", true, {}};
  struct Case {
    const char* name;
    zoo::Params params;
    double chi;
  };
  const Case cases[] = {{"sphere", {{"r", 0.5}}, 2}, {"sphere", {{"r", 1.0}}, 2}, {"sphere", {{"r", 2.0}}, 2},
                        {"flat_torus", {}, 0},         {"ring_torus", {}, 0}};
  for (const Case& c : cases) {
    const zoo::Entry e = zoo::make(c.name, c.params);
    const double v0 = intrinsic_volume(e.atlas, 0, opt).value;
    const bool ok = std::abs(v0 - c.chi) <= 1e-6;
    r.pass = r.pass && ok;
    const double rr = c.params.count("r") ? c.params.at("r") : 0.0;
    r.lines.push_back(line("%s %s r=%.9g V0=%.9g chi=%.9g", ok ? "ok  " : "FAIL", c.name, rr, v0, c.chi));
  }
  return r;
}

CheckResult pfaffian(const QuadratureOptions&) {
  CheckResult r{"pfaffian", true, {}};
  for (int n : {2, 4}) {
    SplitMix64 rng(1000 + n);
    const LkSpec spec = LkSpec::make(n, n);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const MetricJet mj = random_metric_jet(n, rng);
      const CurvatureBundle b = curvature_bundle(mj);
      const double lk = spec.normalization * lk_integrand(b, spec);
      const double pf = gb_density_pfaffian(b, mj.g);
      worst = std::max(worst, std::abs(lk - pf) / std::max(std::abs(pf), 1e-300));
    }
    const bool ok = worst <= 1e-8;
    r.pass = r.pass && ok;
    r.lines.push_back(line("%s n=%d max relative mismatch %.3g over 100 jets", ok ? "ok  " : "FAIL", n, worst));
  }
  return r;
}

CheckResult symmetries(const QuadratureOptions&) {
  CheckResult r{"symmetries", true, {}};
  for (int n = 2; n <= 4; ++n) {
    SplitMix64 rng(2000 + n);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k)
      worst = std::max(worst, symmetry_report(riemann(random_metric_jet(n, rng))).relative());
    const bool ok = worst <= 1e-9;
    r.pass = r.pass && ok;
    r.lines.push_back(line("%s n=%d max relative violation %.3g over 200 jets", ok ? "ok  " : "FAIL", n, worst));
  }
  return r;
}

CheckResult block_inverse(const QuadratureOptions&) {
  const BlockHarnessReport h = block_inverse_harness(100, 7);
  CheckResult r{"block-inverse", h.pass, {}};
  r.lines.push_back(line("%s %d matrices: upper-left slope >= %.3f, off-diagonal slope >= %.3f, "
                         "lower-right slope in [%.3f, %.3f], dense mismatch %.3g",
                         h.pass ? "ok  " : "FAIL", h.matrices, h.min_upper_left_slope,
                         h.min_off_diagonal_slope, h.min_lower_right_slope, h.max_lower_right_slope,
                         h.max_dense_mismatch));
  return r;
}

CheckResult volume_form(const QuadratureOptions&) {
  CheckResult r{"volume-form", true, {}};
  for (const std::string& name : zoo::names()) {
    const zoo::Entry e = zoo::make(name);
    if (!e.submersion) continue;
    double worst = 0.0;
    for (double eps : {0.5, 0.1, 0.01})
      worst = std::max(worst, volume_scaling_check(*e.submersion, eps, 50).max_det_deviation);
    const bool ok = worst <= 1e-10;
    r.pass = r.pass && ok;
    r.lines.push_back(line("%s %s max |det g(eps) / (eps^N det g) - 1| = %.3g", ok ? "ok  " : "FAIL",
                           name.c_str(), worst));
  }
  return r;
}

CheckResult validate_zoo(const QuadratureOptions& opt) {
  CheckResult r{"validate-zoo", true, {}};
  for (const std::string& name : zoo::names()) {
    const zoo::Entry e = zoo::make(name);
    if (e.submersion) {
      const ValidationReport v = validate(*e.submersion, 100);
      const bool ok = v.isometry_residual <= 1e-10 && v.orthogonality_residual <= 1e-10;
      r.pass = r.pass && ok;
      r.lines.push_back(line("%s %s submersion residual %.3g, orthogonality %.3g", ok ? "ok  " : "FAIL",
                             name.c_str(), v.isometry_residual, v.orthogonality_residual));
    }
    if (const auto vol = e.reference("volume")) {
      const double q = volume(e.atlas, opt).value;
      const bool ok = std::abs(q - *vol) <= 1e-8 * std::abs(*vol);
      r.pass = r.pass && ok;
      r.lines.push_back(line("%s %s volume %.12g reference %.12g", ok ? "ok  " : "FAIL", name.c_str(), q, *vol));
    }
  }
  return r;
}

using Suite = CheckResult (*)(const QuadratureOptions&);

const std::vector<std::pair<std::string, Suite>>& suites() {
  static const std::vector<std::pair<std::string, Suite>> s = {
      {"gauss-bonnet", gauss_bonnet}, {"pfaffian", pfaffian},       {"symmetries", symmetries},
      {"block-inverse", block_inverse}, {"volume-form", volume_form}, {"validate-zoo", validate_zoo},
  };
  return s;
}

}  // namespace

MetricJet random_metric_jet(int n, SplitMix64& rng) {
  MetricJet mj;
  const Eigen::MatrixXd m = random_matrix(n, n, rng);
  mj.g = m * m.transpose() + 0.5 * n * Eigen::MatrixXd::Identity(n, n);
  mj.dg = Tensor3d(n);
  mj.ddg = Tensor4d(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int s = q; s < n; ++s) mj.dg(p, q, s) = mj.dg(p, s, q) = symmetric_uniform(rng);
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q)
      for (int s = 0; s < n; ++s)
        for (int t = s; t < n; ++t) {
          const double v = symmetric_uniform(rng);
          mj.ddg(p, q, s, t) = mj.ddg(q, p, s, t) = mj.ddg(p, q, t, s) = mj.ddg(q, p, t, s) = v;
        }
  return mj;
}

BlockHarnessReport block_inverse_harness(int count, std::uint64_t seed) {
  BlockHarnessReport rep;
  rep.matrices = count;
  rep.min_upper_left_slope = rep.min_off_diagonal_slope = rep.min_lower_right_slope =
      std::numeric_limits<double>::infinity();
  rep.max_lower_right_slope = -std::numeric_limits<double>::infinity();
  const std::vector<double> grid = geometric_schedule(0.125, 0.5, 8);
  bool finite = true;
  for (int k = 0; k < count; ++k) {
    SplitMix64 rng = SplitMix64::substream(seed, k);
    const int na = 1 + static_cast<int>(rng.next() % 3);
    const int nd = 1 + static_cast<int>(rng.next() % 3);
    const Eigen::MatrixXd a = random_matrix(na, na, rng) + (na + 1.0) * Eigen::MatrixXd::Identity(na, na);
    const Eigen::MatrixXd d = random_matrix(nd, nd, rng) + (nd + 1.0) * Eigen::MatrixXd::Identity(nd, nd);
    const Eigen::MatrixXd b = random_matrix(na, nd, rng);
    const Eigen::MatrixXd c = random_matrix(nd, na, rng);
    std::vector<double> ul, off, lr;
    for (double eps : grid) {
      const BlockInverse bi = lemma_block_inverse(a, b, c, d, eps);
      const Eigen::MatrixXd dense = scaled_block_matrix(a, b, c, d, eps).inverse();
      rep.max_dense_mismatch = std::max(
          rep.max_dense_mismatch, (bi.inverse - dense).cwiseAbs().maxCoeff() / dense.cwiseAbs().maxCoeff());
      ul.push_back((bi.upper_left() - bi.leading_upper_left).cwiseAbs().maxCoeff());
      off.push_back(std::max(bi.upper_right().cwiseAbs().maxCoeff(), bi.lower_left().cwiseAbs().maxCoeff()));
      lr.push_back((bi.lower_right() - bi.leading_lower_right).cwiseAbs().maxCoeff());
    }
    const double s_ul = loglog_slope(grid, ul);
    const double s_off = loglog_slope(grid, off);
    const double s_lr = loglog_slope(grid, lr);
    finite = finite && std::isfinite(s_ul) && std::isfinite(s_off) && std::isfinite(s_lr);
    rep.min_upper_left_slope = std::min(rep.min_upper_left_slope, s_ul);
    rep.min_off_diagonal_slope = std::min(rep.min_off_diagonal_slope, s_off);
    rep.min_lower_right_slope = std::min(rep.min_lower_right_slope, s_lr);
    rep.max_lower_right_slope = std::max(rep.max_lower_right_slope, s_lr);
  }
  rep.pass = finite && rep.min_upper_left_slope >= -0.15 && rep.min_off_diagonal_slope >= -0.15 &&
             rep.min_lower_right_slope >= 0.85 && rep.max_lower_right_slope <= 1.15 &&
             rep.max_dense_mismatch <= 1e-9;
  return rep;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> n = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : suites()) v.push_back(name);
    v.push_back("all");
    return v;
  }();
  return n;
}

std::vector<CheckResult> run_check(const std::string& name, const QuadratureOptions& opt) {
  std::vector<CheckResult> out;
  for (const auto& [n, fn] : suites())
    if (name == "all" || name == n) out.push_back(fn(opt));
  if (out.empty()) throw InputError("unknown check suite '" + name + "'");
  return out;
}

}  // namespace lk
