#include "lk/submersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "json_io.hpp"
#include "lk/curvature.hpp"
#include "lk/error.hpp"
#include "lk/fit.hpp"
#include "lk/rng.hpp"
#include "lk/weyl.hpp"

namespace lk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Gauss-Jordan inverse of a small symmetric positive definite jet matrix
// (row-major, m x m). Pivots are positive, so no pivoting is needed.
template <typename Scalar>
std::vector<Jet2<Scalar>> invert_spd(std::vector<Jet2<Scalar>> a, int m, int vars) {
  std::vector<Jet2<Scalar>> inv(static_cast<std::size_t>(m * m), Jet2<Scalar>::constant(vars, 0));
  for (int k = 0; k < m; ++k) inv[k * m + k] = Jet2<Scalar>::constant(vars, 1);
  for (int k = 0; k < m; ++k) {
    if (!(a[k * m + k].value() > 0)) throw NumericError("fiber block is not positive definite");
    const Jet2<Scalar> r = reciprocal(a[k * m + k]);
    for (int j = 0; j < m; ++j) {
      a[k * m + j] = a[k * m + j] * r;
      inv[k * m + j] = inv[k * m + j] * r;
    }
    for (int row = 0; row < m; ++row) {
      if (row == k) continue;
      const Jet2<Scalar> f = a[row * m + k];
      for (int j = 0; j < m; ++j) {
        a[row * m + j] -= f * a[k * m + j];
        inv[row * m + j] -= f * inv[k * m + j];
      }
    }
  }
  return inv;
}

void check_eps(double eps) {
  if (!(eps > 0.0)) throw InputError("eps must be positive");
}

void check_point(const Box& box, std::span<const double> x) {
  if (static_cast<int>(x.size()) != box.dim()) throw InputError("point has the wrong dimension");
}

// Fiber, mixed and base blocks of g.
struct Blocks {
  Eigen::MatrixXd fiber;  // g_ij
  Eigen::MatrixXd mixed;  // g_ia
  Eigen::MatrixXd base;   // g_ab
};

Blocks split_blocks(const Eigen::MatrixXd& g, const BlockSplit& s) {
  const int nf = s.fiber_size(), nb = s.base_size();
  Blocks b{Eigen::MatrixXd(nf, nf), Eigen::MatrixXd(nf, nb), Eigen::MatrixXd(nb, nb)};
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nf; ++j) b.fiber(i, j) = g(s.fiber_dims[i], s.fiber_dims[j]);
    for (int a = 0; a < nb; ++a) b.mixed(i, a) = g(s.fiber_dims[i], s.base_dims[a]);
  }
  for (int a = 0; a < nb; ++a)
    for (int c = 0; c < nb; ++c) b.base(a, c) = g(s.base_dims[a], s.base_dims[c]);
  return b;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Treats deviations below this floor as exact zeros when fitting slopes.
constexpr double kZeroFloor = 1e-13;

double fitted_slope(const std::vector<double>& eps, std::vector<double> dev) {
  for (double& d : dev)
    if (d < kZeroFloor) d = 0.0;
  return loglog_slope(eps, dev);
}

}  // namespace

SubmersionChart::SubmersionChart(std::shared_ptr<const MetricPatch> total,
                                 std::shared_ptr<const MetricPatch> base, BlockSplit split)
    : total_(std::move(total)), base_(std::move(base)), split_(std::move(split)) {
  if (!total_ || !base_) throw InputError("submersion charts must be non-null");
  split_.validate(total_->dim());
  if (base_->dim() != split_.base_size())
    throw InputError("base chart dimension does not match base_dims");
  const Box& tb = total_->box();
  const Box& bb = base_->box();
  for (int a = 0; a < split_.base_size(); ++a) {
    const int d = split_.base_dims[a];
    if (std::abs(tb.bounds[d].lo - bb.bounds[a].lo) > 1e-12 ||
        std::abs(tb.bounds[d].hi - bb.bounds[a].hi) > 1e-12 || tb.periodic[d] != bb.periodic[a])
      throw InputError("base chart domain does not match the projected total domain");
  }
}

SubmersionChart SubmersionChart::from_json_text(std::string_view text) {
  const nlohmann::json j = detail::parse_json_text(text);
  try {
    auto total = std::make_shared<const Chart>(detail::chart_from_json(j.at("total_chart")));
    auto base = std::make_shared<const Chart>(detail::chart_from_json(j.at("base_chart")));
    BlockSplit split{j.at("fiber_dims").get<std::vector<int>>(),
                     j.at("base_dims").get<std::vector<int>>()};
    return SubmersionChart(std::move(total), std::move(base), std::move(split));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("submersion JSON: ") + e.what());
  }
}

std::vector<double> SubmersionChart::project(std::span<const double> x) const {
  std::vector<double> y;
  y.reserve(split_.base_dims.size());
  for (int d : split_.base_dims) y.push_back(x[d]);
  return y;
}

HorizontalLift horizontal_lift(const SubmersionChart& sc, std::span<const double> x) {
  check_point(sc.total().box(), x);
  const BlockSplit& s = sc.split();
  const Blocks b = split_blocks(sc.total().metric(x), s);
  HorizontalLift lift;
  lift.h = -invert(b.fiber) * b.mixed;
  lift.xi = Eigen::MatrixXd::Zero(sc.dim(), s.base_size());
  for (int a = 0; a < s.base_size(); ++a) {
    lift.xi(s.base_dims[a], a) = 1.0;
    for (int i = 0; i < s.fiber_size(); ++i) lift.xi(s.fiber_dims[i], a) = lift.h(i, a);
  }
  return lift;
}

Eigen::MatrixXd horizontal_metric(const SubmersionChart& sc, std::span<const double> x) {
  const HorizontalLift lift = horizontal_lift(sc, x);
  return lift.xi.transpose() * sc.total().metric(x) * lift.xi;
}

std::vector<double> random_point(const Box& box, std::uint64_t seed, std::uint64_t index) {
  SplitMix64 rng = SplitMix64::substream(seed, index);
  std::vector<double> x(static_cast<std::size_t>(box.dim()));
  for (int d = 0; d < box.dim(); ++d)
    x[d] = box.bounds[d].lo + box.bounds[d].length() * rng.uniform_open();
  return x;
}

ValidationReport validate(const SubmersionChart& sc, int samples, std::uint64_t seed) {
  ValidationReport r;
  r.samples = samples;
  const BlockSplit& s = sc.split();
  for (int k = 0; k < samples; ++k) {
    const std::vector<double> x = random_point(sc.total().box(), seed, k);
    const Eigen::MatrixXd g = sc.total().metric(x);
    const HorizontalLift lift = horizontal_lift(sc, x);
    const Eigen::MatrixXd gxi = g * lift.xi;
    for (int i = 0; i < s.fiber_size(); ++i)
      r.orthogonality_residual =
          std::max(r.orthogonality_residual, gxi.row(s.fiber_dims[i]).cwiseAbs().maxCoeff());
    const Eigen::MatrixXd hor = lift.xi.transpose() * gxi;
    const std::vector<double> y = sc.project(x);
    r.isometry_residual = std::max(r.isometry_residual, max_abs(hor - sc.base().metric(y)));
  }
  r.pass = r.isometry_residual <= kValidationTol;
  return r;
}

JetMatrix scaled_metric_jets(const SubmersionChart& sc, std::span<const double> x, double eps) {
  check_eps(eps);
  check_point(sc.total().box(), x);
  JetMatrix g = sc.total().metric_jets(x);
  if (eps == 1.0) return g;
  const BlockSplit& s = sc.split();
  const int n = sc.dim(), nf = s.fiber_size(), nb = s.base_size();
  std::vector<Jet2d> fiber(static_cast<std::size_t>(nf * nf));
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j) fiber[i * nf + j] = g(s.fiber_dims[i], s.fiber_dims[j]);
  const std::vector<Jet2d> finv = invert_spd(std::move(fiber), nf, n);
  // t = g~^{-1} g_{fiber, base}
  std::vector<Jet2d> t(static_cast<std::size_t>(nf * nb), Jet2d::constant(n, 0.0));
  for (int i = 0; i < nf; ++i)
    for (int a = 0; a < nb; ++a)
      for (int j = 0; j < nf; ++j) t[i * nb + a] += finv[i * nf + j] * g(s.fiber_dims[j], s.base_dims[a]);
  JetMatrix out(n);
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nf; ++j) {
      const int p = s.fiber_dims[i], q = s.fiber_dims[j];
      out(p, q) = g(p, q) * eps;
    }
    for (int a = 0; a < nb; ++a) {
      const int p = s.fiber_dims[i], q = s.base_dims[a];
      out(p, q) = g(p, q) * eps;
      out(q, p) = out(p, q);
    }
  }
  for (int a = 0; a < nb; ++a)
    for (int c = a; c < nb; ++c) {
      const int p = s.base_dims[a], q = s.base_dims[c];
      Jet2d corr = Jet2d::constant(n, 0.0);
      for (int i = 0; i < nf; ++i) corr += g(p, s.fiber_dims[i]) * t[i * nb + c];
      out(p, q) = g(p, q) - corr * (1.0 - eps);
      out(q, p) = out(p, q);
    }
  return out;
}

MetricJet scale_metric(const SubmersionChart& sc, std::span<const double> x, double eps) {
  return to_metric_jet(scaled_metric_jets(sc, x, eps));
}

MetricJet scale_metric_naive(const SubmersionChart& sc, std::span<const double> x, double eps) {
  check_eps(eps);
  check_point(sc.total().box(), x);
  JetMatrix g = sc.total().metric_jets(x);
  const BlockSplit& s = sc.split();
  for (int p : s.fiber_dims)
    for (int q = 0; q < sc.dim(); ++q) {
      g(p, q) *= eps;
      if (std::find(s.fiber_dims.begin(), s.fiber_dims.end(), q) == s.fiber_dims.end()) g(q, p) *= eps;
    }
  return to_metric_jet(g);
}

ScaledPatch::ScaledPatch(std::shared_ptr<const SubmersionChart> sc, double eps, bool naive)
    : sc_(std::move(sc)), eps_(eps), naive_(naive) {
  check_eps(eps_);
}

JetMatrix ScaledPatch::metric_jets(std::span<const double> x) const {
  if (!naive_) return scaled_metric_jets(*sc_, x, eps_);
  JetMatrix g = sc_->total().metric_jets(x);
  const BlockSplit& s = sc_->split();
  std::vector<bool> vertical(static_cast<std::size_t>(sc_->dim()), false);
  for (int p : s.fiber_dims) vertical[p] = true;
  for (int p = 0; p < sc_->dim(); ++p)
    for (int q = 0; q < sc_->dim(); ++q)
      if (vertical[p] || vertical[q]) g(p, q) *= eps_;
  return g;
}

FiberPatch::FiberPatch(std::shared_ptr<const SubmersionChart> sc, std::vector<double> base_point)
    : sc_(std::move(sc)), base_point_(std::move(base_point)) {
  if (static_cast<int>(base_point_.size()) != sc_->base_dim())
    throw InputError("base point has the wrong dimension");
  box_ = sc_->total().box().restricted(sc_->split().fiber_dims);
}

std::vector<double> FiberPatch::embed(std::span<const double> y) const {
  const BlockSplit& s = sc_->split();
  std::vector<double> x(static_cast<std::size_t>(sc_->dim()));
  for (int i = 0; i < s.fiber_size(); ++i) x[s.fiber_dims[i]] = y[i];
  for (int a = 0; a < s.base_size(); ++a) x[s.base_dims[a]] = base_point_[a];
  return x;
}

JetMatrix FiberPatch::metric_jets(std::span<const double> y) const {
  check_point(box_, y);
  const std::vector<double> x = embed(y);
  const JetMatrix g = sc_->total().metric_jets(x);
  const BlockSplit& s = sc_->split();
  const int nf = s.fiber_size();
  JetMatrix out(nf);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j) out(i, j) = restrict_jet(g(s.fiber_dims[i], s.fiber_dims[j]), s.fiber_dims);
  return out;
}

VolumeScalingReport volume_scaling_check(const SubmersionChart& sc, double eps, int samples,
                                         std::uint64_t seed) {
  check_eps(eps);
  VolumeScalingReport r;
  const int nf = sc.fiber_dim();
  const double det_scale = std::pow(eps, nf);
  const double form_scale = std::pow(eps, 0.5 * nf);
  for (int k = 0; k < samples; ++k) {
    const std::vector<double> x = random_point(sc.total().box(), seed, k);
    const double d0 = det(sc.total().metric(x));
    const double de = det(scaled_metric_jets(sc, x, eps).values());
    r.max_det_deviation = std::max(r.max_det_deviation, std::abs(de / (det_scale * d0) - 1.0));
    r.max_form_deviation =
        std::max(r.max_form_deviation, std::abs(std::sqrt(de / d0) / form_scale - 1.0));
  }
  return r;
}

namespace {

std::vector<double> base_center(const SubmersionChart& sc) {
  const Box& b = sc.base().box();
  std::vector<double> y(static_cast<std::size_t>(b.dim()));
  for (int a = 0; a < b.dim(); ++a) y[a] = 0.5 * (b.bounds[a].lo + b.bounds[a].hi);
  return y;
}

}  // namespace

int fiber_euler(std::shared_ptr<const SubmersionChart> sc, const QuadratureOptions& opt) {
  if (sc->fiber_dim() % 2 != 0) return 0;
  const std::vector<double> y = base_center(*sc);
  const Atlas atlas{std::make_shared<const FiberPatch>(sc, y)};
  const double chi = intrinsic_volume(atlas, 0, opt).value;
  const double rounded = std::round(chi);
  if (std::abs(chi - rounded) > 0.1) {
    std::ostringstream os;
    os << "fiber Gauss-Bonnet integral " << chi << " is not close to an integer";
    throw ConvergenceError(os.str());
  }
  return static_cast<int>(rounded);
}

double SweepRecord::abs_error() const { return std::abs(extrapolated - target); }

bool SweepRecord::pass() const {
  return std::isfinite(extrapolated) && abs_error() <= std::max(1e-3, 1e-2 * std::abs(target));
}

std::vector<double> geometric_schedule(double first, double ratio, int count) {
  if (!(first > 0.0) || !(ratio > 0.0) || count < 1)
    throw InputError("geometric schedule needs first > 0, ratio > 0, count >= 1");
  std::vector<double> s(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) s[k] = first * std::pow(ratio, k);
  return s;
}

std::vector<double> default_schedule() { return geometric_schedule(0.25, 0.5, 8); }

namespace {

void check_schedule(const std::vector<double>& schedule, std::size_t min_points) {
  if (schedule.size() < min_points) {
    std::ostringstream os;
    os << "eps schedule needs at least " << min_points << " points";
    throw InputError(os.str());
  }
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    check_eps(schedule[k]);
    if (k > 0 && !(schedule[k] < schedule[k - 1]))
      throw InputError("eps schedule must be strictly decreasing");
  }
}

}  // namespace

SweepRecord collapse_sweep(std::shared_ptr<const SubmersionChart> sc, int i,
                           const std::vector<double>& schedule, const QuadratureOptions& opt,
                           std::stop_token stop) {
  check_schedule(schedule, 4);
  const int n = sc->dim();
  if (i < 0 || i > n) throw InputError("intrinsic volume index must satisfy 0 <= i <= n");
  const ValidationReport v = validate(*sc, 64);
  if (!v.pass) {
    std::ostringstream os;
    os << "not a Riemannian submersion: isometry residual " << v.isometry_residual;
    throw ValidationError(os.str());
  }
  SweepRecord rec;
  rec.i = i;
  rec.fiber_euler = fiber_euler(sc, opt);
  if (i <= sc->base_dim()) rec.base_volume_i = intrinsic_volume(Atlas{sc->base_ptr()}, i, opt).value;
  rec.target = rec.fiber_euler * rec.base_volume_i;
  for (double eps : schedule) {
    if (stop.stop_requested()) {
      rec.complete = false;
      break;
    }
    const Atlas atlas{std::make_shared<const ScaledPatch>(sc, eps)};
    QuadratureResult q;
    try {
      q = intrinsic_volume(atlas, i, opt);
    } catch (const ConvergenceError& e) {
      std::ostringstream os;
      os.precision(9);
      os << "precision lost at eps=" << eps << ": " << e.what();
      throw ConvergenceError(os.str());
    }
    rec.eps.push_back(eps);
    rec.values.push_back(q.value);
    rec.errors.push_back(q.error_estimate);
  }
  if (rec.values.empty()) {
    rec.extrapolated = kNaN;
    rec.slope = kNaN;
    return rec;
  }
  rec.extrapolated = richardson_limit(rec.eps, rec.values);
  std::vector<double> residual(rec.values.size());
  const double floor = 1e-9 * (1.0 + std::abs(rec.extrapolated));
  for (std::size_t k = 0; k < residual.size(); ++k) {
    const double r = std::abs(rec.values[k] - rec.extrapolated);
    residual[k] = r > floor ? r : 0.0;
  }
  rec.slope = loglog_slope(rec.eps, residual);
  return rec;
}

CurvatureLimitReport curvature_limit_check(std::shared_ptr<const SubmersionChart> sc,
                                           std::span<const double> x,
                                           const std::vector<double>& schedule) {
  check_schedule(schedule, 2);
  check_point(sc->total().box(), x);
  const BlockSplit& s = sc->split();
  const int nf = s.fiber_size(), nb = s.base_size();
  const std::vector<double> y = sc->project(x);
  const CurvatureBundle base = curvature_bundle(sc->base().metric_jet(y));
  std::vector<double> fiber_coords;
  for (int d : s.fiber_dims) fiber_coords.push_back(x[d]);
  const FiberPatch fiber_patch(sc, y);
  const CurvatureBundle fiber = curvature_bundle(fiber_patch.metric_jet(fiber_coords));

  CurvatureLimitReport r;
  r.eps = schedule;
  for (double eps : schedule) {
    const CurvatureBundle b = curvature_bundle(scale_metric(*sc, x, eps));
    const Tensor4d& rm = b.riemann_mixed;
    double dev_base = 0.0, dev_fiber = 0.0;
    for (int a = 0; a < nb; ++a)
      for (int c = 0; c < nb; ++c)
        for (int d = 0; d < nb; ++d)
          for (int e = 0; e < nb; ++e)
            dev_base = std::max(dev_base, std::abs(rm(s.base_dims[a], s.base_dims[c], s.base_dims[d],
                                                      s.base_dims[e]) -
                                                   base.riemann_mixed(a, c, d, e)));
    for (int m = 0; m < nf; ++m)
      for (int q = 0; q < nf; ++q)
        for (int k = 0; k < nf; ++k)
          for (int l = 0; l < nf; ++l)
            dev_fiber = std::max(
                dev_fiber, std::abs(eps * rm(s.fiber_dims[m], s.fiber_dims[q], s.fiber_dims[k],
                                             s.fiber_dims[l]) -
                                    fiber.riemann_mixed(m, q, k, l)));
    r.base_deviation.push_back(dev_base);
    r.fiber_deviation.push_back(dev_fiber);
  }
  r.base_slope = fitted_slope(r.eps, r.base_deviation);
  r.fiber_slope = fitted_slope(r.eps, r.fiber_deviation);
  return r;
}

std::vector<double> scaled_integrand_bounds(const SubmersionChart& sc, int e,
                                            const std::vector<double>& schedule, int samples,
                                            std::uint64_t seed) {
  check_schedule(schedule, 1);
  const LkSpec spec = LkSpec::make(sc.dim(), e);
  const int nf = sc.fiber_dim();
  std::vector<double> sup;
  for (double eps : schedule) {
    const double scale = std::pow(eps, 0.5 * nf) * spec.normalization;
    double m = 0.0;
    for (int k = 0; k < samples; ++k) {
      const std::vector<double> x = random_point(sc.total().box(), seed, k);
      m = std::max(m, std::abs(scale * lk_integrand(curvature_bundle(scale_metric(sc, x, eps)), spec)));
    }
    sup.push_back(m);
  }
  return sup;
}

const char* plane_class_name(PlaneClass c) {
  switch (c) {
    case PlaneClass::BaseBase: return "base-base";
    case PlaneClass::BaseFiber: return "base-fiber";
    case PlaneClass::FiberFiber: return "fiber-fiber";
  }
  return "?";
}

double SectionalSweep::overall_min(std::size_t k) const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : {min_base_base[k], min_base_fiber[k], min_fiber_fiber[k]})
    if (!std::isnan(v)) m = std::min(m, v);
  return m;
}

SectionalSweep sectional_sweep(const SubmersionChart& sc, const std::vector<double>& schedule,
                               int samples, std::uint64_t seed) {
  check_schedule(schedule, 2);
  const int n = sc.dim();
  std::vector<bool> vertical(static_cast<std::size_t>(n), false);
  for (int p : sc.split().fiber_dims) vertical[p] = true;
  std::vector<std::vector<double>> points;
  for (int k = 0; k < samples; ++k) points.push_back(random_point(sc.total().box(), seed, k));

  SectionalSweep r;
  r.eps = schedule;
  for (double eps : schedule) {
    double mins[3] = {kNaN, kNaN, kNaN};
    for (const auto& x : points) {
      const MetricJet mj = scale_metric(sc, x, eps);
      const CurvatureBundle b = curvature_bundle(mj);
      for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
          const int cls = static_cast<int>(vertical[p]) + static_cast<int>(vertical[q]);
          const double k = sectional(b, mj.g, p, q);
          if (std::isnan(mins[cls]) || k < mins[cls]) mins[cls] = k;
        }
    }
    r.min_base_base.push_back(mins[0]);
    r.min_base_fiber.push_back(mins[1]);
    r.min_fiber_fiber.push_back(mins[2]);
  }
  if (std::isnan(r.min_fiber_fiber.front())) {
    r.fiber_limit = kNaN;
  } else {
    std::vector<double> scaled(schedule.size());
    for (std::size_t k = 0; k < schedule.size(); ++k) scaled[k] = schedule[k] * r.min_fiber_fiber[k];
    r.fiber_limit = richardson_limit(schedule, scaled);
  }
  const double m_last = r.overall_min(schedule.size() - 1);
  const double m_mid = r.overall_min(schedule.size() / 2);
  const bool no_trend = m_last >= m_mid - 0.1 * (1.0 + std::abs(m_mid));
  const bool fiber_ok = std::isnan(r.fiber_limit) || r.fiber_limit >= -1e-6;
  r.bounded_below = no_trend && fiber_ok;
  return r;
}

}  // namespace lk
