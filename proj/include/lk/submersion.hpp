#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <stop_token>
#include <string>
#include <vector>

#include "lk/blocklin.hpp"
#include "lk/chart.hpp"
#include "lk/quadrature.hpp"

namespace lk {

/// A Riemannian submersion given in a product chart: total coordinates split
/// into fiber and base coordinates, projection = restriction to base_dims.
class SubmersionChart {
 public:
  SubmersionChart(std::shared_ptr<const MetricPatch> total, std::shared_ptr<const MetricPatch> base,
                  BlockSplit split);

  /// `{total_chart, base_chart, fiber_dims, base_dims}` with chart objects as
  /// accepted by Chart::from_json_text.
  static SubmersionChart from_json_text(std::string_view text);

  const MetricPatch& total() const noexcept { return *total_; }
  const MetricPatch& base() const noexcept { return *base_; }
  std::shared_ptr<const MetricPatch> total_ptr() const noexcept { return total_; }
  std::shared_ptr<const MetricPatch> base_ptr() const noexcept { return base_; }
  const BlockSplit& split() const noexcept { return split_; }
  int dim() const noexcept { return split_.total_size(); }
  int fiber_dim() const noexcept { return split_.fiber_size(); }
  int base_dim() const noexcept { return split_.base_size(); }

  /// Base coordinates of a total-chart point.
  std::vector<double> project(std::span<const double> x) const;

 private:
  std::shared_ptr<const MetricPatch> total_;
  std::shared_ptr<const MetricPatch> base_;
  BlockSplit split_;
};

/// h^i_a = -g~^{ij} g_{j a}; xi_a = d_a + h^i_a d_i in chart coordinates.
struct HorizontalLift {
  Eigen::MatrixXd h;   // N x b
  Eigen::MatrixXd xi;  // n x b
};

HorizontalLift horizontal_lift(const SubmersionChart& sc, std::span<const double> x);

/// Inner products <xi_a, xi_b>_g at x, the metric the base should carry.
Eigen::MatrixXd horizontal_metric(const SubmersionChart& sc, std::span<const double> x);

struct ValidationReport {
  double isometry_residual = 0.0;      // max |<xi_a, xi_b> - g^_ab(pi(x))|
  double orthogonality_residual = 0.0; // max |<xi_a, d_i>|
  int samples = 0;
  bool pass = false;                   // isometry_residual <= kValidationTol
};

inline constexpr double kValidationTol = 1e-8;

ValidationReport validate(const SubmersionChart& sc, int samples, std::uint64_t seed = 1);

/// Jets of g(eps): eps g on vertical vectors, g on their g-orthogonal
/// complement. At eps = 1 the jets of g are returned unchanged.
JetMatrix scaled_metric_jets(const SubmersionChart& sc, std::span<const double> x, double eps);
MetricJet scale_metric(const SubmersionChart& sc, std::span<const double> x, double eps);
/// Literal block scaling: fiber and mixed blocks times eps, base block kept.
MetricJet scale_metric_naive(const SubmersionChart& sc, std::span<const double> x, double eps);

/// The total chart carrying g(eps), usable wherever an atlas is expected.
class ScaledPatch final : public MetricPatch {
 public:
  ScaledPatch(std::shared_ptr<const SubmersionChart> sc, double eps, bool naive = false);

  const Box& box() const override { return sc_->total().box(); }
  JetMatrix metric_jets(std::span<const double> x) const override;
  double weight(std::span<const double> x) const override { return sc_->total().weight(x); }

 private:
  std::shared_ptr<const SubmersionChart> sc_;
  double eps_;
  bool naive_;
};

/// The fiber through a fixed base point with its induced metric.
class FiberPatch final : public MetricPatch {
 public:
  FiberPatch(std::shared_ptr<const SubmersionChart> sc, std::vector<double> base_point);

  const Box& box() const override { return box_; }
  JetMatrix metric_jets(std::span<const double> y) const override;

 private:
  std::vector<double> embed(std::span<const double> y) const;

  std::shared_ptr<const SubmersionChart> sc_;
  std::vector<double> base_point_;
  Box box_;
};

struct VolumeScalingReport {
  double max_det_deviation = 0.0;   // max |det g(eps) / (eps^N det g) - 1|
  double max_form_deviation = 0.0;  // max |sqrt(det g(eps) / det g) / eps^{N/2} - 1|
};

VolumeScalingReport volume_scaling_check(const SubmersionChart& sc, double eps, int samples,
                                         std::uint64_t seed = 1);

/// Gauss-Bonnet integral over the fiber through the center of the base box,
/// rounded. Odd fiber dimension returns 0 without integrating. Throws
/// ConvergenceError if the integral is more than 0.1 from an integer.
int fiber_euler(std::shared_ptr<const SubmersionChart> sc, const QuadratureOptions& opt);

struct SweepRecord {
  int i = 0;
  std::vector<double> eps;
  std::vector<double> values;
  std::vector<double> errors;  // quadrature error estimates
  double extrapolated = 0.0;
  double target = 0.0;
  double slope = 0.0;  // NaN when the residuals vanish identically
  int fiber_euler = 0;
  double base_volume_i = 0.0;
  bool complete = true;  // false if cancelled before the last eps

  double abs_error() const;
  /// |extrapolated - target| <= max(1e-3, 1e-2 |target|).
  bool pass() const;
};

/// eps_k = first * ratio^k, k = 0..count-1.
std::vector<double> geometric_schedule(double first, double ratio, int count);
/// Default sweep schedule 2^-2 .. 2^-9.
std::vector<double> default_schedule();

/// V_i(M(eps)) over a strictly decreasing schedule with a first-order
/// Richardson limit and target chi(Z) V_i(B). Refuses submersions that fail
/// validate(). Stops between eps values when `stop` is requested.
SweepRecord collapse_sweep(std::shared_ptr<const SubmersionChart> sc, int i,
                           const std::vector<double>& schedule, const QuadratureOptions& opt,
                           std::stop_token stop = {});

struct CurvatureLimitReport {
  std::vector<double> eps;
  std::vector<double> base_deviation;   // max |R^{ab}_{cd}(eps) - R^^{ab}_{cd}|
  std::vector<double> fiber_deviation;  // max |eps R^{mn}_{kl}(eps) - R~^{mn}_{kl}|
  double base_slope = 0.0;
  double fiber_slope = 0.0;
};

CurvatureLimitReport curvature_limit_check(std::shared_ptr<const SubmersionChart> sc,
                                           std::span<const double> x,
                                           const std::vector<double>& schedule);

/// sup over random points of |eps^{N/2} (2 pi)^{-e/2} lk_integrand(g(eps))| per eps.
std::vector<double> scaled_integrand_bounds(const SubmersionChart& sc, int e,
                                            const std::vector<double>& schedule, int samples,
                                            std::uint64_t seed = 1);

enum class PlaneClass { BaseBase, BaseFiber, FiberFiber };
const char* plane_class_name(PlaneClass c);

struct SectionalSweep {
  std::vector<double> eps;
  // min K over sampled points and coordinate planes of each class; NaN if the
  // class is empty.
  std::vector<double> min_base_base;
  std::vector<double> min_base_fiber;
  std::vector<double> min_fiber_fiber;
  double fiber_limit = 0.0;  // Richardson limit of eps * min_fiber_fiber
  bool bounded_below = false;

  double overall_min(std::size_t k) const;
};

SectionalSweep sectional_sweep(const SubmersionChart& sc, const std::vector<double>& schedule,
                               int samples, std::uint64_t seed = 1);

/// Uniform random point in the open chart box.
std::vector<double> random_point(const Box& box, std::uint64_t seed, std::uint64_t index);

}  // namespace lk
