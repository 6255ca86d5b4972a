#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lk/chart.hpp"

namespace lk {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Open Gauss-Legendre rule of order m on [a, b] (endpoints never sampled).
QuadratureRule gauss_legendre(int m, double a, double b);
/// m-point trapezoid rule for a periodic coordinate on [a, b).
QuadratureRule trapezoid(int m, double a, double b);

/// Tensor-product grid over a chart box: Gauss-Legendre on open coordinates,
/// trapezoid on periodic ones, `order` points per coordinate.
class QuadratureGrid {
 public:
  QuadratureGrid(const Box& box, int order);

  std::size_t size() const noexcept { return size_; }
  int dim() const noexcept { return static_cast<int>(rules_.size()); }
  /// Writes node `index` into `x` and returns its weight.
  double node(std::size_t index, std::span<double> x) const;
  double weight_sum() const;

 private:
  std::vector<QuadratureRule> rules_;
  std::size_t size_ = 1;
};

struct QuadratureOptions {
  int workers = 1;
  std::size_t max_nodes = std::size_t{1} << 21;  // per chart
  int initial_order = 8;
  double abs_tol = 1e-8;
  double rel_tol = 1e-7;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // |change at the last grid doubling|
  std::size_t nodes = 0;        // nodes used at the accepted level, all charts
};

/// Scalar field evaluated at a chart point with the metric jet there.
using Integrand = std::function<double(std::span<const double> x, const MetricJet& mj)>;

/// Sum over charts of sum over nodes of w * weight(x) * f(x) * sqrt(det g(x)).
double integrate_at_order(const MetricPatch& patch, const Integrand& f, int order, int workers);

/// Doubles every chart's grid until the change is within
/// max(abs_tol, rel_tol * |value|). Throws ConvergenceError at the node cap.
QuadratureResult integrate(const Atlas& atlas, const Integrand& f, const QuadratureOptions& opt);

/// Riemannian volume of an atlas.
QuadratureResult volume(const Atlas& atlas, const QuadratureOptions& opt);

}  // namespace lk
