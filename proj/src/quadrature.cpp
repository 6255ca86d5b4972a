#include "lk/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "lk/error.hpp"
#include "lk/summation.hpp"

namespace lk {

QuadratureRule gauss_legendre(int m, double a, double b) {
  if (m < 1) throw InputError("quadrature order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (m == 1) p0 = 1.0;
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[m - 1 - i] = mid + half * x;
    rule.weights[i] = rule.weights[m - 1 - i] = half * w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = mid;
  return rule;
}

QuadratureRule trapezoid(int m, double a, double b) {
  if (m < 1) throw InputError("quadrature order must be positive");
  QuadratureRule rule;
  const double h = (b - a) / m;
  for (int k = 0; k < m; ++k) {
    rule.nodes.push_back(a + k * h);
    rule.weights.push_back(h);
  }
  return rule;
}

QuadratureGrid::QuadratureGrid(const Box& box, int order) {
  for (int d = 0; d < box.dim(); ++d) {
    const auto& iv = box.bounds[d];
    rules_.push_back(box.periodic[d] ? trapezoid(order, iv.lo, iv.hi)
                                     : gauss_legendre(order, iv.lo, iv.hi));
    size_ *= static_cast<std::size_t>(order);
  }
}

double QuadratureGrid::node(std::size_t index, std::span<double> x) const {
  double w = 1.0;
  for (int d = dim() - 1; d >= 0; --d) {
    const auto& r = rules_[d];
    const std::size_t k = index % r.nodes.size();
    index /= r.nodes.size();
    x[d] = r.nodes[k];
    w *= r.weights[k];
  }
  return w;
}

double QuadratureGrid::weight_sum() const {
  double s = 1.0;
  for (const auto& r : rules_) {
    CompensatedSum c;
    for (double w : r.weights) c.add(w);
    s *= c.value();
  }
  return s;
}

double integrate_at_order(const MetricPatch& patch, const Integrand& f, int order, int workers) {
  const QuadratureGrid grid(patch.box(), order);
  const int n = patch.dim();
  return deterministic_sum(grid.size(), workers, [&](std::size_t i) {
    std::array<double, kMaxDim> buf{};
    std::span<double> x(buf.data(), n);
    const double w = grid.node(i, x);
    const double weight = patch.weight(x);
    if (weight == 0.0) return 0.0;
    const MetricJet mj = patch.metric_jet(x);
    const Eigen::LLT<Eigen::MatrixXd> llt(mj.g);
    double sqrt_det = 1.0;
    for (int d = 0; d < n; ++d) sqrt_det *= llt.matrixLLT()(d, d);
    if (!(sqrt_det > 0.0)) throw NumericError("non-positive metric determinant at a quadrature node");
    return w * weight * f(x, mj) * sqrt_det;
  });
}

QuadratureResult integrate(const Atlas& atlas, const Integrand& f, const QuadratureOptions& opt) {
  QuadratureResult total;
  for (const auto& patch : atlas) {
    const int n = patch->dim();
    int order = opt.initial_order;
    auto nodes_at = [n](int m) {
      double s = 1.0;
      for (int d = 0; d < n; ++d) s *= m;
      return s;
    };
    if (nodes_at(order) > static_cast<double>(opt.max_nodes))
      throw ConvergenceError("initial quadrature grid exceeds the node cap");
    double prev = integrate_at_order(*patch, f, order, opt.workers);
    for (;;) {
      const int next = order * 2;
      if (nodes_at(next) > static_cast<double>(opt.max_nodes))
        throw ConvergenceError("quadrature did not converge within " +
                               std::to_string(opt.max_nodes) + " nodes per chart");
      const double cur = integrate_at_order(*patch, f, next, opt.workers);
      const double delta = std::abs(cur - prev);
      order = next;
      if (delta <= std::max(opt.abs_tol, opt.rel_tol * std::abs(cur))) {
        total.value += cur;
        total.error_estimate += delta;
        total.nodes += static_cast<std::size_t>(nodes_at(order));
        break;
      }
      prev = cur;
    }
  }
  return total;
}

QuadratureResult volume(const Atlas& atlas, const QuadratureOptions& opt) {
  return integrate(atlas, [](std::span<const double>, const MetricJet&) { return 1.0; }, opt);
}

}  // namespace lk
