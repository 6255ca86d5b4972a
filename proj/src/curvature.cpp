#include "lk/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "lk/blocklin.hpp"
#include "lk/error.hpp"

namespace lk {

Christoffel christoffel(const MetricJet& mj) { return christoffel(mj, invert(mj.g)); }

Christoffel christoffel(const MetricJet& mj, const Eigen::MatrixXd& g_inv) {
  const int n = mj.dim();
  Christoffel c{Tensor3d(n), Tensor3d(n)};
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = q; r < n; ++r) {
        const double v = 0.5 * (mj.dg(r, p, q) + mj.dg(q, p, r) - mj.dg(p, q, r));
        c.lower(p, q, r) = c.lower(p, r, q) = v;
      }
  for (int t = 0; t < n; ++t)
    for (int p = 0; p < n; ++p)
      for (int q = p; q < n; ++q) {
        double v = 0.0;
        for (int s = 0; s < n; ++s) v += g_inv(t, s) * c.lower(s, p, q);
        c.upper(t, p, q) = c.upper(t, q, p) = v;
      }
  return c;
}

Tensor4d riemann(const MetricJet& mj) { return riemann(mj, christoffel(mj)); }

Tensor4d riemann(const MetricJet& mj, const Christoffel& gamma) {
  const int n = mj.dim();
  Tensor4d r(n);
  const double half = 0.5 * kRiemannCalibration;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int a = 0; a < n; ++a)
        for (int s = 0; s < n; ++s) {
          // a plays the role of r in 2R_pqrs = d_q d_r g_ps + d_p d_s g_qr
          //   - d_q d_s g_pr - d_p d_r g_qs + 2(G_tqr G^t_ps - G_tqs G^t_pr)
          const double second = mj.ddg(q, a, p, s) + mj.ddg(p, s, q, a) - mj.ddg(q, s, p, a) -
                                mj.ddg(p, a, q, s);
          double gg = 0.0;
          for (int t = 0; t < n; ++t)
            gg += gamma.lower(t, q, a) * gamma.upper(t, p, s) -
                  gamma.lower(t, q, s) * gamma.upper(t, p, a);
          r(p, q, a, s) = half * (second + 2.0 * gg);
        }
  return r;
}

Tensor4d raise_indices(const Tensor4d& lower, const Eigen::MatrixXd& g_inv) {
  const int n = lower.dim();
  // first contraction on the second slot, then on the first
  Tensor4d half(n);
  for (int a = 0; a < n; ++a)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          double v = 0.0;
          for (int b = 0; b < n; ++b) v += g_inv(q, b) * lower(a, b, r, s);
          half(a, q, r, s) = v;
        }
  Tensor4d mixed(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          double v = 0.0;
          for (int a = 0; a < n; ++a) v += g_inv(p, a) * half(a, q, r, s);
          mixed(p, q, r, s) = v;
        }
  return mixed;
}

CurvatureBundle curvature_bundle(const MetricJet& mj) {
  CurvatureBundle b;
  b.g_inv = invert(mj.g);
  Christoffel c = christoffel(mj, b.g_inv);
  b.riemann_lower = riemann(mj, c);
  b.riemann_mixed = raise_indices(b.riemann_lower, b.g_inv);
  b.gamma_lower = std::move(c.lower);
  b.gamma_upper = std::move(c.upper);
  return b;
}

double sectional(const CurvatureBundle& bundle, const Eigen::MatrixXd& g, int p, int q) {
  if (p == q) throw InputError("sectional curvature needs two distinct coordinates");
  const double den = g(p, p) * g(q, q) - g(p, q) * g(p, q);
  if (!(den > 0.0)) throw NumericError("degenerate coordinate plane");
  return kSectionalCalibration * 2.0 * bundle.riemann_lower(p, q, p, q) / den;
}

double SymmetryReport::max_violation() const noexcept {
  return std::max({antisymmetry_first, antisymmetry_second, pair_symmetry, bianchi});
}

double SymmetryReport::relative() const noexcept {
  return scale > 0.0 ? max_violation() / scale : max_violation();
}

SymmetryReport symmetry_report(const Tensor4d& r) {
  const int n = r.dim();
  SymmetryReport rep;
  rep.scale = r.max_abs();
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int a = 0; a < n; ++a)
        for (int s = 0; s < n; ++s) {
          const double v = r(p, q, a, s);
          rep.antisymmetry_first = std::max(rep.antisymmetry_first, std::abs(v + r(q, p, a, s)));
          rep.antisymmetry_second = std::max(rep.antisymmetry_second, std::abs(v + r(p, q, s, a)));
          rep.pair_symmetry = std::max(rep.pair_symmetry, std::abs(v - r(a, s, p, q)));
          rep.bianchi = std::max(rep.bianchi, std::abs(v + r(p, a, s, q) + r(p, s, q, a)));
        }
  return rep;
}

}  // namespace lk
