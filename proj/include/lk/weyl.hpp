#pragma once

#include <Eigen/Dense>

#include "lk/couplings.hpp"
#include "lk/curvature.hpp"
#include "lk/quadrature.hpp"

namespace lk {

/// Multiplier on (2 pi)^{-e/2} fixed by requiring V_0(S^2) = 2 with the
/// canonical coupling set.
inline constexpr double kCouplingCalibration = 1.0;

/// Degree-e Lipschitz-Killing integrand on an n-manifold.
struct LkSpec {
  int n = 0;
  int e = 0;
  double normalization = 1.0;  // (2 pi)^{-e/2} * kCouplingCalibration
  const CouplingTable* table = nullptr;

  /// Throws InputError for odd e or e outside [0, n].
  static LkSpec make(int n, int e);
};

/// Canonical coupling sum  sum sgn(p,q) R^{q1q2}_{p1p2} ... R^{q(e-1)qe}_{p(e-1)pe}
/// (without the normalization); 1 for e = 0.
double lk_integrand(const CurvatureBundle& bundle, const LkSpec& spec);

/// Chern-Gauss-Bonnet density (2 pi)^{-n/2} Pf(Omega) computed from the
/// curvature 2-form in a g-orthonormal frame. Test oracle; n must be even.
double gb_density_pfaffian(const CurvatureBundle& bundle, const Eigen::MatrixXd& g);

/// V_i of a closed manifold given by an atlas: exactly 0 when n - i is odd,
/// the Riemannian volume when i = n, otherwise the normalized coupling sum
/// integrated against dvol.
QuadratureResult intrinsic_volume(const Atlas& atlas, int i, const QuadratureOptions& opt);

}  // namespace lk
