#pragma once

#include <Eigen/Dense>

#include "lk/chart.hpp"
#include "lk/tensor.hpp"

namespace lk {

// Convention constants. The curvature formula is evaluated as written
// (2 R_pqrs = second derivatives + 2 Gamma Gamma) and scaled by
// kRiemannCalibration; sectional curvature is kSectionalCalibration * 2 R_pqpq
// over the Gram determinant. Both are pinned by the anchors: unit sphere
// K = +1, V_0(S^2) = 2, V_2(S^2) = 4 pi.
inline constexpr double kRiemannCalibration = 1.0;
inline constexpr double kSectionalCalibration = 0.5;

struct Christoffel {
  Tensor3d lower;  // Gamma_{pqr}, symmetric in (q, r)
  Tensor3d upper;  // Gamma^t_{pq}
};

struct CurvatureBundle {
  Eigen::MatrixXd g_inv;
  Tensor3d gamma_lower;
  Tensor3d gamma_upper;
  Tensor4d riemann_lower;  // R_{pqrs}
  Tensor4d riemann_mixed;  // R^{pq}_{rs} = g^{pa} g^{qb} R_{abrs}

  int dim() const noexcept { return static_cast<int>(g_inv.rows()); }
};

Christoffel christoffel(const MetricJet& mj);
Christoffel christoffel(const MetricJet& mj, const Eigen::MatrixXd& g_inv);

Tensor4d riemann(const MetricJet& mj);
Tensor4d riemann(const MetricJet& mj, const Christoffel& gamma);

Tensor4d raise_indices(const Tensor4d& riemann_lower, const Eigen::MatrixXd& g_inv);

CurvatureBundle curvature_bundle(const MetricJet& mj);

/// Sectional curvature of the coordinate plane (p, q).
double sectional(const CurvatureBundle& bundle, const Eigen::MatrixXd& g, int p, int q);

struct SymmetryReport {
  double antisymmetry_first = 0.0;   // R_pqrs + R_qprs
  double antisymmetry_second = 0.0;  // R_pqrs + R_pqsr
  double pair_symmetry = 0.0;        // R_pqrs - R_rspq
  double bianchi = 0.0;              // R_pqrs + R_prsq + R_psqr
  double scale = 0.0;                // max |R_pqrs|

  double max_violation() const noexcept;
  /// max_violation relative to scale (0 for the zero tensor).
  double relative() const noexcept;
};

SymmetryReport symmetry_report(const Tensor4d& riemann_lower);

}  // namespace lk
