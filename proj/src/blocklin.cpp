#include "lk/blocklin.hpp"

#include <algorithm>
#include <cmath>

#include "lk/error.hpp"

namespace lk {
namespace {

// Symmetric diagonal equilibration S m S with S = diag(|m_ii|^-1/2): coordinate
// rescalings do not count as ill-conditioning.
Eigen::VectorXd equilibration(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw NumericError("matrix must be square and nonempty");
  Eigen::VectorXd s(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double d = std::abs(m(i, i));
    if (!(d > 0.0) || !std::isfinite(d)) throw NumericError("matrix is singular or ill-conditioned");
    s(i) = 1.0 / std::sqrt(d);
  }
  return s;
}

Eigen::LDLT<Eigen::MatrixXd> checked_ldlt(const Eigen::MatrixXd& scaled) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
  if (ldlt.info() != Eigen::Success) throw NumericError("LDL^T factorization failed");
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  const double rc = ldlt.rcond();
  if (!(d.minCoeff() * kMaxCondition >= d.maxCoeff()) || !(rc * kMaxCondition >= 1.0))
    throw NumericError("matrix is singular or ill-conditioned");
  return ldlt;
}

Eigen::MatrixXd general_inverse(const Eigen::MatrixXd& m, const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  if (!(lu.rcond() * kMaxCondition >= 1.0))
    throw NumericError(std::string(what) + " is singular or ill-conditioned");
  return lu.inverse();
}

}  // namespace

Eigen::MatrixXd invert(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd s = equilibration(m);
  const auto ldlt = checked_ldlt(s.asDiagonal() * m * s.asDiagonal());
  Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  inv = s.asDiagonal() * inv * s.asDiagonal();
  return 0.5 * (inv + inv.transpose());
}

double det(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw NumericError("determinant of a non-square matrix");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) throw NumericError("LDL^T factorization failed");
  const Eigen::VectorXd d = ldlt.vectorD();
  double prod = 1.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) prod *= d(i);
  return prod;
}

void BlockSplit::validate(int n) const {
  if (fiber_dims.empty() || base_dims.empty())
    throw InputError("fiber and base coordinate lists must both be nonempty");
  if (total_size() != n) throw InputError("fiber and base coordinates must cover the chart");
  std::vector<int> all(fiber_dims);
  all.insert(all.end(), base_dims.begin(), base_dims.end());
  std::sort(all.begin(), all.end());
  for (int i = 0; i < n; ++i)
    if (all[i] != i) throw InputError("fiber and base coordinates must partition 0..n-1");
}

Eigen::MatrixXd scaled_block_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                    const Eigen::MatrixXd& c, const Eigen::MatrixXd& d, double eps) {
  const Eigen::Index k = a.rows();
  const Eigen::Index m = d.rows();
  if (a.cols() != k || d.cols() != m || b.rows() != k || b.cols() != m || c.rows() != m ||
      c.cols() != k)
    throw InputError("block shapes are inconsistent");
  Eigen::MatrixXd g(k + m, k + m);
  g.topLeftCorner(k, k) = eps * a;
  g.topRightCorner(k, m) = eps * b;
  g.bottomLeftCorner(m, k) = eps * c;
  g.bottomRightCorner(m, m) = d;
  return g;
}

BlockInverse lemma_block_inverse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                 const Eigen::MatrixXd& c, const Eigen::MatrixXd& d, double eps) {
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  scaled_block_matrix(a, b, c, d, eps);  // shape check
  const Eigen::Index k = a.rows();
  const Eigen::Index m = d.rows();
  const Eigen::MatrixXd a_inv = general_inverse(a, "A");
  const Eigen::MatrixXd d_inv = general_inverse(d, "D");
  const Eigen::MatrixXd x = a_inv * b;
  const Eigen::MatrixXd y = d_inv * c;
  const Eigen::MatrixXd s =
      general_inverse(Eigen::MatrixXd::Identity(k, k) - eps * x * y, "I - eps X Y");

  // [[eps I, eps X], [eps Y, I]]^-1 = [[S/eps, -S X], [-Y S, I + eps Y S X]]
  BlockInverse out;
  out.inverse.resize(k + m, k + m);
  out.inverse.topLeftCorner(k, k) = (s / eps) * a_inv;
  out.inverse.topRightCorner(k, m) = -s * x * d_inv;
  out.inverse.bottomLeftCorner(m, k) = -y * s * a_inv;
  out.inverse.bottomRightCorner(m, m) =
      (Eigen::MatrixXd::Identity(m, m) + eps * y * s * x) * d_inv;
  out.leading_upper_left = a_inv / eps;
  out.leading_lower_right = d_inv;
  return out;
}

Eigen::MatrixXd BlockInverse::upper_left() const {
  const int k = upper_size();
  return inverse.topLeftCorner(k, k);
}
Eigen::MatrixXd BlockInverse::upper_right() const {
  const int k = upper_size();
  return inverse.topRightCorner(k, inverse.cols() - k);
}
Eigen::MatrixXd BlockInverse::lower_left() const {
  const int k = upper_size();
  return inverse.bottomLeftCorner(inverse.rows() - k, k);
}
Eigen::MatrixXd BlockInverse::lower_right() const {
  const int k = upper_size();
  return inverse.bottomRightCorner(inverse.rows() - k, inverse.cols() - k);
}

}  // namespace lk
