#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lk {

/// Reciprocal-condition threshold below which matrices are treated as singular.
inline constexpr double kMaxCondition = 1e12;

/// Inverse of a symmetric matrix via pivoted LDL^T. Throws NumericError when
/// the condition estimate exceeds kMaxCondition.
Eigen::MatrixXd invert(const Eigen::MatrixXd& m);

/// Determinant of a symmetric matrix (pivoted LDL^T).
double det(const Eigen::MatrixXd& m);

/// Partition of chart coordinates into fiber (vertical) and base coordinates.
struct BlockSplit {
  std::vector<int> fiber_dims;
  std::vector<int> base_dims;

  int fiber_size() const noexcept { return static_cast<int>(fiber_dims.size()); }
  int base_size() const noexcept { return static_cast<int>(base_dims.size()); }
  int total_size() const noexcept { return fiber_size() + base_size(); }
  /// Throws InputError unless the two lists partition 0..n-1 with both nonempty.
  void validate(int n) const;
};

/// [[eps A, eps B], [eps C, D]].
Eigen::MatrixXd scaled_block_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                    const Eigen::MatrixXd& c, const Eigen::MatrixXd& d, double eps);

struct BlockInverse {
  Eigen::MatrixXd inverse;               // exact inverse of the scaled block matrix
  Eigen::MatrixXd leading_upper_left;    // eps^-1 A^-1
  Eigen::MatrixXd leading_lower_right;   // D^-1

  int upper_size() const noexcept { return static_cast<int>(leading_upper_left.rows()); }
  Eigen::MatrixXd upper_left() const;
  Eigen::MatrixXd upper_right() const;
  Eigen::MatrixXd lower_left() const;
  Eigen::MatrixXd lower_right() const;
};

/// Inverse of [[eps A, eps B], [eps C, D]] through the factorization
/// diag(A, D) [[eps I, eps X], [eps Y, I]] with X = A^-1 B, Y = D^-1 C,
/// together with the leading terms of its block expansion as eps -> 0.
BlockInverse lemma_block_inverse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                 const Eigen::MatrixXd& c, const Eigen::MatrixXd& d, double eps);

}  // namespace lk
