#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lk/expr.hpp"
#include "lk/jet.hpp"
#include "lk/tensor.hpp"

namespace lk {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi - lo; }
};

/// Coordinate box of a chart. A periodic coordinate has period hi - lo.
struct Box {
  std::vector<Interval> bounds;
  std::vector<bool> periodic;

  int dim() const noexcept { return static_cast<int>(bounds.size()); }
  double measure() const;
  bool contains(std::span<const double> x) const;
  Box restricted(std::span<const int> dims) const;
};

/// Symmetric matrix of jets, indexed by chart coordinates.
class JetMatrix {
 public:
  JetMatrix() = default;
  explicit JetMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n * n)) {}
  int dim() const noexcept { return n_; }
  Jet2d& operator()(int i, int j) noexcept { return data_[i * n_ + j]; }
  const Jet2d& operator()(int i, int j) const noexcept { return data_[i * n_ + j]; }
  Eigen::MatrixXd values() const;

 private:
  int n_ = 0;
  std::vector<Jet2d> data_;
};

/// Metric with exact first and second partial derivatives at a point.
/// dg(p, q, r) = d_p g_qr and ddg(p, q, r, s) = d_p d_q g_rs.
struct MetricJet {
  Eigen::MatrixXd g;
  Tensor3d dg;
  Tensor4d ddg;

  int dim() const noexcept { return static_cast<int>(g.rows()); }
};

/// Assembles a MetricJet from the upper triangle of `m`, mirroring entries so
/// the symmetry invariants hold bit-for-bit. Throws NumericError if g is not
/// positive definite.
MetricJet to_metric_jet(const JetMatrix& m);

/// Restriction of a metric jet to a coordinate subset (the induced metric on
/// the slice where the other coordinates are held fixed).
MetricJet restrict_metric_jet(const MetricJet& mj, std::span<const int> dims);

/// A coordinate patch carrying a metric: the unit of integration.
class MetricPatch {
 public:
  virtual ~MetricPatch() = default;

  virtual const Box& box() const = 0;
  int dim() const { return box().dim(); }

  virtual JetMatrix metric_jets(std::span<const double> x) const = 0;
  virtual MetricJet metric_jet(std::span<const double> x) const;
  virtual Eigen::MatrixXd metric(std::span<const double> x) const;
  /// Partition-of-unity factor.
  virtual double weight(std::span<const double>) const { return 1.0; }
};

using Atlas = std::vector<std::shared_ptr<const MetricPatch>>;

/// Chart given by DSL expressions for the upper triangle of g and an optional weight.
class Chart final : public MetricPatch {
 public:
  Chart(Box box, std::vector<std::vector<Expr>> upper, std::optional<Expr> weight = std::nullopt);

  /// Parses `{dim, domain, periodic, metric, weight?}`; `metric` rows hold
  /// the upper triangle (row p has dim - p entries).
  static Chart from_json_text(std::string_view text);

  /// Convenience for code-built charts: upper-triangle rows of DSL strings.
  static Chart from_strings(Box box, const std::vector<std::vector<std::string>>& upper,
                            const std::string& weight = "");

  const Box& box() const override { return box_; }
  const Expr& component(int p, int q) const;
  const std::optional<Expr>& weight_expr() const noexcept { return weight_; }

  JetMatrix metric_jets(std::span<const double> x) const override;
  Eigen::MatrixXd metric(std::span<const double> x) const override;
  double weight(std::span<const double> x) const override;

  std::string to_json_text() const;

 private:
  Box box_;
  std::vector<std::vector<Expr>> upper_;
  std::optional<Expr> weight_;
};

}  // namespace lk
