#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lk/chart.hpp"
#include "lk/expr.hpp"

namespace lk {

/// Parametrized submanifold of R^L.
struct Embedding {
  Box param;                 // parameter domain; periodic coordinates wrap
  std::vector<Expr> coords;  // X^1 .. X^L in the parameters
  Box bbox;                  // ambient box containing the surface; eps-tubes are
                             // sampled from this box grown by eps on every side
  double reach = std::numeric_limits<double>::infinity();

  int dim() const noexcept { return param.dim(); }
  int ambient_dim() const noexcept { return static_cast<int>(coords.size()); }
  void position(std::span<const double> u, std::span<double> out) const;

  /// `{domain, periodic, coords: ["expr", ...], bbox: [[lo, hi], ...], reach?}`.
  static Embedding from_json_text(std::string_view text);
};

/// Static kd-tree over a dense sample of the surface.
class SurfaceCloud {
 public:
  SurfaceCloud(const Embedding& emb, std::size_t min_points);

  std::size_t size() const noexcept { return params_.size() / static_cast<std::size_t>(n_); }
  /// Every surface point lies within this distance of a cloud point.
  double covering_radius() const noexcept { return rho_; }

  /// Index of the nearest cloud point within sqrt(max_d2) of p, or -1.
  std::ptrdiff_t nearest(std::span<const double> p, double max_d2, double& d2) const;
  /// True if some cloud point lies within sqrt(r2) of p.
  bool any_within(std::span<const double> p, double r2) const;

  std::span<const double> param(std::size_t index) const {
    return {params_.data() + index * n_, static_cast<std::size_t>(n_)};
  }
  std::span<const double> point(std::size_t index) const {
    return {points_.data() + index * l_, static_cast<std::size_t>(l_)};
  }

 private:
  struct Node {
    std::uint32_t lo, hi;  // range in tree order
    int axis;              // -1 for leaves
    std::int32_t left, right;
  };
  std::int32_t build(std::uint32_t lo, std::uint32_t hi);
  double box_distance2(std::int32_t node, std::span<const double> p) const;
  template <bool kAny>
  std::ptrdiff_t search(std::span<const double> p, double& best) const;

  int n_ = 0;
  int l_ = 0;
  std::vector<double> params_;
  std::vector<double> points_;  // reordered to tree order
  std::vector<Node> nodes_;
  std::vector<double> boxes_;  // per node: lo[L], hi[L]
  std::vector<std::uint32_t> order_scratch_;
  double rho_ = 0.0;
};

/// Distance from p to the embedded surface, refined from a parameter guess by
/// damped Newton steps on |X(u) - p|^2.
double refine_distance(const Embedding& emb, std::span<const double> p, std::span<const double> u0);

struct TubeOptions {
  int workers = 1;
  std::size_t cloud_points = 1'000'000;
  std::size_t batch_size = 1u << 16;
};

struct TubeResult {
  double estimate = 0.0;
  double sigma = 0.0;
  double eps = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t hits = 0;
};

/// Monte-Carlo volume of the eps-neighborhood: volume of bbox grown by eps
/// times the fraction of uniform samples within eps of the surface. Batch b draws from
/// SplitMix64::substream(seed, b).
TubeResult tube_volume_mc(const Embedding& emb, double eps, std::uint64_t samples,
                          std::uint64_t seed, const TubeOptions& opt = {});

/// Same as above with a prebuilt cloud (reused across eps values).
TubeResult tube_volume_mc(const Embedding& emb, const SurfaceCloud& cloud, double eps,
                          std::uint64_t samples, std::uint64_t seed, const TubeOptions& opt = {});

/// Volume of the unit j-ball.
double unit_ball_volume(int j);

/// Coefficients c_k of eps^k, k = 0..L, of sum_i kappa_{L-i} V_i eps^{L-i}.
std::vector<double> steiner_coefficients(std::span<const double> v, int ambient_dim);
double steiner_eval(std::span<const double> v, double eps, int ambient_dim);

}  // namespace lk
