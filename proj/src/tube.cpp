#include "lk/tube.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "json_io.hpp"
#include "lk/error.hpp"
#include "lk/rng.hpp"
#include "lk/summation.hpp"

namespace lk {

void Embedding::position(std::span<const double> u, std::span<double> out) const {
  for (std::size_t k = 0; k < coords.size(); ++k) out[k] = evaluate(coords[k], u);
}

Embedding Embedding::from_json_text(std::string_view text) {
  const nlohmann::json j = detail::parse_json_text(text);
  try {
    Embedding e;
    const int n = static_cast<int>(j.at("domain").size());
    if (n < 1 || n > kMaxDim) throw InputError("embedding parameter dimension out of range");
    e.param = detail::box_from_json(j, n);
    for (const auto& s : j.at("coords")) e.coords.push_back(parse_expr(s.get<std::string>(), n));
    const int l = e.ambient_dim();
    if (l < n) throw InputError("ambient dimension must be at least the parameter dimension");
    nlohmann::json bj;
    bj["domain"] = j.at("bbox");
    e.bbox = detail::box_from_json(bj, l);
    if (j.contains("reach")) e.reach = j.at("reach").get<double>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("malformed embedding: ") + ex.what());
  }
}

namespace {

// Node coordinates along one parameter: cell midpoints on open intervals,
// left endpoints on periodic ones. Either way every parameter value lies
// within half a step of a node.
std::vector<double> axis_nodes(const Interval& iv, bool periodic, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  const double h = iv.length() / count;
  for (int k = 0; k < count; ++k) v[k] = iv.lo + (periodic ? k : k + 0.5) * h;
  return v;
}

// Calls fn(u) for every node of the tensor grid, last axis fastest.
template <typename Fn>
void for_grid(const std::vector<std::vector<double>>& axes, Fn&& fn) {
  const int n = static_cast<int>(axes.size());
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> u(static_cast<std::size_t>(n));
  for (;;) {
    for (int d = 0; d < n; ++d) u[d] = axes[d][idx[d]];
    fn(std::span<const double>(u));
    int d = n - 1;
    while (d >= 0 && ++idx[d] == axes[d].size()) idx[d--] = 0;
    if (d < 0) return;
  }
}

constexpr int kLeafSize = 16;
constexpr int kProbeNodes = 256;     // per axis, for speed bounds
constexpr double kCoverSafety = 1.1;

}  // namespace

SurfaceCloud::SurfaceCloud(const Embedding& emb, std::size_t min_points)
    : n_(emb.dim()), l_(emb.ambient_dim()) {
  if (n_ < 1 || l_ < n_) throw InputError("invalid embedding dimensions");
  // Bound |dX/du_d| on a probe grid and reject degenerate Jacobians.
  const int probe = n_ <= 2 ? kProbeNodes : 32;
  std::vector<std::vector<double>> axes;
  for (int d = 0; d < n_; ++d) axes.push_back(axis_nodes(emb.param.bounds[d], emb.param.periodic[d], probe));
  std::vector<double> speed(static_cast<std::size_t>(n_), 0.0);
  std::vector<double> gram_dets;
  Eigen::MatrixXd jac(l_, n_);
  for_grid(axes, [&](std::span<const double> u) {
    for (int k = 0; k < l_; ++k) {
      const Jet2d x = eval_jet2(emb.coords[k], u);
      for (int d = 0; d < n_; ++d) jac(k, d) = x.grad(d);
    }
    for (int d = 0; d < n_; ++d) speed[d] = std::max(speed[d], jac.col(d).norm());
    gram_dets.push_back((jac.transpose() * jac).determinant());
  });
  double scale = 1.0;
  for (int d = 0; d < n_; ++d) {
    if (!(speed[d] > 0.0)) throw DomainError("degenerate Jacobian: coordinate map is constant");
    scale *= speed[d] * speed[d];
  }
  for (double g : gram_dets)
    if (!(g > 1e-12 * scale)) throw DomainError("degenerate Jacobian detected on the embedding");

  // Nodes per axis proportional to arc-length extent.
  std::vector<double> extent(static_cast<std::size_t>(n_));
  double prod = 1.0;
  for (int d = 0; d < n_; ++d) prod *= (extent[d] = speed[d] * emb.param.bounds[d].length());
  const double s = std::pow(static_cast<double>(min_points) / prod, 1.0 / n_);
  axes.clear();
  rho_ = 0.0;
  for (int d = 0; d < n_; ++d) {
    const int count = std::max(2, static_cast<int>(std::ceil(extent[d] * s)));
    axes.push_back(axis_nodes(emb.param.bounds[d], emb.param.periodic[d], count));
    rho_ += 0.5 * speed[d] * emb.param.bounds[d].length() / count;
  }
  rho_ *= kCoverSafety;

  std::vector<double> pos(static_cast<std::size_t>(l_));
  std::vector<double> params, points;
  for_grid(axes, [&](std::span<const double> u) {
    emb.position(u, pos);
    params.insert(params.end(), u.begin(), u.end());
    points.insert(points.end(), pos.begin(), pos.end());
  });
  const std::size_t count = params.size() / n_;
  if (count >= std::numeric_limits<std::uint32_t>::max()) throw InputError("surface cloud too large");

  // Build over an index permutation, then store points in tree order.
  std::vector<std::uint32_t> order(count);
  std::iota(order.begin(), order.end(), 0u);
  params_.swap(params);
  points_.swap(points);
  order_scratch_ = std::move(order);
  build(0, static_cast<std::uint32_t>(count));
  std::vector<double> p2(params_.size()), x2(points_.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::copy_n(params_.begin() + order_scratch_[i] * n_, n_, p2.begin() + i * n_);
    std::copy_n(points_.begin() + order_scratch_[i] * l_, l_, x2.begin() + i * l_);
  }
  params_.swap(p2);
  points_.swap(x2);
  order_scratch_.clear();
  order_scratch_.shrink_to_fit();
}

std::int32_t SurfaceCloud::build(std::uint32_t lo, std::uint32_t hi) {
  const auto idx = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{lo, hi, -1, -1, -1});
  boxes_.resize(boxes_.size() + 2 * l_);
  double* blo = boxes_.data() + static_cast<std::size_t>(idx) * 2 * l_;
  double* bhi = blo + l_;
  std::fill_n(blo, l_, std::numeric_limits<double>::infinity());
  std::fill_n(bhi, l_, -std::numeric_limits<double>::infinity());
  for (std::uint32_t i = lo; i < hi; ++i) {
    const double* x = points_.data() + static_cast<std::size_t>(order_scratch_[i]) * l_;
    for (int k = 0; k < l_; ++k) {
      blo[k] = std::min(blo[k], x[k]);
      bhi[k] = std::max(bhi[k], x[k]);
    }
  }
  if (hi - lo <= kLeafSize) return idx;
  int axis = 0;
  for (int k = 1; k < l_; ++k)
    if (bhi[k] - blo[k] > bhi[axis] - blo[axis]) axis = k;
  const std::uint32_t mid = lo + (hi - lo) / 2;
  const double* pts = points_.data();
  const int l = l_;
  std::nth_element(order_scratch_.begin() + lo, order_scratch_.begin() + mid,
                   order_scratch_.begin() + hi, [pts, l, axis](std::uint32_t a, std::uint32_t b) {
                     return pts[static_cast<std::size_t>(a) * l + axis] <
                            pts[static_cast<std::size_t>(b) * l + axis];
                   });
  const std::int32_t left = build(lo, mid);
  const std::int32_t right = build(mid, hi);
  nodes_[idx].axis = axis;
  nodes_[idx].left = left;
  nodes_[idx].right = right;
  return idx;
}

double SurfaceCloud::box_distance2(std::int32_t node, std::span<const double> p) const {
  const double* blo = boxes_.data() + static_cast<std::size_t>(node) * 2 * l_;
  const double* bhi = blo + l_;
  double d2 = 0.0;
  for (int k = 0; k < l_; ++k) {
    const double d = p[k] < blo[k] ? blo[k] - p[k] : (p[k] > bhi[k] ? p[k] - bhi[k] : 0.0);
    d2 += d * d;
  }
  return d2;
}

template <bool kAny>
std::ptrdiff_t SurfaceCloud::search(std::span<const double> p, double& best) const {
  std::ptrdiff_t best_index = -1;
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const std::int32_t ni = stack[--top];
    if (box_distance2(ni, p) >= best) continue;
    const Node& node = nodes_[ni];
    if (node.axis < 0) {
      for (std::uint32_t i = node.lo; i < node.hi; ++i) {
        const double* x = points_.data() + static_cast<std::size_t>(i) * l_;
        double d2 = 0.0;
        for (int k = 0; k < l_; ++k) {
          const double d = x[k] - p[k];
          d2 += d * d;
        }
        if (d2 < best) {
          best = d2;
          best_index = i;
          if constexpr (kAny) return best_index;
        }
      }
      continue;
    }
    // Push the farther child first so the nearer one is explored next.
    const double dl = box_distance2(node.left, p);
    const double dr = box_distance2(node.right, p);
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best_index;
}

std::ptrdiff_t SurfaceCloud::nearest(std::span<const double> p, double max_d2, double& d2) const {
  d2 = max_d2;
  return search<false>(p, d2);
}

bool SurfaceCloud::any_within(std::span<const double> p, double r2) const {
  double best = r2;
  return search<true>(p, best) >= 0;
}

namespace {

// f = |X(u) - p|^2 / 2 with gradient and Hessian in u.
struct Residual {
  double f;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

Residual residual(const Embedding& emb, std::span<const double> p, std::span<const double> u) {
  const int n = emb.dim();
  Residual r{0.0, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  for (int k = 0; k < emb.ambient_dim(); ++k) {
    const Jet2d x = eval_jet2(emb.coords[k], u);
    const double diff = x.value() - p[k];
    r.f += 0.5 * diff * diff;
    for (int a = 0; a < n; ++a) {
      r.grad(a) += diff * x.grad(a);
      for (int b = 0; b < n; ++b) r.hess(a, b) += x.grad(a) * x.grad(b) + diff * x.hess(std::min(a, b), std::max(a, b));
    }
  }
  return r;
}

void wrap(const Box& box, std::vector<double>& u) {
  for (int d = 0; d < box.dim(); ++d) {
    const Interval& iv = box.bounds[d];
    if (box.periodic[d]) {
      double t = std::fmod(u[d] - iv.lo, iv.length());
      if (t < 0) t += iv.length();
      u[d] = iv.lo + t;
    } else {
      u[d] = std::clamp(u[d], iv.lo, iv.hi);
    }
  }
}

}  // namespace

double refine_distance(const Embedding& emb, std::span<const double> p, std::span<const double> u0) {
  const int n = emb.dim();
  std::vector<double> u(u0.begin(), u0.end());
  Residual cur = residual(emb, p, u);
  double lambda = 1e-6 * std::max(1.0, cur.hess.diagonal().cwiseAbs().maxCoeff());
  for (int it = 0; it < 60; ++it) {
    Eigen::MatrixXd a = cur.hess;
    a.diagonal().array() += lambda;
    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
      lambda = std::max(1e-12, lambda * 10.0);
      continue;
    }
    const Eigen::VectorXd step = llt.solve(-cur.grad);
    std::vector<double> trial(u);
    for (int d = 0; d < n; ++d) trial[d] += step(d);
    wrap(emb.param, trial);
    const Residual next = residual(emb, p, trial);
    if (next.f < cur.f) {
      const double decrease = cur.f - next.f;
      u.swap(trial);
      cur = next;
      lambda *= 0.3;
      if (decrease <= 1e-15 * (cur.f + 1e-300) || step.norm() < 1e-14) break;
    } else {
      lambda = std::max(1e-12, lambda * 4.0);
      if (lambda > 1e12) break;
    }
  }
  return std::sqrt(2.0 * cur.f);
}

TubeResult tube_volume_mc(const Embedding& emb, double eps, std::uint64_t samples,
                          std::uint64_t seed, const TubeOptions& opt) {
  if (eps == 0.0) return TubeResult{0.0, 0.0, 0.0, samples, seed, 0};
  const SurfaceCloud cloud(emb, opt.cloud_points);
  return tube_volume_mc(emb, cloud, eps, samples, seed, opt);
}

TubeResult tube_volume_mc(const Embedding& emb, const SurfaceCloud& cloud, double eps,
                          std::uint64_t samples, std::uint64_t seed, const TubeOptions& opt) {
  if (eps < 0.0) throw InputError("eps must be nonnegative");
  if (eps > emb.reach) throw InputError("eps exceeds the embedding's reach");
  if (samples < 100000) throw InputError("tube estimates need at least 1e5 samples");
  TubeResult r{0.0, 0.0, eps, samples, seed, 0};
  if (eps == 0.0) return r;
  const int l = emb.ambient_dim();
  Box box = emb.bbox;
  for (auto& iv : box.bounds) {
    iv.lo -= eps;
    iv.hi += eps;
  }
  const double rho = cloud.covering_radius();
  const double in2 = eps * eps;
  const double band2 = (eps + rho) * (eps + rho);

  // Voxel prefilter. The cloud distance is 1-Lipschitz, so a voxel whose
  // center is within eps - h of the cloud lies inside the tube and one whose
  // center is farther than eps + rho + h lies outside, h = half-diagonal.
  const int per_axis_cap = static_cast<int>(std::pow(double{1 << 21}, 1.0 / l));
  std::vector<int> cells(static_cast<std::size_t>(l));
  std::vector<double> step(static_cast<std::size_t>(l));
  const double target_h = 0.25 * eps;
  double half_diag = 0.0;
  std::size_t voxels = 1;
  for (int k = 0; k < l; ++k) {
    const double len = box.bounds[k].length();
    const double want = std::ceil(len * std::sqrt(static_cast<double>(l)) / (2.0 * target_h));
    cells[k] = std::clamp(static_cast<int>(want), 1, per_axis_cap);
    step[k] = len / cells[k];
    half_diag += 0.25 * step[k] * step[k];
    voxels *= static_cast<std::size_t>(cells[k]);
  }
  half_diag = std::sqrt(half_diag);
  enum : std::uint8_t { kMixed = 0, kInside = 1, kOutside = 2 };
  std::vector<std::uint8_t> state(voxels, kMixed);
  const std::size_t vblock = 4096;
  parallel_blocks((voxels + vblock - 1) / vblock, opt.workers, [&](std::size_t b) {
    std::vector<double> c(static_cast<std::size_t>(l));
    const std::size_t end = std::min(voxels, (b + 1) * vblock);
    for (std::size_t v = b * vblock; v < end; ++v) {
      std::size_t rest = v;
      for (int k = l - 1; k >= 0; --k) {
        c[k] = box.bounds[k].lo + (static_cast<double>(rest % cells[k]) + 0.5) * step[k];
        rest /= cells[k];
      }
      if (eps > half_diag && cloud.any_within(c, (eps - half_diag) * (eps - half_diag))) {
        state[v] = kInside;
      } else {
        const double far = eps + rho + half_diag;
        if (!cloud.any_within(c, far * far)) state[v] = kOutside;
      }
    }
  });

  const std::size_t batch = std::max<std::size_t>(1, opt.batch_size);
  const std::size_t batches = (samples + batch - 1) / batch;
  std::vector<std::uint64_t> hits(batches, 0);
  parallel_blocks(batches, opt.workers, [&](std::size_t b) {
    SplitMix64 rng = SplitMix64::substream(seed, b);
    const std::size_t m = std::min<std::uint64_t>(batch, samples - b * batch);
    std::vector<double> p(static_cast<std::size_t>(l));
    std::uint64_t count = 0;
    for (std::size_t s = 0; s < m; ++s) {
      std::size_t v = 0;
      for (int k = 0; k < l; ++k) {
        const double u = rng.uniform();
        p[k] = box.bounds[k].lo + box.bounds[k].length() * u;
        v = v * cells[k] + std::min(static_cast<std::size_t>(u * cells[k]), static_cast<std::size_t>(cells[k] - 1));
      }
      if (state[v] == kInside) {
        ++count;
        continue;
      }
      if (state[v] == kOutside) continue;
      if (cloud.any_within(p, in2)) {
        ++count;
        continue;
      }
      double d2 = 0.0;
      const std::ptrdiff_t idx = cloud.nearest(p, band2, d2);
      if (idx < 0) continue;
      if (refine_distance(emb, p, cloud.param(static_cast<std::size_t>(idx))) <= eps) ++count;
    }
    hits[b] = count;
  });
  r.hits = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  const double vol = box.measure();
  const double frac = static_cast<double>(r.hits) / static_cast<double>(samples);
  r.estimate = vol * frac;
  r.sigma = vol * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
  return r;
}

double unit_ball_volume(int j) {
  if (j < 0) throw InputError("ball dimension must be nonnegative");
  return std::pow(std::numbers::pi, 0.5 * j) / std::tgamma(0.5 * j + 1.0);
}

std::vector<double> steiner_coefficients(std::span<const double> v, int ambient_dim) {
  const int n = static_cast<int>(v.size()) - 1;
  if (n < 0) throw InputError("need at least V_0");
  if (ambient_dim < n) throw InputError("ambient dimension must be at least the manifold dimension");
  std::vector<double> c(static_cast<std::size_t>(ambient_dim + 1), 0.0);
  for (int i = 0; i <= n; ++i) c[ambient_dim - i] += unit_ball_volume(ambient_dim - i) * v[i];
  return c;
}

double steiner_eval(std::span<const double> v, double eps, int ambient_dim) {
  const std::vector<double> c = steiner_coefficients(v, ambient_dim);
  double s = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) s = s * eps + c[k];
  return s;
}

}  // namespace lk
