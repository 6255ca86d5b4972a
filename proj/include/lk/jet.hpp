#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <span>

namespace lk {

/// Largest chart dimension supported by the fixed-capacity jet storage.
inline constexpr int kMaxDim = 6;
inline constexpr int kMaxTri = kMaxDim * (kMaxDim + 1) / 2;

/// Packed position of the Hessian entry (i, j); symmetric in its arguments.
constexpr int tri_index(int i, int j) noexcept {
  return i <= j ? j * (j + 1) / 2 + i : i * (i + 1) / 2 + j;
}

/// Second-order truncated Taylor jet in `dim` variables: a value, its gradient
/// and its Hessian. The Hessian is stored as a packed triangle, so symmetry is
/// structural.
template <typename Scalar>
class Jet2 {
 public:
  Jet2() = default;

  static Jet2 constant(int dim, Scalar c) {
    assert(dim >= 0 && dim <= kMaxDim);
    Jet2 j;
    j.dim_ = dim;
    j.value_ = c;
    return j;
  }

  static Jet2 variable(int dim, int index, Scalar x) {
    Jet2 j = constant(dim, x);
    j.grad_[index] = Scalar(1);
    return j;
  }

  int dim() const noexcept { return dim_; }
  Scalar value() const noexcept { return value_; }
  Scalar grad(int i) const noexcept { return grad_[i]; }
  Scalar hess(int i, int j) const noexcept { return hess_[tri_index(i, j)]; }

  Scalar& value() noexcept { return value_; }
  Scalar& grad(int i) noexcept { return grad_[i]; }
  Scalar& hess(int i, int j) noexcept { return hess_[tri_index(i, j)]; }

  int tri_size() const noexcept { return dim_ * (dim_ + 1) / 2; }

  /// f(u) given f, f' and f'' at u.value().
  Jet2 compose(Scalar f, Scalar f1, Scalar f2) const {
    Jet2 r = constant(dim_, f);
    for (int i = 0; i < dim_; ++i) r.grad_[i] = f1 * grad_[i];
    for (int j = 0; j < dim_; ++j)
      for (int i = 0; i <= j; ++i)
        r.hess_[tri_index(i, j)] = f1 * hess_[tri_index(i, j)] + f2 * grad_[i] * grad_[j];
    return r;
  }

  Jet2& operator+=(const Jet2& o) {
    value_ += o.value_;
    for (int i = 0; i < dim_; ++i) grad_[i] += o.grad_[i];
    for (int k = 0; k < tri_size(); ++k) hess_[k] += o.hess_[k];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    value_ -= o.value_;
    for (int i = 0; i < dim_; ++i) grad_[i] -= o.grad_[i];
    for (int k = 0; k < tri_size(); ++k) hess_[k] -= o.hess_[k];
    return *this;
  }
  Jet2& operator*=(Scalar s) {
    value_ *= s;
    for (int i = 0; i < dim_; ++i) grad_[i] *= s;
    for (int k = 0; k < tri_size(); ++k) hess_[k] *= s;
    return *this;
  }
  Jet2& operator+=(Scalar s) {
    value_ += s;
    return *this;
  }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(Jet2 a, Scalar s) { return a *= s; }
  friend Jet2 operator*(Scalar s, Jet2 a) { return a *= s; }
  friend Jet2 operator+(Jet2 a, Scalar s) { return a += s; }
  friend Jet2 operator+(Scalar s, Jet2 a) { return a += s; }
  friend Jet2 operator-(Jet2 a, Scalar s) { return a += -s; }
  friend Jet2 operator-(Scalar s, const Jet2& a) { return -a + s; }
  friend Jet2 operator-(Jet2 a) { return a *= Scalar(-1); }

  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    assert(a.dim_ == b.dim_);
    Jet2 r = constant(a.dim_, a.value_ * b.value_);
    for (int i = 0; i < a.dim_; ++i) r.grad_[i] = a.value_ * b.grad_[i] + b.value_ * a.grad_[i];
    for (int j = 0; j < a.dim_; ++j)
      for (int i = 0; i <= j; ++i) {
        const int k = tri_index(i, j);
        r.hess_[k] = a.value_ * b.hess_[k] + b.value_ * a.hess_[k] +
                     (a.grad_[i] * b.grad_[j] + a.grad_[j] * b.grad_[i]);
      }
    return r;
  }

  friend Jet2 reciprocal(const Jet2& a) {
    const Scalar inv = Scalar(1) / a.value_;
    return a.compose(inv, -inv * inv, Scalar(2) * inv * inv * inv);
  }
  friend Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }
  friend Jet2 operator/(Jet2 a, Scalar s) { return a *= Scalar(1) / s; }
  friend Jet2 operator/(Scalar s, const Jet2& a) { return reciprocal(a) * s; }

  friend Jet2 sin(const Jet2& a) {
    using std::cos, std::sin;
    const Scalar s = sin(a.value_);
    return a.compose(s, cos(a.value_), -s);
  }
  friend Jet2 cos(const Jet2& a) {
    using std::cos, std::sin;
    const Scalar c = cos(a.value_);
    return a.compose(c, -sin(a.value_), -c);
  }
  friend Jet2 tan(const Jet2& a) {
    using std::tan;
    const Scalar t = tan(a.value_);
    const Scalar d = Scalar(1) + t * t;
    return a.compose(t, d, Scalar(2) * t * d);
  }
  friend Jet2 exp(const Jet2& a) {
    using std::exp;
    const Scalar e = exp(a.value_);
    return a.compose(e, e, e);
  }
  friend Jet2 log(const Jet2& a) {
    using std::log;
    const Scalar inv = Scalar(1) / a.value_;
    return a.compose(log(a.value_), inv, -inv * inv);
  }
  friend Jet2 sqrt(const Jet2& a) {
    using std::sqrt;
    const Scalar s = sqrt(a.value_);
    return a.compose(s, Scalar(0.5) / s, Scalar(-0.25) / (s * s * s));
  }
  /// a^k for integer k; callers guarantee a != 0 when k < 0.
  friend Jet2 powi(const Jet2& a, int k) {
    if (k == 0) return constant(a.dim_, Scalar(1));
    if (k == 1) return a;
    using std::pow;
    const Scalar x = a.value_;
    const Scalar km1 = (k == 2) ? x : pow(x, k - 1);
    const Scalar km2 = (k == 2) ? Scalar(1) : pow(x, k - 2);
    return a.compose(km1 * x, Scalar(k) * km1, Scalar(k) * Scalar(k - 1) * km2);
  }
  /// a^c for a real constant c; requires a > 0.
  friend Jet2 powr(const Jet2& a, Scalar c) {
    using std::pow;
    const Scalar x = a.value_;
    const Scalar p = pow(x, c);
    return a.compose(p, c * p / x, c * (c - Scalar(1)) * p / (x * x));
  }

 private:
  int dim_ = 0;
  Scalar value_{};
  std::array<Scalar, kMaxDim> grad_{};
  std::array<Scalar, kMaxTri> hess_{};
};

using Jet2d = Jet2<double>;

/// Restricts a jet to a subset of its variables (the others are held fixed).
template <typename Scalar>
Jet2<Scalar> restrict_jet(const Jet2<Scalar>& j, std::span<const int> vars) {
  Jet2<Scalar> r = Jet2<Scalar>::constant(static_cast<int>(vars.size()), j.value());
  for (std::size_t a = 0; a < vars.size(); ++a) {
    r.grad(static_cast<int>(a)) = j.grad(vars[a]);
    for (std::size_t b = 0; b <= a; ++b)
      r.hess(static_cast<int>(b), static_cast<int>(a)) = j.hess(vars[b], vars[a]);
  }
  return r;
}

}  // namespace lk
