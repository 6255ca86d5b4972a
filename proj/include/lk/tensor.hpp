#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace lk {

/// Dense rank-R tensor over an n-dimensional index range, row-major.
template <typename Scalar, int Rank>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(int n, Scalar fill = Scalar(0)) : n_(n), data_(size_for(n), fill) {}

  int dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return data_.size(); }
  Scalar* data() noexcept { return data_.data(); }
  const Scalar* data() const noexcept { return data_.data(); }

  template <typename... I>
  Scalar& operator()(I... idx) noexcept {
    static_assert(sizeof...(I) == Rank);
    return data_[offset(idx...)];
  }
  template <typename... I>
  const Scalar& operator()(I... idx) const noexcept {
    static_assert(sizeof...(I) == Rank);
    return data_[offset(idx...)];
  }

  template <typename... I>
  std::size_t offset(I... idx) const noexcept {
    std::size_t o = 0;
    ((o = o * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx)), ...);
    return o;
  }

  Scalar max_abs() const {
    Scalar m(0);
    for (const Scalar& v : data_) m = std::max(m, Scalar(std::abs(v)));
    return m;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  static std::size_t size_for(int n) {
    std::size_t s = 1;
    for (int r = 0; r < Rank; ++r) s *= static_cast<std::size_t>(n);
    return s;
  }

  int n_ = 0;
  std::vector<Scalar> data_;
};

using Tensor3d = Tensor<double, 3>;
using Tensor4d = Tensor<double, 4>;

}  // namespace lk
