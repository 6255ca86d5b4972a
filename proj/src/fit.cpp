#include "lk/fit.hpp"

#include <cmath>
#include <limits>

#include "lk/error.hpp"

namespace lk {

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("loglog_slope: size mismatch");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || y[k] == 0.0 || !std::isfinite(y[k])) continue;
    const double lx = std::log(x[k]);
    const double ly = std::log(std::abs(y[k]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double denom = m * sxx - sx * sx;
  if (m < 2 || denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / denom;
}

double richardson_limit(std::span<const double> eps, std::span<const double> values) {
  if (eps.size() != values.size() || eps.empty())
    throw InputError("richardson_limit: need matching nonempty inputs");
  const std::size_t k = eps.size() - 1;
  if (k == 0) return values[0];
  const double e0 = eps[k - 1], e1 = eps[k];
  if (e0 == e1) throw InputError("richardson_limit: repeated eps");
  return (values[k] * e0 - values[k - 1] * e1) / (e0 - e1);
}

}  // namespace lk
