#pragma once

#include <span>

namespace lk {

/// Least-squares slope of log|y| against log x over the points with y != 0
/// and x > 0. NaN when fewer than two such points remain.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Limit at eps -> 0 from the last two samples assuming V(eps) = L + c eps.
double richardson_limit(std::span<const double> eps, std::span<const double> values);

}  // namespace lk
