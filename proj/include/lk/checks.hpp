#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lk/chart.hpp"
#include "lk/quadrature.hpp"
#include "lk/rng.hpp"

namespace lk {

/// Random 2-jet of a metric: g = M M^T + n/2 I, first and second derivatives
/// uniform in (-1, 1) with the MetricJet symmetries.
MetricJet random_metric_jet(int n, SplitMix64& rng);

struct BlockHarnessReport {
  int matrices = 0;
  double min_upper_left_slope = 0.0;   // deviation from eps^-1 A^-1
  double min_off_diagonal_slope = 0.0;
  double min_lower_right_slope = 0.0;  // deviation from D^-1
  double max_lower_right_slope = 0.0;
  double max_dense_mismatch = 0.0;     // relative, against a dense inverse
  bool pass = false;
};

/// Lemma-style expansion of [[eps A, eps B], [eps C, D]]^-1 on random blocks
/// over eps = 2^-3 .. 2^-10: upper-left and off-diagonal deviations must not
/// grow (slope >= -0.15), the lower-right deviation must decay with slope
/// 1 +- 0.15.
BlockHarnessReport block_inverse_harness(int count, std::uint64_t seed);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::vector<std::string> lines;
};

/// Names accepted by run_check, "all" last.
const std::vector<std::string>& check_names();

/// Runs a named invariant suite ("all" runs every suite). Throws InputError
/// for unknown names.
std::vector<CheckResult> run_check(const std::string& name, const QuadratureOptions& opt);

}  // namespace lk
