#pragma once

#include <json.hpp>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lk {

struct RunConfig {
  std::string command;
  std::string input;
  std::vector<int> indices;
  std::vector<double> eps;
  std::uint64_t samples = 0;
  std::uint64_t seed = 42;
  int workers = 1;
  std::uint64_t max_nodes = std::uint64_t{1} << 21;
  std::string format = "csv";
  std::string out;

  /// Throws InputError on inconsistent settings.
  void validate() const;
};

/// "0.1,0.05,0.01" or the geometric form "first:ratio:count".
std::vector<double> parse_eps_spec(std::string_view text);

/// Fixed 9-significant-digit rendering used by every output.
std::string format_number(double v);

/// The configuration as echoed into output metadata. The worker count is left
/// out so that outputs do not depend on it; the convention constants are added.
nlohmann::ordered_json metadata(const RunConfig& cfg);

/// Metadata as CSV comment lines ("# key: value\n" ...).
std::string metadata_csv(const RunConfig& cfg);

}  // namespace lk
