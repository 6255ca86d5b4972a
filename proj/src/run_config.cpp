#include "lk/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "lk/curvature.hpp"
#include "lk/error.hpp"
#include "lk/submersion.hpp"
#include "lk/weyl.hpp"

namespace lk {

void RunConfig::validate() const {
  if (input.empty()) throw InputError("an input URI is required");
  if (format != "csv" && format != "json") throw InputError("format must be csv or json");
  if (workers < 1) throw InputError("workers must be at least 1");
  if (max_nodes < 1) throw InputError("max_nodes must be positive");
  for (int i : indices)
    if (i < 0) throw InputError("--i must be nonnegative");
  for (double e : eps)
    if (!(e > 0.0)) throw InputError("eps values must be positive");
}

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw InputError("not a number: '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::vector<double> parse_eps_spec(std::string_view text) {
  if (text.find(':') != std::string_view::npos) {
    const std::size_t a = text.find(':');
    const std::size_t b = text.find(':', a + 1);
    if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos)
      throw InputError("geometric eps spec must be first:ratio:count");
    const double first = parse_double(text.substr(0, a));
    const double ratio = parse_double(text.substr(a + 1, b - a - 1));
    const double count = parse_double(text.substr(b + 1));
    if (count != std::floor(count) || count < 1 || count > 64) throw InputError("eps count must be an integer in [1, 64]");
    return geometric_schedule(first, ratio, static_cast<int>(count));
  }
  std::vector<double> out;
  while (true) {
    const std::size_t c = text.find(',');
    out.push_back(parse_double(text.substr(0, c)));
    if (c == std::string_view::npos) break;
    text = text.substr(c + 1);
  }
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

nlohmann::ordered_json metadata(const RunConfig& cfg) {
  nlohmann::ordered_json m;
  m["command"] = cfg.command;
  m["input"] = cfg.input;
  m["i"] = cfg.indices;
  nlohmann::ordered_json eps = nlohmann::ordered_json::array();
  for (double e : cfg.eps) eps.push_back(format_number(e));
  m["eps"] = eps;
  m["samples"] = cfg.samples;
  m["seed"] = cfg.seed;
  m["max_nodes"] = cfg.max_nodes;
  m["format"] = cfg.format;
  m["riemann_calibration"] = format_number(kRiemannCalibration);
  m["sectional_calibration"] = format_number(kSectionalCalibration);
  m["coupling_normalization"] = "(2 pi)^(-e/2) * " + format_number(kCouplingCalibration) +
                                " over canonical couplings";
  return m;
}

std::string metadata_csv(const RunConfig& cfg) {
  const nlohmann::ordered_json m = metadata(cfg);
  std::string s;
  for (const auto& [k, v] : m.items())
    s += "# " + k + ": " + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
  return s;
}

}  // namespace lk
