// lk: command-line front end for intrinsic volumes, collapse sweeps and
// tube-volume estimates.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "lk/checks.hpp"
#include "lk/error.hpp"
#include "lk/run_config.hpp"
#include "lk/submersion.hpp"
#include "lk/tube.hpp"
#include "lk/weyl.hpp"
#include "lk/zoo.hpp"

namespace {

using lk::format_number;
using json = nlohmann::ordered_json;

enum Exit { kOk = 0, kValidation = 2, kNumeric = 3, kInput = 4 };

struct RawOptions {
  std::vector<int> indices;
  std::string eps;
  std::uint64_t samples = 0;
  std::uint64_t seed = 42;
  int workers = 1;
  std::string out;
  std::string format = "csv";
  std::string summary;
};

void add_common(CLI::App* cmd, RawOptions& raw) {
  cmd->add_option("--workers", raw.workers, "worker threads (outputs do not depend on it)");
  cmd->add_option("--out", raw.out, "output file (default: stdout)");
  cmd->add_option("--format", raw.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

std::uint64_t max_nodes_from_env() {
  const char* v = std::getenv("LK_MAX_NODES");
  if (!v || !*v) return std::uint64_t{1} << 21;
  char* end = nullptr;
  const unsigned long long n = std::strtoull(v, &end, 10);
  if (*end != '\0' || n == 0) throw lk::InputError("LK_MAX_NODES must be a positive integer");
  return n;
}

lk::QuadratureOptions quadrature_options(const lk::RunConfig& cfg) {
  lk::QuadratureOptions opt;
  opt.workers = cfg.workers;
  opt.max_nodes = cfg.max_nodes;
  return opt;
}

void emit(const lk::RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw lk::InputError("cannot write '" + cfg.out + "'");
  f << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw lk::InputError("cannot write '" + path + "'");
  f << text;
}

// Rounded through the 9-digit rendering so JSON and CSV carry the same value.
json number(double v) { return std::isfinite(v) ? json(std::stod(format_number(v))) : json(nullptr); }

int cmd_compute(const lk::RunConfig& cfg) {
  const lk::zoo::Entry e = lk::zoo::load(cfg.input);
  if (e.atlas.empty()) throw lk::InputError("input has no intrinsic chart");
  std::vector<int> idx = cfg.indices;
  if (idx.empty())
    for (int i = 0; i <= e.dim(); ++i) idx.push_back(i);
  const lk::QuadratureOptions opt = quadrature_options(cfg);
  std::string csv = lk::metadata_csv(cfg) + "i,value,error_estimate\n";
  json rows = json::array();
  for (int i : idx) {
    const lk::QuadratureResult r = lk::intrinsic_volume(e.atlas, i, opt);
    csv += std::to_string(i) + "," + format_number(r.value) + "," + format_number(r.error_estimate) + "\n";
    rows.push_back({{"i", i}, {"value", number(r.value)}, {"error_estimate", number(r.error_estimate)}});
  }
  if (cfg.format == "json")
    emit(cfg, json{{"metadata", lk::metadata(cfg)}, {"results", rows}}.dump(2) + "\n");
  else
    emit(cfg, csv);
  return kOk;
}

std::shared_ptr<const lk::SubmersionChart> need_submersion(const lk::zoo::Entry& e) {
  if (!e.submersion) throw lk::InputError("'" + e.name + "' is not a submersion");
  return e.submersion;
}

int cmd_sweep(const lk::RunConfig& cfg, const std::string& summary_path) {
  if (cfg.indices.size() != 1) throw lk::InputError("sweep needs exactly one --i");
  const auto sc = need_submersion(lk::zoo::load(cfg.input));
  const lk::SweepRecord rec =
      lk::collapse_sweep(sc, cfg.indices.front(), cfg.eps, quadrature_options(cfg));
  json summary;
  summary["i"] = rec.i;
  summary["target"] = number(rec.target);
  summary["extrapolated"] = number(rec.extrapolated);
  summary["slope"] = number(rec.slope);
  summary["pass"] = rec.pass();

  std::string text;
  if (cfg.format == "json") {
    json rows = json::array();
    for (std::size_t k = 0; k < rec.eps.size(); ++k)
      rows.push_back({{"eps", number(rec.eps[k])},
                      {"value", number(rec.values[k])},
                      {"target", number(rec.target)},
                      {"abs_err", number(std::abs(rec.values[k] - rec.target))}});
    text = json{{"metadata", lk::metadata(cfg)}, {"rows", rows}, {"summary", summary}}.dump(2) + "\n";
  } else {
    text = lk::metadata_csv(cfg) + "eps,value,target,abs_err\n";
    for (std::size_t k = 0; k < rec.eps.size(); ++k)
      text += format_number(rec.eps[k]) + "," + format_number(rec.values[k]) + "," +
              format_number(rec.target) + "," + format_number(std::abs(rec.values[k] - rec.target)) + "\n";
    const std::string path = !summary_path.empty() ? summary_path
                             : !cfg.out.empty()    ? cfg.out + ".summary.json"
                                                   : std::string();
    if (path.empty())
      text += "# summary: " + summary.dump() + "\n";
    else
      write_file(path, summary.dump(2) + "\n");
  }
  emit(cfg, text);
  return rec.pass() ? kOk : kValidation;
}

int cmd_sectional(const lk::RunConfig& cfg) {
  const auto sc = need_submersion(lk::zoo::load(cfg.input));
  const lk::SectionalSweep s =
      lk::sectional_sweep(*sc, cfg.eps, static_cast<int>(cfg.samples), cfg.seed);
  const std::vector<double>* cols[3] = {&s.min_base_base, &s.min_base_fiber, &s.min_fiber_fiber};
  const lk::PlaneClass classes[3] = {lk::PlaneClass::BaseBase, lk::PlaneClass::BaseFiber,
                                     lk::PlaneClass::FiberFiber};
  std::string text;
  if (cfg.format == "json") {
    json rows = json::array();
    for (std::size_t k = 0; k < s.eps.size(); ++k)
      for (int c = 0; c < 3; ++c)
        if (!std::isnan((*cols[c])[k]))
          rows.push_back({{"eps", number(s.eps[k])},
                          {"class", lk::plane_class_name(classes[c])},
                          {"min_k", number((*cols[c])[k])}});
    text = json{{"metadata", lk::metadata(cfg)},
                {"rows", rows},
                {"summary", {{"fiber_limit", number(s.fiber_limit)}, {"bounded_below", s.bounded_below}}}}
               .dump(2) +
           "\n";
  } else {
    text = lk::metadata_csv(cfg) + "eps,class,min_k\n";
    for (std::size_t k = 0; k < s.eps.size(); ++k)
      for (int c = 0; c < 3; ++c)
        if (!std::isnan((*cols[c])[k]))
          text += format_number(s.eps[k]) + "," + lk::plane_class_name(classes[c]) + "," +
                  format_number((*cols[c])[k]) + "\n";
    text += "# fiber_limit: " + format_number(s.fiber_limit) + "\n";
    text += std::string("# bounded_below: ") + (s.bounded_below ? "true" : "false") + "\n";
  }
  emit(cfg, text);
  return kOk;
}

int cmd_tube(const lk::RunConfig& cfg) {
  const lk::zoo::Entry e = lk::zoo::load(cfg.input);
  if (!e.embedding) throw lk::InputError("'" + e.name + "' has no embedding");
  if (cfg.eps.size() != 1) throw lk::InputError("tube needs exactly one --eps value");
  lk::TubeOptions opt;
  opt.workers = cfg.workers;
  const lk::TubeResult r = lk::tube_volume_mc(*e.embedding, cfg.eps.front(), cfg.samples, cfg.seed, opt);
  if (cfg.format == "json") {
    json j = {{"estimate", number(r.estimate)}, {"sigma", number(r.sigma)}, {"eps", number(r.eps)},
              {"samples", r.samples},           {"seed", r.seed}};
    emit(cfg, json{{"metadata", lk::metadata(cfg)}, {"result", j}}.dump(2) + "\n");
  } else {
    emit(cfg, lk::metadata_csv(cfg) + "estimate,sigma,eps,samples,seed\n" + format_number(r.estimate) +
                  "," + format_number(r.sigma) + "," + format_number(r.eps) + "," +
                  std::to_string(r.samples) + "," + std::to_string(r.seed) + "\n");
  }
  return kOk;
}

int cmd_validate(const lk::RunConfig& cfg) {
  const auto sc = need_submersion(lk::zoo::load(cfg.input));
  const lk::ValidationReport v = lk::validate(*sc, static_cast<int>(cfg.samples), cfg.seed);
  if (cfg.format == "json") {
    json j = {{"isometry_residual", number(v.isometry_residual)},
              {"orthogonality_residual", number(v.orthogonality_residual)},
              {"samples", v.samples},
              {"pass", v.pass}};
    emit(cfg, json{{"metadata", lk::metadata(cfg)}, {"result", j}}.dump(2) + "\n");
  } else {
    emit(cfg, lk::metadata_csv(cfg) + "isometry_residual,orthogonality_residual,samples,pass\n" +
                  format_number(v.isometry_residual) + "," + format_number(v.orthogonality_residual) + "," +
                  std::to_string(v.samples) + "," + (v.pass ? "true" : "false") + "\n");
  }
  return v.pass ? kOk : kValidation;
}

int cmd_check(const lk::RunConfig& cfg) {
  const std::vector<lk::CheckResult> results = lk::run_check(cfg.input, quadrature_options(cfg));
  std::string text;
  bool pass = true;
  for (const auto& r : results) {
    text += (r.pass ? "PASS " : "FAIL ") + r.name + "\n";
    for (const auto& l : r.lines) text += "  " + l + "\n";
    pass = pass && r.pass;
  }
  emit(cfg, text);
  return pass ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lipschitz-Killing curvatures of closed Riemannian manifolds and fiber collapse"};
  app.require_subcommand(1);
  RawOptions raw;
  std::string input;

  auto* compute = app.add_subcommand("compute", "intrinsic volumes V_i of a manifold");
  compute->add_option("input", input, "zoo:name?k=v or a chart/submersion JSON file")->required();
  compute->add_option("--i", raw.indices, "indices (default: all)");
  add_common(compute, raw);

  auto* sweep = app.add_subcommand("sweep", "V_i(M(eps)) along a fiber-collapse schedule");
  sweep->add_option("input", input, "submersion URI")->required();
  sweep->add_option("--i", raw.indices, "index")->required();
  sweep->add_option("--eps", raw.eps, "comma list or first:ratio:count (default 0.25:0.5:8)");
  sweep->add_option("--summary", raw.summary, "summary JSON path (default: <out>.summary.json)");
  add_common(sweep, raw);

  auto* sectional = app.add_subcommand("sectional", "minimal sectional curvature per plane class");
  sectional->add_option("input", input, "submersion URI")->required();
  sectional->add_option("--eps", raw.eps, "comma list or first:ratio:count (default 0.25:0.5:8)");
  sectional->add_option("--samples", raw.samples, "sample points (default 200)");
  sectional->add_option("--seed", raw.seed, "random seed");
  add_common(sectional, raw);

  auto* tube = app.add_subcommand("tube", "Monte-Carlo volume of an eps-tube");
  tube->add_option("input", input, "embedding URI")->required();
  tube->add_option("--eps", raw.eps, "tube radius")->required();
  tube->add_option("--samples", raw.samples, "sample count (default 1e6)");
  tube->add_option("--seed", raw.seed, "random seed");
  add_common(tube, raw);

  auto* validate = app.add_subcommand("validate", "check that a chart pair is a Riemannian submersion");
  validate->add_option("input", input, "submersion URI")->required();
  validate->add_option("--samples", raw.samples, "sample points (default 100)");
  validate->add_option("--seed", raw.seed, "random seed");
  add_common(validate, raw);

  auto* check = app.add_subcommand("check", "run a named invariant suite");
  check->add_option("suite", input, "one of: " + [] {
    std::string s;
    for (const auto& n : lk::check_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }())->required();
  add_common(check, raw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    lk::RunConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.input = input;
    cfg.indices = raw.indices;
    cfg.eps = lk::parse_eps_spec(raw.eps.empty() ? "0.25:0.5:8" : raw.eps);
    if (cfg.command == "compute" || cfg.command == "validate" || cfg.command == "check") cfg.eps.clear();
    cfg.samples = raw.samples;
    if (cfg.samples == 0) {
      if (cfg.command == "tube") cfg.samples = 1000000;
      if (cfg.command == "sectional") cfg.samples = 200;
      if (cfg.command == "validate") cfg.samples = 100;
    }
    cfg.seed = raw.seed;
    cfg.workers = raw.workers;
    cfg.max_nodes = max_nodes_from_env();
    cfg.format = raw.format;
    cfg.out = raw.out;
    cfg.validate();
    if (cfg.command == "compute") return cmd_compute(cfg);
    if (cfg.command == "sweep") return cmd_sweep(cfg, raw.summary);
    if (cfg.command == "sectional") return cmd_sectional(cfg);
    if (cfg.command == "tube") return cmd_tube(cfg);
    if (cfg.command == "validate") return cmd_validate(cfg);
    return cmd_check(cfg);
  } catch (const lk::InputError& e) {
    std::cerr << "lk: input error: " << e.what() << "\n";
    return kInput;
  } catch (const lk::ValidationError& e) {
    std::cerr << "lk: validation failed: " << e.what() << "\n";
    return kValidation;
  } catch (const lk::Error& e) {
    std::cerr << "lk: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "lk: " << e.what() << "\n";
    return kNumeric;
  }
}
