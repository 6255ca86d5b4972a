#include <doctest.h>

#include <json.hpp>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " LK_BINARY " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

// data row for index i of a compute CSV
std::string row(const std::string& csv, int i) {
  std::istringstream in(csv);
  std::string line;
  const std::string prefix = std::to_string(i) + ",";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line;
  return {};
}

}  // namespace

TEST_CASE("compute") {
  const Run r = run("compute 'zoo:sphere?r=1' --i 0 --i 1 --i 2");
  CHECK(r.code == 0);
  CHECK(r.out.find("i,value,error_estimate") != std::string::npos);
  CHECK(row(r.out, 0).rfind("0,2,", 0) == 0);
  CHECK(row(r.out, 1).rfind("1,0,0", 0) == 0);
  CHECK(row(r.out, 2).rfind("2,12.5663706", 0) == 0);

  const Run j = run("compute zoo:flat_torus --format json");
  CHECK(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["results"].size() == 3);
  CHECK(doc["metadata"]["command"] == "compute");
  CHECK_FALSE(doc["metadata"].contains("workers"));
  CHECK(doc["results"][2]["value"].get<double>() == doctest::Approx(39.4784176));
}

TEST_CASE("exit codes") {
  CHECK(run("compute zoo:nope").code == 4);
  CHECK(run("compute 'zoo:sphere?r=-1'").code == 4);
  CHECK(run("compute /nonexistent.json").code == 4);
  CHECK(run("frobnicate").code == 4);
  CHECK(run("compute zoo:sphere --format xml").code == 4);
  CHECK(run("tube zoo:sphere2_embedded --eps 2").code == 4);
  CHECK(run("tube zoo:sphere2_embedded --eps 0.1 --samples 10").code == 4);
  CHECK(run("sweep zoo:product_s2_s1 --i 1 --eps 0.5,0.25").code == 4);
  CHECK(run("sweep zoo:product_s2_s1 --i 1 --eps 0.25,0.5,0.125,0.1").code == 4);
  CHECK(run("check nope").code == 4);
  CHECK(run("compute zoo:warped_s2_over_s1 --i 1", "LK_MAX_NODES=50").code == 3);
  CHECK(run("compute zoo:sphere", "LK_MAX_NODES=abc").code == 4);
}

TEST_CASE("validate") {
  const Run ok = run("validate zoo:product_s2_s1");
  CHECK(ok.code == 0);
  CHECK(ok.out.find(",true") != std::string::npos);

  const std::string path = tmp("lk_cli_bad_submersion.json");
  std::ofstream(path) << R"({
    "total_chart": {"dim": 2, "domain": [[0, 6.283185307179586], [0, 6.283185307179586]],
                    "periodic": [true, true], "metric": [["1", "0"], ["1"]]},
    "base_chart": {"dim": 1, "domain": [[0, 6.283185307179586]], "periodic": [true], "metric": [["1.1"]]},
    "fiber_dims": [0], "base_dims": [1]})";
  const Run bad = run("validate " + path);
  CHECK(bad.code == 2);
  CHECK(bad.out.find(",false") != std::string::npos);
  CHECK(run("sweep " + path + " --i 1").code == 2);
}

TEST_CASE("sweep summary") {
  const std::string out = tmp("lk_cli_sweep.csv");
  std::filesystem::remove(out + ".summary.json");
  const Run r = run("sweep zoo:warped_s2_over_s1 --i 1 --out " + out);
  CHECK(r.code == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("eps,value,target,abs_err") != std::string::npos);
  const auto summary = nlohmann::json::parse(slurp(out + ".summary.json"));
  CHECK(summary["pass"] == true);
  CHECK(summary["extrapolated"].get<double>() == doctest::Approx(12.5663706).epsilon(1e-4));

  const std::string explicit_path = tmp("lk_cli_summary.json");
  CHECK(run("sweep zoo:flat_t2_over_s1 --i 1 --eps 0.5:0.5:4 --summary " + explicit_path).code == 0);
  CHECK(nlohmann::json::parse(slurp(explicit_path))["target"] == 0);

  const Run inline_summary = run("sweep zoo:product_s2_s1 --i 1 --eps 0.25:0.5:4");
  CHECK(inline_summary.out.find("# summary: ") != std::string::npos);
}

TEST_CASE("sectional") {
  const Run r = run("sectional zoo:torus_fiber_bundle --samples 100");
  CHECK(r.code == 0);
  CHECK(r.out.find("eps,class,min_k") != std::string::npos);
  CHECK(r.out.find("fiber-fiber") != std::string::npos);
  CHECK(r.out.find("# bounded_below: false") != std::string::npos);
  const auto pos = r.out.find("# fiber_limit: ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(r.out.substr(pos + 15)) == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("tube") {
  const Run r = run("tube zoo:sphere2_embedded --eps 0.1 --samples 200000 --seed 3 --format json");
  CHECK(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["result"]["samples"] == 200000);
  CHECK(doc["result"]["seed"] == 3);
  const double est = doc["result"]["estimate"], sigma = doc["result"]["sigma"];
  CHECK(std::abs(est - 2.52165) <= 4 * sigma);
}

TEST_CASE("outputs do not depend on the worker count") {
  for (const std::string args : {"compute zoo:warped_s2_over_s1", "sweep zoo:warped_s2_over_s1 --i 1",
                                 "tube zoo:sphere2_embedded --eps 0.1 --samples 300000"}) {
    const Run a = run(args + " --workers 1");
    const Run b = run(args + " --workers 3");
    CHECK(a.code == 0);
    CHECK_MESSAGE(a.out == b.out, args);
  }
}

TEST_CASE("check") {
  const Run r = run("check gauss-bonnet");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("PASS gauss-bonnet", 0) == 0);
}
