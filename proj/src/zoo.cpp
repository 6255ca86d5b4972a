#include "lk/zoo.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json_io.hpp"
#include "lk/error.hpp"

namespace lk::zoo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Shortest round-trip decimal, parenthesized when negative.
std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  return v < 0 ? "(" + s + ")" : s;
}

Box make_box(std::vector<Interval> bounds, std::vector<bool> periodic) {
  return Box{std::move(bounds), std::move(periodic)};
}

class ParamReader {
 public:
  ParamReader(const std::string& name, const Params& p) : name_(name), params_(p) {}

  double get(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  void require(bool ok, const std::string& what) const {
    if (!ok) throw InputError(name_ + ": " + what);
  }

  void finish() const {
    for (const auto& [k, v] : params_)
      if (!used_.count(k)) throw InputError(name_ + ": unknown parameter '" + k + "'");
  }

 private:
  std::string name_;
  const Params& params_;
  std::set<std::string> used_;
};

std::shared_ptr<const Chart> sphere_chart(double r) {
  const std::string r2 = num(r * r);
  return std::make_shared<const Chart>(Chart::from_strings(
      make_box({{0.0, kPi}, {0.0, kTwoPi}}, {false, true}), {{r2, "0"}, {r2 + "*sin(x0)^2"}}));
}

std::shared_ptr<const Chart> ring_torus_chart(double big_r, double r) {
  return std::make_shared<const Chart>(Chart::from_strings(
      make_box({{0.0, kTwoPi}, {0.0, kTwoPi}}, {true, true}),
      {{num(r * r), "0"}, {"(" + num(big_r) + " + " + num(r) + "*cos(x0))^2"}}));
}

std::shared_ptr<const Chart> circle_chart(double length) {
  return std::make_shared<const Chart>(
      Chart::from_strings(make_box({{0.0, length}}, {true}), {{"1"}}));
}

std::shared_ptr<const Chart> constant_circle_chart(double length, double g) {
  return std::make_shared<const Chart>(
      Chart::from_strings(make_box({{0.0, length}}, {true}), {{num(g)}}));
}

void finish_submersion(Entry& e, std::shared_ptr<const Chart> total, std::shared_ptr<const Chart> base,
                       BlockSplit split) {
  auto sc = std::make_shared<const SubmersionChart>(total, base, std::move(split));
  const ValidationReport v = validate(*sc, 64);
  if (!v.pass) {
    std::ostringstream os;
    os << e.name << ": not a Riemannian submersion (residual " << v.isometry_residual << ")";
    throw ValidationError(os.str());
  }
  e.atlas = {total};
  e.submersion = std::move(sc);
}

void add(Entry& e, std::string key, double value, std::string provenance) {
  e.references.push_back(Reference{std::move(key), value, std::move(provenance)});
}

Entry make_sphere(const Params& p) {
  ParamReader rd("sphere", p);
  const double r = rd.get("r", 1.0);
  rd.require(r > 0, "r must be positive");
  rd.finish();
  Entry e{"sphere", p, {sphere_chart(r)}, nullptr, nullptr, {}};
  add(e, "chi", 2, "closed form: chi(S^2)");
  add(e, "V0", 2, "closed form: V_0 = chi");
  add(e, "V1", 0, "closed form: odd codimension");
  add(e, "V2", 4 * kPi * r * r, "closed form: area 4 pi r^2");
  add(e, "volume", 4 * kPi * r * r, "closed form: area 4 pi r^2");
  add(e, "min_K", 1 / (r * r), "closed form: K = 1/r^2");
  return e;
}

Entry make_flat_torus(const Params& p) {
  ParamReader rd("flat_torus", p);
  const double a = rd.get("a", kTwoPi), b = rd.get("b", kTwoPi);
  rd.require(a > 0 && b > 0, "periods must be positive");
  rd.finish();
  auto chart = std::make_shared<const Chart>(
      Chart::from_strings(make_box({{0.0, a}, {0.0, b}}, {true, true}), {{"1", "0"}, {"1"}}));
  Entry e{"flat_torus", p, {chart}, nullptr, nullptr, {}};
  add(e, "chi", 0, "closed form: chi(T^2)");
  add(e, "V0", 0, "closed form: V_0 = chi");
  add(e, "V1", 0, "closed form: odd codimension");
  add(e, "V2", a * b, "closed form: product of periods");
  add(e, "volume", a * b, "closed form: product of periods");
  return e;
}

Entry make_ring_torus(const Params& p) {
  ParamReader rd("ring_torus", p);
  const double big_r = rd.get("R", 2.0), r = rd.get("r", 1.0);
  rd.require(r > 0 && big_r > r, "need R > r > 0");
  rd.finish();
  Entry e{"ring_torus", p, {ring_torus_chart(big_r, r)}, nullptr, nullptr, {}};
  const double area = 4 * kPi * kPi * big_r * r;
  add(e, "chi", 0, "closed form: chi(T^2)");
  add(e, "V0", 0, "closed form: V_0 = chi");
  add(e, "V1", 0, "closed form: odd codimension");
  add(e, "V2", area, "closed form: area 4 pi^2 R r");
  add(e, "volume", area, "closed form: area 4 pi^2 R r");
  add(e, "min_K", -1 / (r * (big_r - r)), "closed form: K = cos t / (r (R + r cos t)) at t = pi");
  add(e, "max_K", 1 / (r * (big_r + r)), "closed form: K at t = 0");
  return e;
}

Entry make_product_s2_s1(const Params& p) {
  ParamReader rd("product_s2_s1", p);
  const double r = rd.get("r", 1.0), len = rd.get("L", kTwoPi);
  rd.require(r > 0 && len > 0, "r and L must be positive");
  rd.finish();
  const std::string r2 = num(r * r);
  auto total = std::make_shared<const Chart>(Chart::from_strings(
      make_box({{0.0, kPi}, {0.0, kTwoPi}, {0.0, len}}, {false, true, true}),
      {{r2, "0", "0"}, {r2 + "*sin(x0)^2", "0"}, {"1"}}));
  Entry e{"product_s2_s1", p, {}, nullptr, nullptr, {}};
  finish_submersion(e, total, circle_chart(len), BlockSplit{{0, 1}, {2}});
  const double vol = 4 * kPi * r * r * len;
  add(e, "chi", 0, "closed form: chi(S^2) chi(S^1)");
  add(e, "chi_fiber", 2, "closed form: chi(S^2)");
  add(e, "V0", 0, "closed form: odd codimension");
  add(e, "V1", 2 * len, "closed form: (2 pi)^-1 * (1/r^2) * 4 pi r^2 L");
  add(e, "V2", 0, "closed form: odd codimension");
  add(e, "V3", vol, "closed form: 4 pi r^2 L");
  add(e, "volume", vol, "closed form: 4 pi r^2 L");
  add(e, "target_V1", 2 * len, "closed form: chi(S^2) V_1(S^1) = 2 L");
  add(e, "min_fiber_K", 1 / (r * r), "closed form: round sphere");
  return e;
}

Entry make_warped_s2_over_s1(const Params& p) {
  ParamReader rd("warped_s2_over_s1", p);
  const double a = rd.get("a", 0.3);
  rd.require(std::abs(a) < 1, "need |a| < 1");
  rd.finish();
  const std::string f2 = "(1 + " + num(a) + "*sin(x2))^2";
  auto total = std::make_shared<const Chart>(Chart::from_strings(
      make_box({{0.0, kPi}, {0.0, kTwoPi}, {0.0, kTwoPi}}, {false, true, true}),
      {{f2, "0", "0"}, {f2 + "*sin(x0)^2", "0"}, {"1"}}));
  Entry e{"warped_s2_over_s1", p, {}, nullptr, nullptr, {}};
  finish_submersion(e, total, circle_chart(kTwoPi), BlockSplit{{0, 1}, {2}});
  const double vol = 8 * kPi * kPi * (1 + 0.5 * a * a);
  add(e, "chi", 0, "closed form: chi(S^2) chi(S^1)");
  add(e, "chi_fiber", 2, "closed form: chi(S^2)");
  add(e, "V0", 0, "closed form: odd codimension");
  add(e, "V1", 4 * kPi + 2 * kPi * a * a,
      "reduced integral: (2 pi)^-1 4 pi int_0^{2 pi} (1 + f'^2) db, f = 1 + a sin b");
  add(e, "V2", 0, "closed form: odd codimension");
  add(e, "V3", vol, "reduced integral: 4 pi int_0^{2 pi} f^2 db");
  add(e, "volume", vol, "reduced integral: 4 pi int_0^{2 pi} f^2 db");
  add(e, "target_V1", 4 * kPi, "closed form: chi(S^2) V_1(S^1) = 4 pi");
  return e;
}

Entry make_flat_t2_over_s1(const Params& p) {
  ParamReader rd("flat_t2_over_s1", p);
  rd.finish();
  auto total = std::make_shared<const Chart>(Chart::from_strings(
      make_box({{0.0, kTwoPi}, {0.0, kTwoPi}}, {true, true}), {{"1", "0"}, {"1"}}));
  Entry e{"flat_t2_over_s1", p, {}, nullptr, nullptr, {}};
  finish_submersion(e, total, circle_chart(kTwoPi), BlockSplit{{0}, {1}});
  add(e, "chi_fiber", 0, "closed form: chi(S^1)");
  add(e, "V0", 0, "closed form: flat");
  add(e, "V1", 0, "closed form: odd codimension");
  add(e, "V2", 4 * kPi * kPi, "closed form: product of periods");
  add(e, "volume", 4 * kPi * kPi, "closed form: product of periods");
  add(e, "target_V1", 0, "closed form: chi(S^1) V_1(S^1) = 0");
  return e;
}

Entry make_torus_fiber_bundle(const Params& p) {
  ParamReader rd("torus_fiber_bundle", p);
  const double big_r = rd.get("R", 2.0), r = rd.get("r", 1.0);
  rd.require(r > 0 && big_r > r, "need R > r > 0");
  rd.finish();
  auto total = std::make_shared<const Chart>(Chart::from_strings(
      make_box({{0.0, kTwoPi}, {0.0, kTwoPi}, {0.0, kTwoPi}}, {true, true, true}),
      {{num(r * r), "0", "0"}, {"(" + num(big_r) + " + " + num(r) + "*cos(x0))^2", "0"}, {"1"}}));
  Entry e{"torus_fiber_bundle", p, {}, nullptr, nullptr, {}};
  finish_submersion(e, total, circle_chart(kTwoPi), BlockSplit{{0, 1}, {2}});
  const double vol = 8 * kPi * kPi * kPi * big_r * r;
  add(e, "chi_fiber", 0, "closed form: chi(T^2)");
  add(e, "V0", 0, "closed form: odd codimension");
  add(e, "V1", 0, "closed form: total curvature of the torus vanishes");
  add(e, "V2", 0, "closed form: odd codimension");
  add(e, "V3", vol, "closed form: 4 pi^2 R r * 2 pi");
  add(e, "volume", vol, "closed form: 4 pi^2 R r * 2 pi");
  add(e, "target_V1", 0, "closed form: chi(T^2) V_1(S^1) = 0");
  add(e, "min_fiber_K", -1 / (r * (big_r - r)), "closed form: inner equator of the ring torus");
  return e;
}

Entry make_coupled_t2_over_s1(const Params& p) {
  ParamReader rd("coupled_t2_over_s1", p);
  const double c = rd.get("c", 0.1);
  rd.require(std::abs(c) < 1, "need |c| < 1");
  rd.finish();
  auto total = std::make_shared<const Chart>(Chart::from_strings(
      make_box({{0.0, kTwoPi}, {0.0, kTwoPi}}, {true, true}), {{"1", num(c)}, {"1"}}));
  Entry e{"coupled_t2_over_s1", p, {}, nullptr, nullptr, {}};
  finish_submersion(e, total, constant_circle_chart(kTwoPi, 1 - c * c), BlockSplit{{0}, {1}});
  const double vol = 4 * kPi * kPi * std::sqrt(1 - c * c);
  add(e, "chi_fiber", 0, "closed form: chi(S^1)");
  add(e, "V0", 0, "closed form: flat");
  add(e, "V1", 0, "closed form: odd codimension");
  add(e, "V2", vol, "closed form: 4 pi^2 sqrt(1 - c^2)");
  add(e, "volume", vol, "closed form: 4 pi^2 sqrt(1 - c^2)");
  add(e, "target_V1", 0, "closed form: chi(S^1) V_1(S^1) = 0");
  return e;
}

Entry make_sphere2_embedded(const Params& p) {
  ParamReader rd("sphere2_embedded", p);
  const double r = rd.get("r", 1.0);
  rd.require(r > 0, "r must be positive");
  rd.finish();
  Entry e = make_sphere(r == 1.0 ? Params{} : Params{{"r", r}});
  e.name = "sphere2_embedded";
  e.params = p;
  auto emb = std::make_shared<Embedding>();
  emb->param = sphere_chart(r)->box();
  const std::string rs = num(r);
  for (const char* s : {"*sin(x0)*cos(x1)", "*sin(x0)*sin(x1)", "*cos(x0)"})
    emb->coords.push_back(parse_expr(rs + s, 2));
  emb->bbox = make_box({{-r, r}, {-r, r}, {-r, r}}, {false, false, false});
  emb->reach = r;
  e.embedding = std::move(emb);
  add(e, "reach", r, "closed form: radius");
  return e;
}

Entry make_ring_torus_embedded(const Params& p) {
  ParamReader rd("ring_torus_embedded", p);
  const double big_r = rd.get("R", 2.0), r = rd.get("r", 1.0);
  rd.require(r > 0 && big_r > r, "need R > r > 0");
  rd.finish();
  Entry e = make_ring_torus(Params{{"R", big_r}, {"r", r}});
  e.name = "ring_torus_embedded";
  e.params = p;
  auto emb = std::make_shared<Embedding>();
  emb->param = ring_torus_chart(big_r, r)->box();
  const std::string w = "(" + num(big_r) + " + " + num(r) + "*cos(x0))";
  emb->coords.push_back(parse_expr(w + "*cos(x1)", 2));
  emb->coords.push_back(parse_expr(w + "*sin(x1)", 2));
  emb->coords.push_back(parse_expr(num(r) + "*sin(x0)", 2));
  const double out = big_r + r;
  emb->bbox = make_box({{-out, out}, {-out, out}, {-r, r}}, {false, false, false});
  emb->reach = std::min(r, big_r - r);
  e.embedding = std::move(emb);
  add(e, "reach", std::min(r, big_r - r), "closed form: min(r, R - r)");
  return e;
}

using Maker = Entry (*)(const Params&);

const std::vector<std::pair<std::string, Maker>>& catalogue() {
  static const std::vector<std::pair<std::string, Maker>> c = {
      {"sphere", make_sphere},
      {"flat_torus", make_flat_torus},
      {"ring_torus", make_ring_torus},
      {"product_s2_s1", make_product_s2_s1},
      {"warped_s2_over_s1", make_warped_s2_over_s1},
      {"flat_t2_over_s1", make_flat_t2_over_s1},
      {"torus_fiber_bundle", make_torus_fiber_bundle},
      {"coupled_t2_over_s1", make_coupled_t2_over_s1},
      {"sphere2_embedded", make_sphere2_embedded},
      {"ring_torus_embedded", make_ring_torus_embedded},
  };
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

std::optional<double> Entry::reference(const std::string& key) const {
  for (const auto& r : references)
    if (r.key == key) return r.value;
  return std::nullopt;
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> n = [] {
    std::vector<std::string> v;
    for (const auto& [name, maker] : catalogue()) v.push_back(name);
    return v;
  }();
  return n;
}

Entry make(const std::string& name, const Params& params) {
  for (const auto& [n, maker] : catalogue())
    if (n == name) return maker(params);
  throw InputError("unknown zoo entry '" + name + "'");
}

Params parse_params(std::string_view query) {
  Params p;
  while (!query.empty()) {
    const std::size_t amp = query.find('&');
    const std::string_view item = query.substr(0, amp);
    query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) throw InputError("malformed parameter '" + std::string(item) + "'");
    const std::string key(item.substr(0, eq));
    const std::string_view val = item.substr(eq + 1);
    double v = 0.0;
    const auto res = std::from_chars(val.data(), val.data() + val.size(), v);
    if (res.ec != std::errc{} || res.ptr != val.data() + val.size())
      throw InputError("parameter '" + key + "' is not a number");
    if (!p.emplace(key, v).second) throw InputError("repeated parameter '" + key + "'");
  }
  return p;
}

Entry load(const std::string& uri) {
  constexpr std::string_view kScheme = "zoo:";
  if (uri.rfind(kScheme, 0) == 0) {
    const std::string rest = uri.substr(kScheme.size());
    const std::size_t q = rest.find('?');
    const std::string name = rest.substr(0, q);
    return make(name, q == std::string::npos ? Params{} : parse_params(std::string_view(rest).substr(q + 1)));
  }
  const std::string text = read_file(uri);
  const nlohmann::json j = detail::parse_json_text(text);
  Entry e;
  e.name = uri;
  if (!j.is_object()) throw InputError("'" + uri + "' is not a JSON object");
  if (j.contains("total_chart")) {
    auto sc = std::make_shared<const SubmersionChart>(SubmersionChart::from_json_text(text));
    e.atlas = {sc->total_ptr()};
    e.submersion = std::move(sc);
  } else if (j.contains("coords")) {
    e.embedding = std::make_shared<const Embedding>(Embedding::from_json_text(text));
    if (j.contains("chart")) e.atlas = {std::make_shared<const Chart>(detail::chart_from_json(j.at("chart")))};
  } else {
    e.atlas = {std::make_shared<const Chart>(detail::chart_from_json(j))};
  }
  return e;
}

}  // namespace lk::zoo
