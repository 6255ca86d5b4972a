#include "lk/chart.hpp"

#include "json_io.hpp"
#include "lk/error.hpp"

namespace lk {

double Box::measure() const {
  double m = 1.0;
  for (const auto& b : bounds) m *= b.length();
  return m;
}

bool Box::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (x[i] < bounds[i].lo || x[i] > bounds[i].hi) return false;
  return true;
}

Box Box::restricted(std::span<const int> dims) const {
  Box b;
  for (int d : dims) {
    b.bounds.push_back(bounds.at(d));
    b.periodic.push_back(periodic.at(d));
  }
  return b;
}

Eigen::MatrixXd JetMatrix::values() const {
  Eigen::MatrixXd g(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) g(i, j) = (*this)(i, j).value();
  return g;
}

MetricJet to_metric_jet(const JetMatrix& m) {
  const int n = m.dim();
  MetricJet mj{Eigen::MatrixXd(n, n), Tensor3d(n), Tensor4d(n)};
  for (int q = 0; q < n; ++q) {
    for (int r = q; r < n; ++r) {
      const Jet2d& c = m(q, r);
      mj.g(q, r) = mj.g(r, q) = c.value();
      for (int p = 0; p < n; ++p) {
        mj.dg(p, q, r) = mj.dg(p, r, q) = c.grad(p);
        for (int s = p; s < n; ++s) {
          const double h = c.hess(p, s);
          mj.ddg(p, s, q, r) = mj.ddg(s, p, q, r) = mj.ddg(p, s, r, q) = mj.ddg(s, p, r, q) = h;
        }
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(mj.g);
  if (llt.info() != Eigen::Success) throw NumericError("metric is not positive definite");
  return mj;
}

MetricJet restrict_metric_jet(const MetricJet& mj, std::span<const int> dims) {
  const int k = static_cast<int>(dims.size());
  MetricJet r{Eigen::MatrixXd(k, k), Tensor3d(k), Tensor4d(k)};
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      r.g(a, b) = mj.g(dims[a], dims[b]);
      for (int c = 0; c < k; ++c) {
        r.dg(c, a, b) = mj.dg(dims[c], dims[a], dims[b]);
        for (int d = 0; d < k; ++d) r.ddg(c, d, a, b) = mj.ddg(dims[c], dims[d], dims[a], dims[b]);
      }
    }
  return r;
}

MetricJet MetricPatch::metric_jet(std::span<const double> x) const {
  return to_metric_jet(metric_jets(x));
}

Eigen::MatrixXd MetricPatch::metric(std::span<const double> x) const {
  return metric_jets(x).values();
}

Chart::Chart(Box box, std::vector<std::vector<Expr>> upper, std::optional<Expr> weight)
    : box_(std::move(box)), upper_(std::move(upper)), weight_(std::move(weight)) {
  const int n = box_.dim();
  if (n < 1 || n > kMaxDim)
    throw InputError("chart dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  if (static_cast<int>(box_.periodic.size()) != n)
    throw InputError("periodic flags do not match the chart dimension");
  for (const auto& b : box_.bounds)
    if (!(b.hi > b.lo)) throw InputError("empty coordinate interval");
  if (static_cast<int>(upper_.size()) != n)
    throw InputError("metric must have one upper-triangle row per coordinate");
  for (int p = 0; p < n; ++p) {
    if (static_cast<int>(upper_[p].size()) != n - p)
      throw InputError("metric row " + std::to_string(p) + " must have " + std::to_string(n - p) +
                       " entries (upper triangle)");
    for (const auto& e : upper_[p])
      if (e.max_var() >= n) throw InputError("metric component references a coordinate >= dim");
  }
  if (weight_ && weight_->max_var() >= n)
    throw InputError("weight references a coordinate >= dim");
}

Chart Chart::from_strings(Box box, const std::vector<std::vector<std::string>>& upper,
                          const std::string& weight) {
  const int n = box.dim();
  std::vector<std::vector<Expr>> rows;
  for (const auto& row : upper) {
    std::vector<Expr> r;
    for (const auto& s : row) r.push_back(parse_expr(s, n));
    rows.push_back(std::move(r));
  }
  std::optional<Expr> w;
  if (!weight.empty()) w = parse_expr(weight, n);
  return Chart(std::move(box), std::move(rows), std::move(w));
}

const Expr& Chart::component(int p, int q) const {
  if (p > q) std::swap(p, q);
  return upper_[p][q - p];
}

JetMatrix Chart::metric_jets(std::span<const double> x) const {
  const int n = box_.dim();
  if (static_cast<int>(x.size()) != n) throw InputError("point dimension does not match chart");
  JetMatrix m(n);
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) m(p, q) = m(q, p) = eval_jet2(upper_[p][q - p], x);
  return m;
}

Eigen::MatrixXd Chart::metric(std::span<const double> x) const {
  const int n = box_.dim();
  Eigen::MatrixXd g(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) g(p, q) = g(q, p) = evaluate(upper_[p][q - p], x);
  return g;
}

double Chart::weight(std::span<const double> x) const {
  return weight_ ? evaluate(*weight_, x) : 1.0;
}

Chart Chart::from_json_text(std::string_view text) {
  return detail::chart_from_json(detail::parse_json_text(text));
}

std::string Chart::to_json_text() const { return detail::chart_to_json(*this).dump(2); }

namespace detail {

nlohmann::json parse_json_text(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

Box box_from_json(const nlohmann::json& j, int dim) {
  Box box;
  try {
    const auto& dom = j.at("domain");
    if (!dom.is_array() || static_cast<int>(dom.size()) != dim)
      throw InputError("domain must list one [a,b] interval per coordinate");
    for (const auto& iv : dom) {
      if (!iv.is_array() || iv.size() != 2) throw InputError("domain entries must be [a,b]");
      box.bounds.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
    if (j.contains("periodic")) {
      const auto& per = j.at("periodic");
      if (!per.is_array() || static_cast<int>(per.size()) != dim)
        throw InputError("periodic must list one flag per coordinate");
      for (const auto& f : per) box.periodic.push_back(f.get<bool>());
    } else {
      box.periodic.assign(dim, false);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed chart domain: ") + e.what());
  }
  return box;
}

Chart chart_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    if (dim < 1 || dim > kMaxDim) throw InputError("chart dim out of range");
    Box box = box_from_json(j, dim);
    std::vector<std::vector<Expr>> rows;
    const auto& metric = j.at("metric");
    if (!metric.is_array()) throw InputError("metric must be an array of rows");
    for (const auto& row : metric) {
      std::vector<Expr> r;
      for (const auto& s : row) r.push_back(parse_expr(s.get<std::string>(), dim));
      rows.push_back(std::move(r));
    }
    std::optional<Expr> w;
    if (j.contains("weight") && !j.at("weight").is_null())
      w = parse_expr(j.at("weight").get<std::string>(), dim);
    return Chart(std::move(box), std::move(rows), std::move(w));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed chart: ") + e.what());
  }
}

nlohmann::json chart_to_json(const Chart& c) {
  nlohmann::json j;
  const int n = c.dim();
  j["dim"] = n;
  for (const auto& b : c.box().bounds) j["domain"].push_back({b.lo, b.hi});
  for (bool p : c.box().periodic) j["periodic"].push_back(p);
  for (int p = 0; p < n; ++p) {
    nlohmann::json row = nlohmann::json::array();
    for (int q = p; q < n; ++q) row.push_back(to_string(c.component(p, q)));
    j["metric"].push_back(row);
  }
  if (c.weight_expr()) j["weight"] = to_string(*c.weight_expr());
  return j;
}

}  // namespace detail
}  // namespace lk
