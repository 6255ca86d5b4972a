#include "lk/couplings.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <mutex>

#include "lk/error.hpp"
#include "lk/jet.hpp"

namespace lk {
namespace {

void check_degree(int n, int e) {
  if (n < 0 || e < 0 || e > n) throw InputError("coupling degree must satisfy 0 <= e <= n");
  if (e % 2 != 0) throw InputError("coupling degree must be even");
}

// Perfect matchings of `items` (ascending) with pairs ascending and ordered by
// their first element.
void matchings(std::vector<int> items, std::vector<int>& current,
               std::vector<std::vector<int>>& out) {
  if (items.empty()) {
    out.push_back(current);
    return;
  }
  const int first = items.front();
  for (std::size_t k = 1; k < items.size(); ++k) {
    std::vector<int> rest;
    for (std::size_t m = 1; m < items.size(); ++m)
      if (m != k) rest.push_back(items[m]);
    current.push_back(first);
    current.push_back(items[k]);
    matchings(rest, current, out);
    current.resize(current.size() - 2);
  }
}

// Ordered assignment of `items` into consecutive unordered pairs.
void pair_sequences(const std::vector<int>& items, std::vector<int>& current,
                    std::vector<std::vector<int>>& out) {
  if (items.empty()) {
    out.push_back(current);
    return;
  }
  for (std::size_t a = 0; a < items.size(); ++a)
    for (std::size_t b = a + 1; b < items.size(); ++b) {
      std::vector<int> rest;
      for (std::size_t m = 0; m < items.size(); ++m)
        if (m != a && m != b) rest.push_back(items[m]);
      current.push_back(items[a]);
      current.push_back(items[b]);
      pair_sequences(rest, current, out);
      current.resize(current.size() - 2);
    }
}

void subsets(int n, int e, int start, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == e) {
    out.push_back(current);
    return;
  }
  for (int i = start; i < n; ++i) {
    current.push_back(i);
    subsets(n, e, i + 1, current, out);
    current.pop_back();
  }
}

}  // namespace

int permutation_sign(const std::vector<int>& p, const std::vector<int>& q) {
  const std::size_t m = p.size();
  if (q.size() != m) throw InputError("coupling rows have different lengths");
  std::vector<int> perm(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto it = std::find(p.begin(), p.end(), q[k]);
    if (it == p.end()) throw InputError("q is not a permutation of p");
    perm[k] = static_cast<int>(it - p.begin());
  }
  std::vector<bool> seen(m, false);
  int sign = 1;
  for (std::size_t k = 0; k < m; ++k) {
    if (seen[k]) continue;
    std::size_t len = 0;
    for (std::size_t j = k; !seen[j]; j = static_cast<std::size_t>(perm[j])) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

Coupling canonical_form(std::vector<int> p, std::vector<int> q) {
  if (p.size() != q.size() || p.size() % 2 != 0)
    throw InputError("coupling rows must have equal even length");
  const std::size_t cols = p.size() / 2;
  std::vector<std::array<int, 4>> column(cols);
  for (std::size_t k = 0; k < cols; ++k) {
    column[k] = {std::min(p[2 * k], p[2 * k + 1]), std::max(p[2 * k], p[2 * k + 1]),
                 std::min(q[2 * k], q[2 * k + 1]), std::max(q[2 * k], q[2 * k + 1])};
  }
  std::sort(column.begin(), column.end());
  Coupling c;
  for (const auto& col : column) {
    c.p.push_back(col[0]);
    c.p.push_back(col[1]);
    c.q.push_back(col[2]);
    c.q.push_back(col[3]);
  }
  c.sign = permutation_sign(c.p, c.q);
  return c;
}

std::vector<Coupling> enumerate_couplings(int n, int e) {
  check_degree(n, e);
  std::vector<Coupling> out;
  if (e == 0) {
    out.push_back(Coupling{});
    return out;
  }
  std::vector<std::vector<int>> sets;
  std::vector<int> cur;
  subsets(n, e, 0, cur, sets);
  for (const auto& s : sets) {
    std::vector<std::vector<int>> lower;
    cur.clear();
    matchings(s, cur, lower);
    std::vector<std::vector<int>> upper;
    cur.clear();
    pair_sequences(s, cur, upper);
    for (const auto& p : lower)
      for (const auto& q : upper) out.push_back(Coupling{p, q, permutation_sign(p, q)});
  }
  return out;
}

std::int64_t coupling_multiplicity(int e) {
  if (e < 0 || e % 2 != 0) throw InputError("coupling degree must be even and nonnegative");
  std::int64_t m = std::int64_t{1} << e;
  for (int k = 2; k <= e / 2; ++k) m *= k;
  return m;
}

const CouplingTable& coupling_table(int n, int e) {
  check_degree(n, e);
  if (n > kMaxDim) throw InputError("dimension exceeds the supported maximum");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<CouplingTable>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, e}];
  if (!slot) {
    auto t = std::make_unique<CouplingTable>();
    t->n = n;
    t->e = e;
    const auto un = static_cast<std::uint32_t>(n);
    for (const Coupling& c : enumerate_couplings(n, e)) {
      t->signs.push_back(c.sign);
      for (std::size_t k = 0; k + 1 < c.p.size(); k += 2) {
        const auto q1 = static_cast<std::uint32_t>(c.q[k]);
        const auto q2 = static_cast<std::uint32_t>(c.q[k + 1]);
        const auto p1 = static_cast<std::uint32_t>(c.p[k]);
        const auto p2 = static_cast<std::uint32_t>(c.p[k + 1]);
        t->offsets.push_back(((q1 * un + q2) * un + p1) * un + p2);
      }
    }
    slot = std::move(t);
  }
  return *slot;
}

}  // namespace lk
