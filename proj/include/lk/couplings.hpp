#pragma once

#include <cstdint>
#include <vector>

namespace lk {

/// A signed coupling [p, q]: e/2 columns, column k pairing the lower indices
/// (p[2k], p[2k+1]) with the upper indices (q[2k], q[2k+1]) of one factor
/// R^{q q}_{p p}. q is a permutation of p and `sign` is its parity.
struct Coupling {
  std::vector<int> p;
  std::vector<int> q;
  int sign = 1;

  friend bool operator==(const Coupling&, const Coupling&) = default;
  friend auto operator<=>(const Coupling&, const Coupling&) = default;
};

/// Parity (+1/-1) of the permutation taking the sequence p to q.
int permutation_sign(const std::vector<int>& p, const std::vector<int>& q);

/// Canonical representative: both index pairs of every column ascending,
/// columns ordered by their first lower index. The summand sgn * prod R is
/// invariant under this normalisation.
Coupling canonical_form(std::vector<int> p, std::vector<int> q);

/// Duplicate-free canonical couplings on indices 0..n-1 of degree e.
/// Throws InputError for odd e or e outside [0, n].
std::vector<Coupling> enumerate_couplings(int n, int e);

/// Number of raw ordered (p, q) tuples per canonical coupling: 2^e (e/2)!.
std::int64_t coupling_multiplicity(int e);

/// Flattened coupling list for the hot path: per coupling its sign and e/2
/// offsets into a row-major R^{pq}_{rs} tensor of dimension n.
struct CouplingTable {
  int n = 0;
  int e = 0;
  std::vector<int> signs;
  std::vector<std::uint32_t> offsets;

  std::size_t size() const noexcept { return signs.size(); }
};

/// Built once per (n, e) and cached for the life of the process.
const CouplingTable& coupling_table(int n, int e);

}  // namespace lk
