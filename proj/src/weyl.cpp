#include "lk/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "lk/error.hpp"

namespace lk {

LkSpec LkSpec::make(int n, int e) {
  LkSpec s;
  s.n = n;
  s.e = e;
  s.table = &coupling_table(n, e);
  s.normalization = std::pow(2.0 * std::numbers::pi, -0.5 * e) * kCouplingCalibration;
  return s;
}

double lk_integrand(const CurvatureBundle& bundle, const LkSpec& spec) {
  if (bundle.dim() != spec.n) throw InputError("curvature bundle dimension does not match LkSpec");
  if (spec.e == 0) return 1.0;
  const double* r = bundle.riemann_mixed.data();
  const std::size_t factors = static_cast<std::size_t>(spec.e / 2);
  const CouplingTable& t = *spec.table;
  const std::uint32_t* off = t.offsets.data();
  double sum = 0.0;
  for (std::size_t c = 0; c < t.size(); ++c, off += factors) {
    double prod = r[off[0]];
    for (std::size_t k = 1; k < factors; ++k) prod *= r[off[k]];
    sum += t.signs[c] * prod;
  }
  return sum;
}

namespace {

// All permutations of 0..n-1 with their parity.
void permutations(int n, std::vector<std::vector<int>>& perms, std::vector<int>& signs) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    perms.push_back(p);
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (p[i] > p[j]) ++inversions;
    signs.push_back(inversions % 2 == 0 ? 1 : -1);
  } while (std::next_permutation(p.begin(), p.end()));
}

}  // namespace

double gb_density_pfaffian(const CurvatureBundle& bundle, const Eigen::MatrixXd& g) {
  const int n = bundle.dim();
  if (n % 2 != 0) throw InputError("Pfaffian density requires an even dimension");
  if (n == 0) return 1.0;
  // Orthonormal frame E = L^{-T} with g = L L^T, so E^T g E = I.
  const Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw NumericError("metric is not positive definite");
  const Eigen::MatrixXd frame =
      llt.matrixL().transpose().solve(Eigen::MatrixXd::Identity(n, n));
  // Frame components of the curvature tensor.
  Tensor4d omega(n);
  const Tensor4d& r = bundle.riemann_lower;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double v = 0.0;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                  v += r(i, j, k, l) * frame(i, a) * frame(j, b) * frame(k, c) * frame(l, d);
          omega(a, b, c, d) = v;
        }
  // Omega_ab = 1/2 R_abcd theta^c ^ theta^d, so
  // Pf(Omega) = 1 / (2^n (n/2)!) sum_{sigma, tau} sgn(sigma) sgn(tau) prod_k R_{s s t t}.
  std::vector<std::vector<int>> perms;
  std::vector<int> signs;
  permutations(n, perms, signs);
  double sum = 0.0;
  for (std::size_t s = 0; s < perms.size(); ++s)
    for (std::size_t t = 0; t < perms.size(); ++t) {
      double prod = signs[s] * signs[t];
      for (int k = 0; k < n; k += 2)
        prod *= omega(perms[s][k], perms[s][k + 1], perms[t][k], perms[t][k + 1]);
      sum += prod;
    }
  double denom = std::pow(2.0, n);
  for (int k = 2; k <= n / 2; ++k) denom *= k;
  return std::pow(2.0 * std::numbers::pi, -0.5 * n) * sum / denom;
}

QuadratureResult intrinsic_volume(const Atlas& atlas, int i, const QuadratureOptions& opt) {
  if (atlas.empty()) throw InputError("empty atlas");
  const int n = atlas.front()->dim();
  for (const auto& p : atlas)
    if (p->dim() != n) throw InputError("atlas charts have different dimensions");
  if (i < 0 || i > n) throw InputError("intrinsic volume index must satisfy 0 <= i <= n");
  if ((n - i) % 2 != 0) return QuadratureResult{};
  if (i == n) return volume(atlas, opt);
  const LkSpec spec = LkSpec::make(n, n - i);
  return integrate(
      atlas,
      [&spec](std::span<const double>, const MetricJet& mj) {
        return spec.normalization * lk_integrand(curvature_bundle(mj), spec);
      },
      opt);
}

}  // namespace lk
