#include "selfsim/gamma_ci.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selfsim {

void RegularityRanges::validate() const {
  if (!(gamma_lo > 0.0 && gamma_lo < gamma_hi)) throw std::invalid_argument("ranges: need 0 < gamma_lo < gamma_hi");
  if (!(B_lo > 0.0 && B_lo <= B_hi)) throw std::invalid_argument("ranges: need 0 < B_lo <= B_hi");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("ranges: need 0 < epsilon < 1");
}

double g_lower(const RegularityRanges& r, int j1, int j2) {
  if (j2 <= j1) throw std::invalid_argument("g_lower: need j2 > j1");
  const double d = j2 - j1;
  double best = INFINITY;
  for (double B : {r.B_lo, r.B_hi})
    for (double g : {r.gamma_lo, r.gamma_hi}) best = std::min(best, B * (r.epsilon - std::pow(2.0, -d * g)));
  return best;
}

double g_upper(const RegularityRanges& r, int j1, int j2) {
  if (j2 <= j1) throw std::invalid_argument("g_upper: need j2 > j1");
  return r.B_hi * (1.0 + std::pow(2.0, -(j2 - j1) * r.gamma_lo));
}

std::pair<double, double> gamma_tilde_bounds(double delta_hat_val, double c_tilde, const RegularityRanges& r,
                                             int j1, int j2) {
  if (j1 <= 0) throw std::invalid_argument("gamma_tilde_bounds: need j1 >= 1");
  if (delta_hat_val < 0.0 || c_tilde < 0.0) throw std::invalid_argument("gamma_tilde_bounds: bad inputs");
  double lo = r.gamma_lo, hi = r.gamma_hi;
  double gl = g_lower(r, j1, j2);
  if (gl > 0.0) lo = (std::log2(gl) - std::log2(delta_hat_val + c_tilde)) / j1;
  double dm = delta_hat_val - c_tilde;
  if (dm > 0.0) hi = (std::log2(g_upper(r, j1, j2)) - std::log2(dm)) / j1;
  lo = std::clamp(lo, r.gamma_lo, r.gamma_hi);
  hi = std::clamp(hi, r.gamma_lo, r.gamma_hi);
  return {lo, hi};
}

std::vector<std::pair<int, int>> default_pairs(const LevelRange& J) {
  std::vector<std::pair<int, int>> p;
  for (int a = J.lo; a <= J.hi; ++a)
    for (int b = a + 2; b <= J.hi; ++b) p.emplace_back(a, b);
  return p;
}

GammaInterval gamma_interval_from(const std::vector<std::vector<double>>& dhat, const CriticalValueRule& rule,
                                  const RegularityRanges& r, const std::vector<std::pair<int, int>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("gamma_interval: empty pair list");
  GammaInterval out;
  double lo = -INFINITY, hi = INFINITY;
  GammaWitness wl, wu;
  for (auto [j1, j2] : pairs) {
    if (j1 >= j2 || !rule.J.contains(j1) || !rule.J.contains(j2))
      throw std::invalid_argument("gamma_interval: pair outside J_n or not ordered");
    double d = dhat[static_cast<std::size_t>(j1 - rule.J.lo)][static_cast<std::size_t>(j2 - rule.J.lo)];
    auto [a, b] = gamma_tilde_bounds(d, tilde_critical(rule, j1, j2), r, j1, j2);
    if (a > lo) lo = a, wl = {j1, j2, false};
    if (b < hi) hi = b, wu = {j1, j2, true};
  }
  out.witnesses = {wl, wu};
  if (lo > hi) {
    out.crossed = true;
    std::swap(lo, hi);
  }
  out.lo = lo;
  out.hi = hi;
  return out;
}

GammaInterval gamma_interval(const Observation& obs, const Kernel& K, const CriticalValueRule& rule,
                             const RegularityRanges& r, const std::vector<std::pair<int, int>>& pairs) {
  auto est = kernel_estimates(obs, K, rule.J.levels());
  return gamma_interval_from(pairwise_sup(est), rule, r, pairs);
}

}  // namespace selfsim
