#include "selfsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "selfsim/levels.hpp"
#include "selfsim/observation.hpp"
#include "selfsim/parallel.hpp"
#include "selfsim/rng.hpp"

namespace selfsim {

std::vector<int> LevelRange::levels() const {
  std::vector<int> v;
  for (int j = lo; j <= hi; ++j) v.push_back(j);
  return v;
}

LevelRange default_levels(double n, const Kernel& K, const Grid& g) {
  LevelRange J;
  J.lo = std::max(2, static_cast<int>(std::ceil(std::log2(std::log2(n)) - 1e-12)));
  J.hi = j_max(K, g);
  if (J.hi < J.lo) throw std::invalid_argument("default_levels: grid too coarse for the level range");
  return J;
}

double critical_value(const CriticalValueRule& rule, int j) {
  if (!rule.J.contains(j)) throw std::out_of_range("critical_value: level outside J_n");
  if (j < 1) throw std::out_of_range("critical_value: level must be >= 1");
  return rule.cbar * rule.sigma_n * std::pow(2.0, 0.5 * j) * std::sqrt(static_cast<double>(j));
}

double tilde_critical(const CriticalValueRule& rule, int j, int j2) {
  return critical_value(rule, j) + critical_value(rule, j2);
}

double noise_sup_statistic(const Kernel& K, const LevelRange& J, const Grid& g, std::uint64_t seed) {
  auto levels = J.levels();
  auto bank = level_bank(K, g, levels);
  std::vector<double> v;
  noise_densities(g, 1.0, seed, v);
  std::vector<std::vector<double>> out;
  bank->apply(v, out);
  double s = 0.0;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    double mx = 0.0;
    for (double x : out[l]) mx = std::max(mx, std::abs(x));
    s = std::max(s, mx / (std::pow(2.0, 0.5 * levels[l]) * std::sqrt(static_cast<double>(levels[l]))));
  }
  return s;
}

double empirical_quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  std::sort(xs.begin(), xs.end());
  double k = std::ceil(p * static_cast<double>(xs.size()) - 1e-12);
  auto idx = static_cast<std::size_t>(std::clamp(k, 1.0, static_cast<double>(xs.size()))) - 1;
  return xs[idx];
}

Calibration calibrate(const Kernel& K, const LevelRange& J, double target, int reps, const Grid& g,
                      std::uint64_t seed, int workers) {
  if (reps < 100) throw std::invalid_argument("calibrate: need at least 100 replications");
  if (J.size() == 0 || J.lo < 1) throw std::invalid_argument("calibrate: empty or invalid level range");
  if (!(target >= 0.5 && target < 1.0)) throw std::invalid_argument("calibrate: target must be in [0.5, 1)");
  Calibration c;
  c.target = target;
  c.stats.resize(static_cast<std::size_t>(reps));
  const std::uint64_t stream = 0xCA11B8A7Eull;
  level_bank(K, g, J.levels());
  parallel_for(c.stats.size(), workers, [&](std::size_t r) {
    c.stats[r] = noise_sup_statistic(K, J, g, derive_seed(seed, stream, r));
  });
  std::sort(c.stats.begin(), c.stats.end());
  c.cbar = empirical_quantile(c.stats, target);
  return c;
}

double calibrate_cbar(const Kernel& K, const LevelRange& J, double target, int reps, const Grid& g,
                      std::uint64_t seed, int workers) {
  return calibrate(K, J, target, reps, g, seed, workers).cbar;
}

double max_centered_ratio(const std::vector<std::vector<double>>& est,
                          const std::vector<std::vector<double>>& proj, const CriticalValueRule& rule) {
  auto levels = rule.J.levels();
  double worst = 0.0;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    double mx = 0.0;
    for (std::size_t i = 0; i < est[l].size(); ++i) mx = std::max(mx, std::abs(est[l][i] - proj[l][i]));
    double c = critical_value(rule, levels[l]);
    if (c > 0.0)
      worst = std::max(worst, mx / c);
    else if (mx > 0.0)
      worst = INFINITY;
  }
  return worst;
}

bool event4(const std::vector<std::vector<double>>& est, const std::vector<std::vector<double>>& proj,
            const CriticalValueRule& rule) {
  return max_centered_ratio(est, proj, rule) <= 1.0;
}

std::vector<std::vector<double>> pairwise_sup(const std::vector<std::vector<double>>& rows) {
  const std::size_t L = rows.size();
  std::vector<std::vector<double>> D(L, std::vector<double>(L, 0.0));
  for (std::size_t a = 0; a < L; ++a)
    for (std::size_t b = a + 1; b < L; ++b) {
      double mx = 0.0;
      for (std::size_t i = 0; i < rows[a].size(); ++i) mx = std::max(mx, std::abs(rows[a][i] - rows[b][i]));
      D[a][b] = D[b][a] = mx;
    }
  return D;
}

bool event5(const std::vector<std::vector<double>>& est, const std::vector<std::vector<double>>& proj,
            const CriticalValueRule& rule) {
  auto levels = rule.J.levels();
  auto Dh = pairwise_sup(est);
  auto D = pairwise_sup(proj);
  for (std::size_t a = 0; a < levels.size(); ++a)
    for (std::size_t b = a + 1; b < levels.size(); ++b)
      if (std::abs(Dh[a][b] - D[a][b]) > tilde_critical(rule, levels[a], levels[b])) return false;
  return true;
}

}  // namespace selfsim
