#include "selfsim/band.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selfsim {

RegularityRanges BandConfig::effective_ranges() const {
  RegularityRanges r = ranges;
  r.epsilon = epsilon_tilde();
  r.B_lo *= tilde_c;
  r.B_hi *= tilde_c;
  return r;
}

GridFunction BandResult::lower() const {
  GridFunction g = center;
  for (double& v : g.values()) v -= half_width;
  return g;
}

GridFunction BandResult::upper() const {
  GridFunction g = center;
  for (double& v : g.values()) v += half_width;
  return g;
}

bool BandResult::contains(const GridFunction& f_unit) const {
  if (!feasible) return true;
  for (std::size_t i = 0; i < center.size(); ++i)
    if (std::abs(f_unit[i] - center[i]) > half_width) return false;
  return true;
}

double a_factor(double eps, int j1, int j2, int j, double gl, double gu) {
  if (!(gl > 0.0) || !(gu > 0.0) || gl > gu) throw std::invalid_argument("a_factor: need 0 < gl <= gu");
  double e1 = std::max((j1 - j) * gu, (j1 - j) * gl);
  double e2 = std::min((j2 - j) * gu, (j2 - j) * gl);
  return std::max(eps * std::pow(2.0, -e1) - std::pow(2.0, -e2), 0.0);
}

double bias_bound(double delta_upper, double a_val) {
  if (delta_upper < 0.0 || a_val < 0.0) throw std::invalid_argument("bias_bound: negative input");
  if (a_val == 0.0) return INFINITY;
  return delta_upper / a_val;
}

double triple_width(const std::vector<std::vector<double>>& dhat, const BandConfig& cfg, const GammaInterval& gi,
                    const Triple& t) {
  const auto& J = cfg.rule.J;
  double a = a_factor(cfg.epsilon_tilde(), t.j1, t.j2, t.j, gi.lo, gi.hi);
  double d = dhat[static_cast<std::size_t>(t.j1 - J.lo)][static_cast<std::size_t>(t.j2 - J.lo)];
  return critical_value(cfg.rule, t.j) + bias_bound(d + tilde_critical(cfg.rule, t.j1, t.j2), a);
}

BandChoice choose_band(const std::vector<std::vector<double>>& dhat, const BandConfig& cfg) {
  if (!(cfg.tilde_c >= 1.0)) throw std::invalid_argument("band: tilde_c must be >= 1");
  const auto& J = cfg.rule.J;
  BandChoice best;
  auto pairs = cfg.pairs.empty() ? default_pairs(J) : cfg.pairs;
  best.gamma = gamma_interval_from(dhat, cfg.rule, cfg.effective_ranges(), pairs);

  auto consider = [&](const Triple& t) {
    double w = triple_width(dhat, cfg, best.gamma, t);
    if (std::isfinite(w) && w < best.half_width) {
      best.half_width = w;
      best.chosen = t;
      best.feasible = true;
    }
  };
  if (!cfg.triples.empty()) {
    for (const Triple& t : cfg.triples) {
      if (!(J.contains(t.j) && J.contains(t.j1) && J.contains(t.j2) && t.j1 < t.j2))
        throw std::invalid_argument("band: triple outside J_n");
      consider(t);
    }
  } else {
    for (int j = J.lo; j <= J.hi; ++j)
      for (int d = 1; d <= J.hi - J.lo; ++d)
        for (int j1 = J.lo; j1 + d <= J.hi; ++j1) consider({j, j1, j1 + d});
  }
  return best;
}

BandResult build_band(const Observation& obs, const Kernel& K, const BandConfig& cfg) {
  auto levels = cfg.rule.J.levels();
  auto est = kernel_estimates(obs, K, levels);
  BandChoice c = choose_band(pairwise_sup(est), cfg);
  BandResult r;
  r.gamma = c.gamma;
  r.feasible = c.feasible;
  r.half_width = c.half_width;
  r.chosen = c.chosen;
  auto rng = obs.grid.unit_range();
  Grid ug = obs.grid.sub(rng.first, rng.second);
  int jc = c.feasible ? c.chosen.j : cfg.rule.J.lo;
  r.center = GridFunction(ug, est[static_cast<std::size_t>(jc - cfg.rule.J.lo)]);
  return r;
}

double width_bound(const BandConfig& cfg, const BandChoice& choice, double B, double gamma) {
  const Triple& t = choice.chosen;
  double a = a_factor(cfg.epsilon_tilde(), t.j1, t.j2, t.j, choice.gamma.lo, choice.gamma.hi);
  double num = B * (std::pow(2.0, -t.j1 * gamma) + std::pow(2.0, -t.j2 * gamma)) +
               2.0 * tilde_critical(cfg.rule, t.j1, t.j2);
  return critical_value(cfg.rule, t.j) + bias_bound(num, a);
}

double rho_gamma(double sigma, double B, double eps, double gamma) {
  return 2.0 / (2.0 * gamma + 1.0) * std::log2(B / (sigma * eps));
}

Triple j_schedule(double gamma, double rho, double n, int m1, int m2, std::optional<LevelRange> J) {
  if (!(m1 > m2 && m2 >= 1)) throw std::invalid_argument("j_schedule: need m1 > m2 >= 1");
  if (!(n > 2.0)) throw std::invalid_argument("j_schedule: need n > 2");
  int j = static_cast<int>(std::floor(rho + std::log2(n / std::log2(n)) / (2.0 * gamma + 1.0)));
  Triple t{j, j - m1, j - m2};
  if (t.j1 < 1) throw std::invalid_argument("j_schedule: j1 < 1");
  if (J && !(J->contains(t.j) && J->contains(t.j1) && J->contains(t.j2)))
    throw std::out_of_range("j_schedule: schedule exits J_n");
  return t;
}

double theoretical_width(double gamma, double B, double eps, double sigma, double n, double Cstar) {
  if (!(gamma > 0 && B > 0 && eps > 0 && eps < 1 && sigma > 0 && n > 0 && Cstar > 0))
    throw std::invalid_argument("theoretical_width: bad arguments");
  double s2 = sigma * sigma / n;
  if (s2 >= 1.0) throw std::invalid_argument("theoretical_width: need sigma_n < 1");
  double e = 1.0 / (2.0 * gamma + 1.0);
  return Cstar * std::pow(B / eps, e) * std::pow(s2 * std::log(1.0 / s2), gamma * e);
}

}  // namespace selfsim
