#pragma once

#include <optional>
#include <tuple>
#include <vector>

#include "selfsim/calibration.hpp"
#include "selfsim/gamma_ci.hpp"
#include "selfsim/grid.hpp"
#include "selfsim/kernel.hpp"
#include "selfsim/observation.hpp"

namespace selfsim {

struct Triple {
  int j = 0, j1 = 0, j2 = 0;
};

struct BandConfig {
  double epsilon = 0.1;  // class constant as given by the user
  double tilde_c = 1.0;  // bias constant, >= 1
  RegularityRanges ranges;  // user facing; epsilon and B are rescaled inside
  CriticalValueRule rule;
  std::vector<Triple> triples;                // empty: all of J^3 with j1 < j2
  std::vector<std::pair<int, int>> pairs;     // empty: default_pairs(rule.J)

  double epsilon_tilde() const { return epsilon / tilde_c; }
  // Ranges seen by the interval for gamma: epsilon / C, B scaled by C.
  RegularityRanges effective_ranges() const;
};

struct BandResult {
  GridFunction center;
  double half_width = 0.0;
  Triple chosen;
  GammaInterval gamma;
  bool feasible = false;

  GridFunction lower() const;
  GridFunction upper() const;
  bool contains(const GridFunction& f_unit) const;
};

double a_factor(double eps, int j1, int j2, int j, double gl, double gu);
double bias_bound(double delta_upper, double a_val);

// Half width for a fixed triple given Delta_hat and the gamma interval.
double triple_width(const std::vector<std::vector<double>>& dhat, const BandConfig& cfg, const GammaInterval& gi,
                    const Triple& t);

struct BandChoice {
  double half_width = INFINITY;
  Triple chosen;
  GammaInterval gamma;
  bool feasible = false;
};

// Core search on precomputed Delta_hat (indexed by level offset in rule.J).
BandChoice choose_band(const std::vector<std::vector<double>>& dhat, const BandConfig& cfg);

BandResult build_band(const Observation& obs, const Kernel& K, const BandConfig& cfg);

// Width bound when event4 and event5 hold: c(j) + (B (2^{-j1 g} + 2^{-j2 g}) + 2 c~)/a.
double width_bound(const BandConfig& cfg, const BandChoice& choice, double B, double gamma);

double rho_gamma(double sigma, double B, double eps, double gamma);
Triple j_schedule(double gamma, double rho, double n, int m1, int m2,
                  std::optional<LevelRange> J = std::nullopt);
double theoretical_width(double gamma, double B, double eps, double sigma, double n, double Cstar);

}  // namespace selfsim
