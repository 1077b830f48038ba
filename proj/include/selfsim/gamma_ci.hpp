#pragma once

#include <utility>
#include <vector>

#include "selfsim/calibration.hpp"
#include "selfsim/kernel.hpp"
#include "selfsim/observation.hpp"

namespace selfsim {

struct RegularityRanges {
  double gamma_lo = 0.5;
  double gamma_hi = 2.5;
  double B_lo = 1.0;
  double B_hi = 16.0;
  double epsilon = 0.1;
  void validate() const;
};

struct GammaWitness {
  int j1 = 0;
  int j2 = 0;
  bool upper = false;
};

struct GammaInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool crossed = false;
  std::vector<GammaWitness> witnesses;
};

double g_lower(const RegularityRanges& r, int j1, int j2);
double g_upper(const RegularityRanges& r, int j1, int j2);
std::pair<double, double> gamma_tilde_bounds(double delta_hat_val, double c_tilde, const RegularityRanges& r,
                                             int j1, int j2);

// All (j1, j2) in J with j2 - j1 >= 2.
std::vector<std::pair<int, int>> default_pairs(const LevelRange& J);

// From precomputed Delta_hat (indexed by level offset within rule.J).
GammaInterval gamma_interval_from(const std::vector<std::vector<double>>& dhat, const CriticalValueRule& rule,
                                  const RegularityRanges& r, const std::vector<std::pair<int, int>>& pairs);
GammaInterval gamma_interval(const Observation& obs, const Kernel& K, const CriticalValueRule& rule,
                             const RegularityRanges& r, const std::vector<std::pair<int, int>>& pairs);

}  // namespace selfsim
