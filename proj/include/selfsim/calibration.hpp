#pragma once

#include <cstdint>
#include <vector>

#include "selfsim/grid.hpp"
#include "selfsim/kernel.hpp"

namespace selfsim {

struct LevelRange {
  int lo = 2;
  int hi = 2;
  std::vector<int> levels() const;
  bool contains(int j) const { return j >= lo && j <= hi; }
  std::size_t size() const { return hi >= lo ? static_cast<std::size_t>(hi - lo + 1) : 0; }
};

// Lower level max(2, ceil(log2 log2 n)); upper level j_max of the grid.
LevelRange default_levels(double n, const Kernel& K, const Grid& g);

struct CriticalValueRule {
  double cbar = 1.0;
  double sigma_n = 1.0;
  LevelRange J;
};

// cbar sigma_n 2^{j/2} sqrt(j)
double critical_value(const CriticalValueRule& rule, int j);
double tilde_critical(const CriticalValueRule& rule, int j, int j2);

struct Calibration {
  double cbar = 0.0;
  double target = 0.0;
  std::vector<double> stats;  // sorted normalized sups, one per replication
};

// max_j sup_t |f_hat(t, j)| / (2^{j/2} sqrt j) for one pure noise draw, sigma_n = 1.
double noise_sup_statistic(const Kernel& K, const LevelRange& J, const Grid& g, std::uint64_t seed);

Calibration calibrate(const Kernel& K, const LevelRange& J, double target, int reps, const Grid& g,
                      std::uint64_t seed, int workers = 1);
double calibrate_cbar(const Kernel& K, const LevelRange& J, double target, int reps, const Grid& g,
                      std::uint64_t seed, int workers = 1);

// Empirical quantile: smallest order statistic with ECDF >= p.
double empirical_quantile(std::vector<double> xs, double p);

// Event checks against known projections; est and proj are per-level rows
// over the unit nodes, ordered as rule.J.levels().
// event4: sup |est_j - proj_j| <= c(j) at every level.
// event5: |Delta_hat(j1,j2) - Delta(j1,j2)| <= c~(j1,j2) for every pair.
double max_centered_ratio(const std::vector<std::vector<double>>& est,
                          const std::vector<std::vector<double>>& proj, const CriticalValueRule& rule);
bool event4(const std::vector<std::vector<double>>& est, const std::vector<std::vector<double>>& proj,
            const CriticalValueRule& rule);
bool event5(const std::vector<std::vector<double>>& est, const std::vector<std::vector<double>>& proj,
            const CriticalValueRule& rule);

// Pairwise sup distances between rows: D[a][b] = sup |row_a - row_b|.
std::vector<std::vector<double>> pairwise_sup(const std::vector<std::vector<double>>& rows);

}  // namespace selfsim
