#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "selfsim/grid.hpp"
#include "selfsim/kernel.hpp"

namespace selfsim {

// Discretized white noise path: increments dY_i = f(x_i) h + sigma_n sqrt(h) Z_i.
struct Observation {
  Grid grid;
  std::vector<double> increments;
  double sigma = 1.0;
  double n = 1.0;
  std::uint64_t seed = 0;

  double sigma_n() const { return sigma / std::sqrt(n); }
  // Increments divided by h: the inputs of the kernel sums.
  std::vector<double> densities() const;
};

Observation synthesize(const GridFunction& f, double sigma, double n, const Grid& grid, std::uint64_t seed);
Observation synthesize(const GridFunction& f, double sigma, double n, std::uint64_t seed);

// Pure noise densities sigma_n Z_i / sqrt(h) written into v.
void noise_densities(const Grid& g, double sigma_n, std::uint64_t seed, std::vector<double>& v);

// f_hat(t, j) on the nodes inside [0, 1].
GridFunction kernel_estimate(const Observation& obs, const Kernel& K, int j);
// Estimates for several levels at once (rows follow `levels`).
std::vector<std::vector<double>> kernel_estimates(const Observation& obs, const Kernel& K,
                                                  const std::vector<int>& levels);
double delta_hat(const Observation& obs, const Kernel& K, int j, int j2);

void write_observation_csv(const std::string& path, const Observation& obs);
Observation read_observation_csv(const std::string& path);

}  // namespace selfsim
