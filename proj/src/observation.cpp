#include "selfsim/observation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "selfsim/levels.hpp"
#include "selfsim/rng.hpp"

namespace selfsim {

std::vector<double> Observation::densities() const {
  std::vector<double> v(increments.size());
  const double h = grid.h();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = increments[i] / h;
  return v;
}

void noise_densities(const Grid& g, double sigma_n, std::uint64_t seed, std::vector<double>& v) {
  const std::size_t m = g.m;
  v.resize(m);
  const double s = sigma_n / std::sqrt(g.h());
  for (std::size_t p = 0; 2 * p < m; ++p) {
    auto z = normal_pair(seed, p);
    v[2 * p] = s * z[0];
    if (2 * p + 1 < m) v[2 * p + 1] = s * z[1];
  }
}

Observation synthesize(const GridFunction& f, double sigma, double n, const Grid& grid, std::uint64_t seed) {
  if (!(f.grid() == grid)) throw std::invalid_argument("synthesize: f is not defined on this grid");
  if (sigma < 0.0 || !(n > 0.0)) throw std::invalid_argument("synthesize: need sigma >= 0 and n > 0");
  Observation obs;
  obs.grid = grid;
  obs.sigma = sigma;
  obs.n = n;
  obs.seed = seed;
  const double h = grid.h();
  obs.increments.resize(grid.m);
  for (std::size_t i = 0; i < grid.m; ++i) obs.increments[i] = f.at_mid(i) * h;
  if (sigma > 0.0) {
    const double s = obs.sigma_n() * std::sqrt(h);
    for (std::size_t p = 0; 2 * p < grid.m; ++p) {
      auto z = normal_pair(seed, p);
      obs.increments[2 * p] += s * z[0];
      if (2 * p + 1 < grid.m) obs.increments[2 * p + 1] += s * z[1];
    }
  }
  return obs;
}

Observation synthesize(const GridFunction& f, double sigma, double n, std::uint64_t seed) {
  return synthesize(f, sigma, n, f.grid(), seed);
}

std::vector<std::vector<double>> kernel_estimates(const Observation& obs, const Kernel& K,
                                                  const std::vector<int>& levels) {
  const int jm = j_max(K, obs.grid);
  for (int j : levels)
    if (j > jm) throw std::invalid_argument("level " + std::to_string(j) + " exceeds j_max of the grid");
  auto bank = level_bank(K, obs.grid, levels);
  std::vector<std::vector<double>> out;
  bank->apply(obs.densities(), out);
  return out;
}

GridFunction kernel_estimate(const Observation& obs, const Kernel& K, int j) {
  auto out = kernel_estimates(obs, K, {j});
  auto r = obs.grid.unit_range();
  return GridFunction(obs.grid.sub(r.first, r.second), std::move(out[0]));
}

double delta_hat(const Observation& obs, const Kernel& K, int j, int j2) {
  if (j == j2) return 0.0;
  auto out = kernel_estimates(obs, K, {j, j2});
  double s = 0.0;
  for (std::size_t i = 0; i < out[0].size(); ++i) s = std::max(s, std::abs(out[0][i] - out[1][i]));
  return s;
}

void write_observation_csv(const std::string& path, const Observation& obs) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << std::setprecision(17);
  os << "# lo=" << obs.grid.lo << " hi=" << obs.grid.hi << " m=" << obs.grid.m << " sigma=" << obs.sigma
     << " n=" << obs.n << " seed=" << obs.seed << '\n';
  os << "x_mid,dY\n";
  for (std::size_t i = 0; i < obs.increments.size(); ++i) os << obs.grid.mid(i) << ',' << obs.increments[i] << '\n';
}

Observation read_observation_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  Observation obs;
  std::string line;
  double lo = 0, hi = 0;
  std::size_t m = 0;
  bool have_meta = false;
  std::vector<double> xs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string tok;
      while (ls >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "lo") lo = std::stod(v);
        else if (k == "hi") hi = std::stod(v);
        else if (k == "m") m = std::stoul(v);
        else if (k == "sigma") obs.sigma = std::stod(v);
        else if (k == "n") obs.n = std::stod(v);
        else if (k == "seed") obs.seed = std::stoull(v);
      }
      have_meta = true;
      continue;
    }
    if (line.rfind("x_mid", 0) == 0) continue;
    std::istringstream ls(line);
    std::string a, b;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    xs.push_back(std::stod(a));
    obs.increments.push_back(std::stod(b));
  }
  if (xs.size() < 2) throw std::runtime_error(path + ": too few rows");
  if (!have_meta) {
    double h = xs[1] - xs[0];
    lo = xs.front() - 0.5 * h;
    hi = xs.back() + 0.5 * h;
    m = xs.size();
  }
  if (m != obs.increments.size()) throw std::runtime_error(path + ": row count does not match m");
  obs.grid = Grid(lo, hi, m);
  return obs;
}

}  // namespace selfsim
