#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "selfsim/gamma_ci.hpp"
#include "selfsim/rng.hpp"
#include "selfsim/selfsim.hpp"

using namespace selfsim;

static RegularityRanges ranges(double glo, double ghi, double blo, double bhi, double eps) {
  RegularityRanges r;
  r.gamma_lo = glo, r.gamma_hi = ghi, r.B_lo = blo, r.B_hi = bhi, r.epsilon = eps;
  return r;
}

TEST_CASE("G bounds") {
  auto r = ranges(1, 2, 1, 2, 0.5);
  CHECK(g_lower(r, 3, 5) == doctest::Approx(0.25));
  auto r2 = ranges(1, 2, 1, 2, 0.1);
  double gl = g_lower(r2, 3, 4);
  CHECK(gl < 0.0);
  CHECK(gl == doctest::Approx(2.0 * (0.1 - 0.5)));
  auto r3 = ranges(1, 2, 1.5, 2, 0.999999);
  CHECK(g_lower(r3, 1, 60) == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(g_upper(r, 3, 5) == doctest::Approx(2.5));
  CHECK(g_upper(r, 1, 60) == doctest::Approx(2.0));
  for (int d = 1; d < 8; ++d) CHECK(g_upper(r2, 1, 1 + d) > g_lower(r2, 1, 1 + d));
  CHECK_THROWS(g_lower(r, 4, 4));
  CHECK_THROWS(g_upper(r, 5, 4));
}

TEST_CASE("gamma tilde bounds") {
  auto r = ranges(1, 2, 1, 2, 0.5);
  auto [lo, hi] = gamma_tilde_bounds(0.1, 0.4, r, 8, 10);
  CHECK(lo == 1.0);  // (-2 - (-1)) / 8 clamped up to gamma_lo
  CHECK(hi == 2.0);  // dhat - c <= 0
  auto rn = ranges(1, 2, 1, 2, 0.1);
  CHECK(gamma_tilde_bounds(0.001, 1e-5, rn, 3, 4).first == 1.0);  // G_lower <= 0
  // an interior value on both sides
  auto w = ranges(0.1, 5, 1, 2, 0.9);
  auto [a, b] = gamma_tilde_bounds(1e-3, 1e-4, w, 5, 12);
  CHECK(a == doctest::Approx((std::log2(g_lower(w, 5, 12)) - std::log2(1.1e-3)) / 5));
  CHECK(b == doctest::Approx((std::log2(g_upper(w, 5, 12)) - std::log2(0.9e-3)) / 5));
  CHECK_THROWS(gamma_tilde_bounds(0.1, 0.1, r, 0, 3));
}

TEST_CASE("pair sets and monotone information") {
  LevelRange J{3, 9};
  auto pairs = default_pairs(J);
  for (auto [a, b] : pairs) CHECK(b - a >= 2);
  CHECK(pairs.size() == 15);
  CriticalValueRule rule{1.5, 1e-3, J};
  auto r = ranges(0.5, 2.5, 1, 10, 0.3);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::vector<double>> d(J.size(), std::vector<double>(J.size(), 0.0));
    for (std::size_t a = 0; a < J.size(); ++a)
      for (std::size_t b = a + 1; b < J.size(); ++b) d[a][b] = d[b][a] = std::pow(10.0, -3.0 * U(rng));
    std::vector<std::pair<int, int>> sub(pairs.begin(), pairs.begin() + 5);
    auto small = gamma_interval_from(d, rule, r, sub);
    auto big = gamma_interval_from(d, rule, r, pairs);
    if (big.crossed || small.crossed) continue;
    CHECK(big.lo >= small.lo);
    CHECK(big.hi <= small.hi);
  }
  CHECK_THROWS(gamma_interval_from({}, rule, r, {}));
}

TEST_CASE("crossing is flagged") {
  LevelRange J{3, 7};
  CriticalValueRule rule{1.0, 1e-9, J};
  auto r = ranges(0.5, 2.5, 1, 1, 0.9);
  std::vector<std::vector<double>> d(J.size(), std::vector<double>(J.size(), 0.0));
  // huge differences at one pair force the upper bound low, tiny ones force the lower bound high
  d[0][2] = d[2][0] = 1e3;
  d[1][3] = d[3][1] = 1e-9;
  auto gi = gamma_interval_from(d, rule, r, {{3, 5}, {4, 6}});
  CHECK(gi.crossed);
  CHECK(gi.lo <= gi.hi);
  CHECK(gi.witnesses.size() == 2);
}

TEST_CASE("interval contains gamma on the pair event") {
  const Grid G(-0.25, 1.25, 1u << 12);
  Kernel K = Kernel::conv_poly();
  Profile psi = Profile::psi();
  auto s = make_series(SeriesRule::g_tilde, 1.0, 1.0, K, psi, G);
  auto f = g_tilde(s, psi, G);
  LevelRange J{4, j_max(K, G)};
  auto r = ranges(0.5, 2.0, 1, 16, 0.1);
  auto prof = bias_profile(K, f, 1.0, J.lo, J.hi);
  double bmin = *std::min_element(prof.begin(), prof.end()), bmax = *std::max_element(prof.begin(), prof.end());
  REQUIRE(bmax >= r.B_lo);
  REQUIRE(r.epsilon * bmax <= bmin);  // member of the class with B = bmax
  auto levels = J.levels();
  std::vector<std::vector<double>> proj;
  for (int j : levels) proj.push_back(project(K, j, f).values());
  double cbar = calibrate_cbar(K, J, 0.9, 300, G, 8);

  // noiseless run
  CriticalValueRule r0{cbar, 1e-3, J};
  auto gi0 = gamma_interval(synthesize(f, 0.0, 1.0, 0), K, r0, r, default_pairs(J));
  CHECK(gi0.lo <= 1.0);
  CHECK(gi0.hi >= 1.0);

  const double sigma = 0.05, n = 1e4;
  CriticalValueRule rule{cbar, sigma / std::sqrt(n), J};
  int held = 0;
  for (int rep = 0; rep < 200; ++rep) {
    auto obs = synthesize(f, sigma, n, derive_seed(3, 0, rep));
    auto est = kernel_estimates(obs, K, levels);
    if (!event5(est, proj, rule)) continue;
    ++held;
    auto gi = gamma_interval_from(pairwise_sup(est), rule, r, default_pairs(J));
    REQUIRE(!gi.crossed);
    REQUIRE(gi.lo <= 1.0);
    REQUIRE(gi.hi >= 1.0);
  }
  CHECK(held > 150);
}
