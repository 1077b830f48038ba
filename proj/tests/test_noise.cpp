#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "selfsim/observation.hpp"
#include "selfsim/rng.hpp"

using namespace selfsim;

static const Grid G(-0.25, 1.25, 1u << 12);

TEST_CASE("philox known answers") {
  // Reference values from an independent Philox4x32-10 implementation.
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == u32x4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({1, 0, 0, 0}, {0, 0}) == u32x4{0xf8e4cca4u, 0x5cb200dbu, 0xb1a574ebu, 0x097eff67u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        u32x4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        u32x4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal variates") {
  const std::uint64_t seed = derive_seed(42, 1, 0);
  const int n = 400000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    double z = normal_at(seed, static_cast<std::uint64_t>(i));
    s1 += z, s2 += z * z, s4 += z * z * z * z;
  }
  CHECK(std::abs(s1 / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(s4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
}

TEST_CASE("synthesize") {
  auto f = GridFunction::sample(G, [](double x) { return std::sin(3.0 * x); });
  auto o = synthesize(f, 0.0, 100.0, 5);
  for (std::size_t i = 0; i < G.m; i += 13) CHECK(o.increments[i] == f.at_mid(i) * G.h());
  auto a = synthesize(f, 2.0, 64.0, 77), b = synthesize(f, 2.0, 64.0, 77);
  CHECK(a.increments == b.increments);
  CHECK(a.sigma_n() == doctest::Approx(0.25));
  CHECK_THROWS(synthesize(f, -1.0, 1.0, 0));
  CHECK_THROWS(synthesize(f, 1.0, 0.0, 0));
  CHECK_THROWS(synthesize(f, 1.0, 1.0, Grid(0.0, 1.0, 64), 0));

  GridFunction zero(G);
  const int reps = 1000;
  double ss = 0;
  for (int r = 0; r < reps; ++r) {
    auto z = synthesize(zero, 1.0, 4.0, derive_seed(9, 0, r));
    double t = 0;
    for (double d : z.increments) t += d;
    ss += t * t;
  }
  double expect = 0.25 * (G.hi - G.lo);
  CHECK(std::abs(ss / reps - expect) < 0.15 * expect);
}

TEST_CASE("noiseless estimates equal projections") {
  auto f = GridFunction::sample(G, [](double x) { return std::exp(-x) * std::cos(5.0 * x); });
  auto o = synthesize(f, 0.0, 1.0, 0);
  for (const Kernel& K : {Kernel::conv_poly(), Kernel::wavelet_proj()}) {
    for (int j = 4; j <= j_max(K, G); ++j) {
      auto e = kernel_estimate(o, K, j);
      auto p = project(K, j, f);
      double sc = sup_norm_on(p, p.grid().lo, p.grid().hi);
      for (std::size_t i = 0; i < e.size(); ++i) REQUIRE(std::abs(e[i] - p[i]) <= 1e-12 * sc);
      for (int j2 = 4; j2 <= j_max(K, G); ++j2)
        CHECK(std::abs(delta_hat(o, K, j, j2) - delta_true(K, j, j2, f)) <= 1e-12);
    }
  }
  CHECK(delta_hat(synthesize(f, 1.0, 1.0, 3), Kernel::conv_poly(), 5, 5) == 0.0);
  CHECK_THROWS(kernel_estimate(o, Kernel::conv_poly(), j_max(Kernel::conv_poly(), G) + 1));
}

TEST_CASE("linearity") {
  Kernel K = Kernel::conv_poly();
  auto f1 = GridFunction::sample(G, [](double x) { return x * x; });
  auto f2 = GridFunction::sample(G, [](double x) { return std::sin(9.0 * x); });
  auto e12 = kernel_estimate(synthesize(f1 + f2, 0.0, 1.0, 0), K, 6);
  auto e1 = kernel_estimate(synthesize(f1, 0.0, 1.0, 0), K, 6);
  auto e2 = kernel_estimate(synthesize(f2, 0.0, 1.0, 0), K, 6);
  for (std::size_t i = 0; i < e12.size(); ++i) CHECK(std::abs(e12[i] - e1[i] - e2[i]) < 1e-12);
}

TEST_CASE("Monte Carlo mean and variance of the estimator") {
  Kernel K = Kernel::conv_poly();
  auto f = GridFunction::sample(G, [](double x) { return 1.0 + x; });
  const int j = 5;
  auto p = project(K, j, f);
  const std::size_t t = p.size() / 3;
  const double sigma = 1.0, n = 100.0, sn = sigma / std::sqrt(n);
  const int reps = 1000;
  double s1 = 0, s2 = 0, q1 = 0, q2 = 0;
  for (int r = 0; r < reps; ++r) {
    auto o = synthesize(f, sigma, n, derive_seed(123, 0, r));
    auto e = kernel_estimate(o, K, j);
    double x = e[t];
    if (r < 500) s1 += x, s2 += x * x;
    q1 += x, q2 += x * x;
  }
  double mean = s1 / 500, var = s2 / 500 - mean * mean;
  CHECK(std::abs(mean - p[t]) < 3.0 * std::sqrt(var / 500));
  double v = q2 / reps - (q1 / reps) * (q1 / reps);
  double expect = sn * sn * std::ldexp(1.0, j) * K.profile_l2sq();
  CHECK(std::abs(v - expect) < 0.15 * expect);
}

TEST_CASE("noise scale equivariance") {
  Kernel K = Kernel::conv_poly();
  auto f = GridFunction::sample(G, [](double x) { return std::cos(2.0 * x); });
  auto p = project(K, 6, f);
  const std::size_t t = p.size() / 2;
  auto var_at = [&](double sigma, std::uint64_t stream) {
    double s1 = 0, s2 = 0;
    const int reps = 600;
    for (int r = 0; r < reps; ++r) {
      auto e = kernel_estimate(synthesize(f, sigma, 1e4, derive_seed(5, stream, r)), K, 6);
      double d = e[t] - p[t];
      s1 += d, s2 += d * d;
    }
    return s2 / reps - (s1 / reps) * (s1 / reps);
  };
  double ratio = var_at(3.0, 1) / var_at(1.0, 2);
  CHECK(std::abs(ratio / 9.0 - 1.0) < 0.2);
}

TEST_CASE("observation csv") {
  auto f = GridFunction::sample(G, [](double x) { return x; });
  auto o = synthesize(f, 0.5, 16.0, 99);
  write_observation_csv("test_obs.csv", o);
  auto r = read_observation_csv("test_obs.csv");
  CHECK(r.grid == o.grid);
  CHECK(r.sigma == 0.5);
  CHECK(r.n == 16.0);
  CHECK(r.seed == 99);
  for (std::size_t i = 0; i < o.increments.size(); ++i) CHECK(r.increments[i] == o.increments[i]);
  std::remove("test_obs.csv");
}
