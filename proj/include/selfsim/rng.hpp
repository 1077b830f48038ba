#pragma once

// Counter based generator: Philox4x32-10 keyed by a 64-bit seed. The normal
// variate of index i depends only on (seed, i), so any subset of cells or
// replications can be generated independently and in any order.

#include <array>
#include <cmath>
#include <cstdint>

namespace selfsim {

using u32x4 = std::array<std::uint32_t, 4>;
using u32x2 = std::array<std::uint32_t, 2>;

inline u32x4 philox4x32(u32x4 ctr, u32x2 key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
    u32x4 nxt{static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
              static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    ctr = nxt;
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed for replication `rep` of stream `stream` under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t rep) {
  return splitmix64(splitmix64(master ^ splitmix64(stream + 0x632BE59BD9B4E019ull)) + rep);
}

// Standard normals Z_{2p}, Z_{2p+1} from block p via Box-Muller.
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t p) {
  u32x4 c{static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32), 0u, 0u};
  u32x2 k{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  u32x4 r = philox4x32(c, k);
  std::uint64_t a = (static_cast<std::uint64_t>(r[1]) << 32) | r[0];
  std::uint64_t b = (static_cast<std::uint64_t>(r[3]) << 32) | r[2];
  double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
  double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  double rad = std::sqrt(-2.0 * std::log(u1));
  double th = 2.0 * M_PI * u2;
  return {rad * std::cos(th), rad * std::sin(th)};
}

inline double normal_at(std::uint64_t seed, std::uint64_t i) { return normal_pair(seed, i / 2)[i % 2]; }

}  // namespace selfsim
