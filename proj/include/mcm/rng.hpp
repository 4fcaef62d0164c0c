#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace mcm {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Counter-based replication seed: two 64-bit lanes, each a splitmix chain
// over (base, fnv1a(policy), index) with distinct lane constants. The 128-bit
// result is fed to the engine through seed_seq.
inline Rng make_replication_rng(std::uint64_t base_seed, std::string_view policy_id,
                                std::uint64_t replication) {
  const std::uint64_t p = fnv1a64(policy_id);
  std::uint64_t lo = splitmix64(base_seed ^ 0x243F6A8885A308D3ULL);
  lo = splitmix64(lo ^ p);
  lo = splitmix64(lo ^ replication);
  std::uint64_t hi = splitmix64(base_seed ^ 0x13198A2E03707344ULL);
  hi = splitmix64(hi ^ (p + 0xA4093822299F31D0ULL));
  hi = splitmix64(hi ^ (replication * 0x082EFA98EC4E6C89ULL + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
                    static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32)};
  return Rng(seq);
}

inline Rng make_rng(std::uint64_t seed) { return make_replication_rng(seed, "", 0); }

// Uniform on [0,1) with 53 random bits; independent of the standard library's
// distribution implementations so streams are portable across toolchains.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// Uniform integer in [0, n) by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

template <class It>
void shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    std::iter_swap(first + static_cast<std::ptrdiff_t>(i - 1),
                   first + static_cast<std::ptrdiff_t>(uniform_index(rng, i)));
  }
}

}  // namespace mcm
