#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace lidar_aug {

// All randomness in this library flows through Rng so that augmented outputs
// are reproducible bit-for-bit across platforms. std::mt19937_64 is fully
// specified by the standard; the distribution transforms below are our own
// because the standard library's distributions are not portable.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Per-scene seed derivation: independent of scene order within a dataset.
inline std::uint64_t derive_scene_seed(std::uint64_t policy_seed,
                                       std::string_view scene_id) {
  return splitmix64(splitmix64(policy_seed) ^ fnv1a64(scene_id));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53 random mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // N(0, sigma^2) via Box-Muller; consumes exactly two uniforms per draw.
  double normal(double sigma) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return sigma * r * std::cos(6.283185307179586476925286766559 * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n), n >= 1. Lemire multiply-shift (biased by at
  // most 2^-64, identical on every platform).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace lidar_aug
