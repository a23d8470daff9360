#pragma once

#include <cmath>
#include <cstdint>

namespace adausm {

// Counter-based randomness built on the SplitMix64 finalizer. Every draw is a
// pure function of (seed, key, index), so stochastic gradients can be replayed
// exactly without threading generator state through callers.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix64(mix64(a, b) ^ mix64(c + 0x2545f4914f6cdd1dULL));
}

// Uniform in [0, 1), 53 bits.
inline double uniform01(std::uint64_t bits) {
  return double(bits >> 11) * 0x1.0p-53;
}

inline double uniform01(std::uint64_t seed, std::uint64_t key, std::uint64_t i) {
  return uniform01(mix64(seed, key, i));
}

// Zero mean, variance sigma^2, support bounded by sqrt(3)*sigma. Bounded
// support keeps declared second-moment bounds certifiable.
inline double bounded_noise(double sigma, std::uint64_t seed, std::uint64_t key,
                            std::uint64_t i) {
  return sigma * 1.7320508075688772 * (2.0 * uniform01(seed, key, i) - 1.0);
}

// Standard normal via Box-Muller; uses two counter draws per value.
inline double standard_normal(std::uint64_t seed, std::uint64_t key, std::uint64_t i) {
  // u1 in (0, 1] so the log stays finite.
  double u1 = double((mix64(seed, key, 2 * i) >> 11) + 1) * 0x1.0p-53;
  double u2 = uniform01(seed, key, 2 * i + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace adausm
