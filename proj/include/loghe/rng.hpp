#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random numbers: draw k of a stream is a pure function of
// (seed, k), so any increment can be regenerated statelessly and streams can
// be sliced at arbitrary offsets without replaying the prefix.

namespace loghe {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Decorrelated per-stream seed (e.g. one per Monte Carlo replicate).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix64(master ^ mix64(stream + 0x632be59bd9b4e019ull));
}

/// Uniform draw in (0,1), 53-bit resolution, never exactly 0 or 1.
inline double counter_uniform(std::uint64_t seed, std::uint64_t k) noexcept {
  const std::uint64_t bits = mix64(seed ^ mix64(k));
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw k of the stream keyed by `seed` (Box-Muller).
inline double counter_normal(std::uint64_t seed, std::uint64_t k) noexcept {
  const double u1 = counter_uniform(seed, 2 * k);
  const double u2 = counter_uniform(seed, 2 * k + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace loghe
