#pragma once

#include <cmath>
#include <cstdint>

namespace wpmec {

// Counter-addressable pseudo-random source. Every draw is a pure function of
// (seed, stream, index, draw), so frame t can be regenerated without touching
// frames 1..t-1 and independent subsystems never share a stream.
namespace rng {

// Stream ids; one per consumer so reseeding one subsystem never shifts another.
enum Stream : std::uint64_t {
  kTopology = 0,
  kChannel = 1,
  kNetInit = 2,
  kReplay = 3,
  kOnOff = 4,
};

namespace detail {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace detail

inline std::uint64_t word(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index, std::uint64_t draw) {
  using detail::kGamma;
  using detail::mix;
  std::uint64_t z = mix(seed + kGamma);
  z = mix(z + kGamma * (stream + 1));
  z = mix(z + kGamma * (index + 1));
  z = mix(z + kGamma * (draw + 1));
  return z;
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t index, std::uint64_t draw) {
  return static_cast<double>(word(seed, stream, index, draw) >> 11) * 0x1.0p-53;
}

inline double uniform_in(double lo, double hi, std::uint64_t seed,
                         std::uint64_t stream, std::uint64_t index,
                         std::uint64_t draw) {
  return lo + (hi - lo) * uniform(seed, stream, index, draw);
}

// Exp(1) by inverse CDF; exact and portable.
inline double exponential(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index, std::uint64_t draw) {
  const double u = uniform(seed, stream, index, draw);
  return -std::log1p(-u);
}

// Standard normal via Box-Muller; consumes draw pair (2*draw, 2*draw+1).
inline double normal(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t index, std::uint64_t draw) {
  const double u1 = uniform(seed, stream, index, 2 * draw);
  const double u2 = uniform(seed, stream, index, 2 * draw + 1);
  const double r = std::sqrt(-2.0 * std::log1p(-u1));
  return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace rng
}  // namespace wpmec
