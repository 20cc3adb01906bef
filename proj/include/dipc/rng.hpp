#pragma once

#include <array>
#include <cstdint>

namespace dipc::rng {

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 (Steele, Lea, Flood). The linear state walk makes it easy to
// hand out provably disjoint seeding windows to parallel streams.
struct SplitMix64 {
  std::uint64_t state = 0;

  constexpr explicit SplitMix64(std::uint64_t s) : state(s) {}

  constexpr std::uint64_t next() {
    state += kGamma;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

// xoshiro256++ (Blackman & Vigna), state filled from SplitMix64 as the
// authors recommend.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), top 53 bits of the output word.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

// Counter-based stream derivation. Every (stream, index) pair owns a
// disjoint 4-state window of the SplitMix64 orbit anchored at base_seed, so
// distinct pairs yield distinct generators no matter which order (or thread)
// instantiates them. Requires stream < 2^32 and index < 2^32.
inline Xoshiro256pp make_stream(std::uint64_t base_seed, std::uint64_t stream,
                                std::uint64_t index) {
  const std::uint64_t p = (stream << 32) | (index & 0xffffffffULL);
  return Xoshiro256pp(base_seed + 4 * p * kGamma);
}

// Nestable variant: shifts the anchor far enough that make_stream windows
// derived from the result (with stream 0) cannot collide across different
// top-level streams. Requires stream < 2^30.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream) {
  return base_seed + (stream << 34) * kGamma;
}

// Poisson draw with the given mean: inversion by sequential search below
// mean 10, Hormann's PTRS transformed rejection at and above it.
std::int64_t poisson(Xoshiro256pp& gen, double mean);

}  // namespace dipc::rng
