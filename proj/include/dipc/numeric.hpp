#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace dipc::numeric {

// Pairwise (cascade) summation. The decoding metric and the Monte Carlo
// reductions subtract nearly equal quantities, so plain left-to-right
// accumulation loses digits for long inputs.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 32) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double log2_gamma(double z) { return std::lgamma(z) / std::numbers::ln2; }

inline constexpr double kLog2E = std::numbers::log2e;

}  // namespace dipc::numeric
