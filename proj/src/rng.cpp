#include "dipc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace dipc::rng {

namespace {

// Inversion by sequential search (Devroye ch. X.3): walk the pmf until the
// cumulative mass passes a uniform draw. Expected cost grows linearly in the
// mean, so this is reserved for small means.
std::int64_t poisson_inversion(Xoshiro256pp& gen, double mean) {
  const double u = gen.uniform01();
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  // Float saturation of the cdf can strand u above it; the cap is far out in
  // the tail (mean < 10 here) and is hit with negligible probability.
  const std::int64_t cap = 512;
  while (u > cdf && k < cap) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

// Transformed rejection with squeeze (Hormann's PTRS). Constants follow the
// published algorithm; acceptance is ~75% at mean 10 rising toward ~89%.
std::int64_t poisson_ptrs(Xoshiro256pp& gen, double mean) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  while (true) {
    double u = gen.uniform01() - 0.5;
    const double v = gen.uniform01();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (kf < 0.0) continue;
    const auto k = static_cast<std::int64_t>(kf);

    if (us >= 0.07 && v <= v_r) return k;
    if (us < 0.013 && v > us) continue;

    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = -mean + kf * log_mean - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return k;
  }
}

}  // namespace

std::int64_t poisson(Xoshiro256pp& gen, double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw std::domain_error("poisson: mean must be positive and finite");
  }
  return mean < 10.0 ? poisson_inversion(gen, mean) : poisson_ptrs(gen, mean);
}

}  // namespace dipc::rng
