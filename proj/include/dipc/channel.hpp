#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dipc/rng.hpp"

namespace dipc::channel {

// Discrete-time Poisson channel with K interference taps. rho[k] weights the
// symbol released k slots ago (tap probability already scaled by the symbol
// period); lambda is the mean interfering count per slot.
struct ChannelParams {
  std::vector<double> rho{1.0};
  double lambda = 1.0;
  double symbol_period = 1.0;  // T_s [s]
  double cir_duration = 1.0;   // T_cir [s]

  std::int64_t taps() const { return static_cast<std::int64_t>(rho.size()); }
  double rho0() const { return rho.front(); }

  // Builds rho from per-tap arrival probabilities p_k in (0,1].
  static ChannelParams from_arrival_probs(const std::vector<double>& p,
                                          double symbol_period, double lambda,
                                          double cir_duration);

  // Throws std::domain_error on any violated parameter range.
  void validate() const;
};

using Codeword = std::vector<double>;

// Output length for a codeword of length n: n + K - 1.
std::int64_t padded_length(std::int64_t n, const ChannelParams& params);

// Mean observed count at slot t (0-based, t in [0, n+K-1)): lambda plus the
// tap-weighted sum of the K most recent symbols. Symbols outside the
// codeword are zero.
double convolved_mean(std::span<const double> x, std::int64_t t,
                      const ChannelParams& params);

// One transmission: n+K-1 independent Poisson draws, slot t with mean
// convolved_mean(x, t).
std::vector<std::int64_t> sample_output(std::span<const double> x,
                                        const ChannelParams& params,
                                        rng::Xoshiro256pp& gen);
std::vector<std::int64_t> sample_output(std::span<const double> x,
                                        const ChannelParams& params,
                                        std::uint64_t seed);

// log V(y | x) in nats: sum_t [ -mu_t + y_t ln mu_t - ln(y_t!) ].
double transition_log_prob(std::span<const std::int64_t> y,
                           std::span<const double> x,
                           const ChannelParams& params);

}  // namespace dipc::channel
