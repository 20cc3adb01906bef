#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dipc/channel.hpp"

namespace dipc::decoder {

// Threshold tau_n = c rho0^2 theta_n with 0 < c < 2.
double decoding_threshold(double theta_n, double rho0, double c_const);

struct DecoderConfig {
  double c_const = 1.0;
  double tau_n = 0.0;

  static DecoderConfig make(double theta_n, double rho0, double c_const) {
    return DecoderConfig{c_const, decoding_threshold(theta_n, rho0, c_const)};
  }
  void validate() const;
};

// Interference seen at slot t from everything except the current symbol:
// lambda + sum_{k>=1} rho_k cw_{t-k}, zero-padded outside the codeword.
double isi_interference(std::span<const double> cw, std::int64_t t,
                        const channel::ChannelParams& params);

// Per-slot constants of the decoding metric for one hypothesis codeword.
// Monte Carlo loops evaluate the metric thousands of times against the same
// hypothesis; precomputing the convolutions keeps the trial loop O(n).
class MetricWorkspace {
 public:
  MetricWorkspace(std::span<const double> cw, const channel::ChannelParams& params);

  // T(y; cw) for the codeword the workspace was built from.
  double evaluate(std::span<const std::int64_t> y) const;

  // Allocation-free variant for tight trial loops; scratch is resized as
  // needed and may be shared across calls from one thread.
  double evaluate(std::span<const std::int64_t> y, std::vector<double>& scratch) const;

  std::int64_t padded_length() const { return n_bar_; }

 private:
  std::int64_t n_bar_;
  std::vector<double> shift_;      // rho0 cw_t + lambda
  std::vector<double> expected_;   // (rho0 cw_t + I_t) + (I_t - lambda)^2
};

// T(y; cw) = (1/n_bar) sum_t [ (y_t - (rho0 cw_t + lambda))^2
//                              - (rho0 cw_t + I_t) - (I_t - lambda)^2 ].
double decoding_metric(std::span<const std::int64_t> y, std::span<const double> cw,
                       const channel::ChannelParams& params);

// Membership in the decoding region: |T(y; cw)| <= tau_n (boundary included).
bool identify(std::span<const std::int64_t> y, std::span<const double> cw,
              const channel::ChannelParams& params, const DecoderConfig& cfg);

}  // namespace dipc::decoder
