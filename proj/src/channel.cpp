#include "dipc/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dipc/numeric.hpp"

namespace dipc::channel {

ChannelParams ChannelParams::from_arrival_probs(const std::vector<double>& p,
                                                double symbol_period,
                                                double lambda,
                                                double cir_duration) {
  ChannelParams params;
  params.rho.clear();
  params.rho.reserve(p.size());
  for (double pk : p) {
    if (!(pk > 0.0) || pk > 1.0) {
      throw std::domain_error("arrival probabilities must lie in (0, 1]");
    }
    params.rho.push_back(pk * symbol_period);
  }
  params.lambda = lambda;
  params.symbol_period = symbol_period;
  params.cir_duration = cir_duration;
  params.validate();
  return params;
}

void ChannelParams::validate() const {
  if (rho.empty()) throw std::domain_error("channel needs at least one tap");
  for (double r : rho) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::domain_error("every tap weight rho_k must be positive");
    }
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error("interference mean lambda must be positive");
  }
  if (!(symbol_period > 0.0)) throw std::domain_error("symbol period must be positive");
  if (!(cir_duration > 0.0)) throw std::domain_error("CIR duration must be positive");
}

std::int64_t padded_length(std::int64_t n, const ChannelParams& params) {
  return n + params.taps() - 1;
}

double convolved_mean(std::span<const double> x, std::int64_t t,
                      const ChannelParams& params) {
  const auto n = static_cast<std::int64_t>(x.size());
  const std::int64_t n_bar = n + params.taps() - 1;
  if (t < 0 || t >= n_bar) {
    throw std::out_of_range("slot index " + std::to_string(t) +
                            " outside [0, " + std::to_string(n_bar) + ")");
  }
  double mean = params.lambda;
  for (std::int64_t k = 0; k < params.taps(); ++k) {
    const std::int64_t s = t - k;
    if (s < 0 || s >= n) continue;
    if (x[s] < 0.0) throw std::domain_error("codeword entries must be non-negative");
    mean += params.rho[k] * x[s];
  }
  return mean;
}

std::vector<std::int64_t> sample_output(std::span<const double> x,
                                        const ChannelParams& params,
                                        rng::Xoshiro256pp& gen) {
  const std::int64_t n_bar = padded_length(static_cast<std::int64_t>(x.size()), params);
  std::vector<std::int64_t> y(static_cast<std::size_t>(n_bar));
  for (std::int64_t t = 0; t < n_bar; ++t) {
    y[static_cast<std::size_t>(t)] = rng::poisson(gen, convolved_mean(x, t, params));
  }
  return y;
}

std::vector<std::int64_t> sample_output(std::span<const double> x,
                                        const ChannelParams& params,
                                        std::uint64_t seed) {
  rng::Xoshiro256pp gen(seed);
  return sample_output(x, params, gen);
}

double transition_log_prob(std::span<const std::int64_t> y,
                           std::span<const double> x,
                           const ChannelParams& params) {
  const std::int64_t n_bar = padded_length(static_cast<std::int64_t>(x.size()), params);
  if (static_cast<std::int64_t>(y.size()) != n_bar) {
    throw std::invalid_argument("output vector must have length n + K - 1");
  }
  std::vector<double> terms(y.size());
  for (std::int64_t t = 0; t < n_bar; ++t) {
    const double mu = convolved_mean(x, t, params);
    const auto yt = static_cast<double>(y[static_cast<std::size_t>(t)]);
    if (yt < 0.0) throw std::domain_error("observed counts must be non-negative");
    terms[static_cast<std::size_t>(t)] = -mu + yt * std::log(mu) - std::lgamma(yt + 1.0);
  }
  return numeric::pairwise_sum(terms);
}

}  // namespace dipc::channel
