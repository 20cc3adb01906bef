#include "dipc/decoder.hpp"

#include <cmath>
#include <stdexcept>

#include "dipc/numeric.hpp"

namespace dipc::decoder {

double decoding_threshold(double theta_n, double rho0, double c_const) {
  if (!(theta_n > 0.0)) throw std::domain_error("theta_n must be positive");
  if (!(rho0 > 0.0)) throw std::domain_error("rho0 must be positive");
  if (!(c_const > 0.0 && c_const < 2.0)) {
    throw std::domain_error("decoder constant c must lie in (0, 2)");
  }
  return c_const * rho0 * rho0 * theta_n;
}

void DecoderConfig::validate() const {
  if (!(c_const > 0.0 && c_const < 2.0)) {
    throw std::domain_error("decoder constant c must lie in (0, 2)");
  }
  if (std::isnan(tau_n) || tau_n < 0.0) {
    throw std::domain_error("threshold tau_n must be non-negative");
  }
}

double isi_interference(std::span<const double> cw, std::int64_t t,
                        const channel::ChannelParams& params) {
  const auto n = static_cast<std::int64_t>(cw.size());
  const std::int64_t n_bar = n + params.taps() - 1;
  if (t < 0 || t >= n_bar) throw std::out_of_range("slot index outside [0, n + K - 1)");
  double acc = params.lambda;
  for (std::int64_t k = 1; k < params.taps(); ++k) {
    const std::int64_t s = t - k;
    if (s < 0 || s >= n) continue;
    acc += params.rho[k] * cw[s];
  }
  return acc;
}

MetricWorkspace::MetricWorkspace(std::span<const double> cw,
                                 const channel::ChannelParams& params) {
  const auto n = static_cast<std::int64_t>(cw.size());
  n_bar_ = n + params.taps() - 1;
  shift_.resize(static_cast<std::size_t>(n_bar_));
  expected_.resize(static_cast<std::size_t>(n_bar_));
  const double rho0 = params.rho0();
  for (std::int64_t t = 0; t < n_bar_; ++t) {
    const double ct = (t < n) ? cw[t] : 0.0;
    const double it = isi_interference(cw, t, params);
    const double drift = it - params.lambda;
    shift_[static_cast<std::size_t>(t)] = rho0 * ct + params.lambda;
    expected_[static_cast<std::size_t>(t)] = (rho0 * ct + it) + drift * drift;
  }
}

double MetricWorkspace::evaluate(std::span<const std::int64_t> y) const {
  std::vector<double> scratch;
  return evaluate(y, scratch);
}

double MetricWorkspace::evaluate(std::span<const std::int64_t> y,
                                 std::vector<double>& scratch) const {
  if (static_cast<std::int64_t>(y.size()) != n_bar_) {
    throw std::invalid_argument("output vector must have length n + K - 1");
  }
  scratch.resize(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double dev = static_cast<double>(y[t]) - shift_[t];
    scratch[t] = dev * dev - expected_[t];
  }
  return numeric::pairwise_sum(scratch) / static_cast<double>(n_bar_);
}

double decoding_metric(std::span<const std::int64_t> y, std::span<const double> cw,
                       const channel::ChannelParams& params) {
  return MetricWorkspace(cw, params).evaluate(y);
}

bool identify(std::span<const std::int64_t> y, std::span<const double> cw,
              const channel::ChannelParams& params, const DecoderConfig& cfg) {
  return std::fabs(decoding_metric(y, cw, params)) <= cfg.tau_n;
}

}  // namespace dipc::decoder
