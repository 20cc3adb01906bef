#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dipc/analysis.hpp"
#include "dipc/channel.hpp"
#include "dipc/codebook.hpp"
#include "dipc/decoder.hpp"

namespace dipc::montecarlo {

struct Interval {
  double low;
  double high;
};

// Wilson score interval; well-behaved near empirical rates of 0 and 1.
Interval wilson_interval(std::int64_t successes, std::int64_t trials,
                         double z = 1.959963984540054);

struct ErrorEstimate {
  double p_hat = 0.0;
  std::int64_t failures = 0;
  std::int64_t trials = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  // Companion Chebyshev bound, reported raw (may exceed 1 at small n).
  double analytic_bound = 0.0;
};

struct MetricMoments {
  double mean = 0.0;
  double var = 0.0;
  double se_mean = 0.0;
  double se_var = 0.0;
  std::int64_t trials = 0;
};

namespace detail {

// Probability that the output of `sender` falls inside the decoding region
// of `hypothesis`. Shared by both error estimators; tests may call it with
// sender == hypothesis, which the public type-II API rejects.
ErrorEstimate estimate_acceptance(std::span<const double> sender,
                                  std::span<const double> hypothesis,
                                  const channel::ChannelParams& params,
                                  const decoder::DecoderConfig& cfg,
                                  std::int64_t trials, std::uint64_t seed,
                                  int threads);

}  // namespace detail

// P_e1(i): fraction of trials with |T(Y(i); c_i)| > tau_n.
ErrorEstimate estimate_type1(const codebook::Codebook& cb, std::int64_t i,
                             const channel::ChannelParams& params,
                             const decoder::DecoderConfig& cfg,
                             std::int64_t trials, std::uint64_t seed,
                             int threads = 0);

// P_e2(i, j), i != j: fraction of trials with |T(Y(i); c_j)| <= tau_n.
ErrorEstimate estimate_type2(const codebook::Codebook& cb, std::int64_t i,
                             std::int64_t j, const channel::ChannelParams& params,
                             const decoder::DecoderConfig& cfg,
                             std::int64_t trials, std::uint64_t seed,
                             int threads = 0);

// Sample mean/variance of T(Y(i); c_i) with standard errors.
MetricMoments estimate_metric_moments(const codebook::Codebook& cb, std::int64_t i,
                                      const channel::ChannelParams& params,
                                      std::int64_t trials, std::uint64_t seed,
                                      int threads = 0);

// Defaults are the shipped demo sweep: a two-tap channel whose decoding
// band-to-noise ratio sits where both error rates are visibly nonzero and
// shrink across the n grid.
struct ExperimentSpec {
  std::vector<std::int64_t> n_grid{32, 64, 128, 256};
  // Fixed tap count per cell; 0 derives K = round(n^kappa) instead.
  std::int64_t k_taps = 2;
  double kappa = 0.0;
  // uniform: p_k = 1/K. geometric: p_0 = 1/2, p_k = p_{k-1} * tap_decay
  // (a dominant first tap with a weak tail, as for an absorbing receiver).
  std::string profile = "geometric";
  double tap_decay = 0.05;
  double lambda = 0.2;
  double symbol_period = 2.0;
  double cir_duration = 4.0;
  double p_ave = 8.0;
  double p_max = 8.0;
  double a = 4.0;
  double b = 0.3;
  double c_const = 1.0;
  std::int64_t trials = 10000;
  std::uint64_t base_seed = 20260809;
  std::int64_t pair_budget = 32;
  std::int64_t message_budget = 8;
  // Codebook size cap per cell; saturating the packing is super-exponential
  // in n and the error estimates only need pairwise-separated codewords.
  std::int64_t m_cap = 64;
  std::int64_t max_rejections = 10000;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct EstimateRecord {
  std::int64_t i = -1;
  std::int64_t j = -1;
  ErrorEstimate est;
};

struct SweepCell {
  std::int64_t n = 0;
  std::int64_t k_taps = 1;
  double kappa = 0.0;
  std::int64_t m = 0;
  double amplitude = 0.0;
  double theta_n = 0.0;
  double r0 = 0.0;
  double tau_n = 0.0;
  double min_pairwise_distance = 0.0;
  std::uint64_t codebook_seed = 0;
  std::vector<EstimateRecord> type1;
  std::vector<EstimateRecord> type2;
  MetricMoments moments;
  double metric_var_bound = 0.0;  // psi_var_ub / n_bar^2
  std::string status = "ok";
};

struct ResultRow {
  std::int64_t n = 0;
  std::int64_t k_taps = 1;
  double kappa = 0.0;
  std::string kind;  // type1_max | type2_max | metric_mean | metric_var | error
  double empirical = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double analytic_bound = 0.0;
  bool dominance_ok = false;
  std::int64_t trials = 0;
  std::string detail;
  std::string status = "ok";
};

struct ResultTable {
  ExperimentSpec spec;
  std::vector<SweepCell> cells;
  std::vector<ResultRow> rows;
};

// Per n: build the codebook, evaluate the closed-form companions, estimate
// the headline (max over sampled messages / pairs) error rates, and emit one
// row per estimate kind. Deterministic given the experiment spec alone,
// independent of the thread count; per-cell failures land in the row status,
// never abort.
ResultTable run_sweep(const ExperimentSpec& spec);

// Channel for one sweep cell (profile + lambda + T_s); exposed for tests
// and the acceptance suite.
channel::ChannelParams cell_channel(const ExperimentSpec& spec, std::int64_t k_taps);

std::string to_csv(const ResultTable& table);
std::string to_json_string(const ResultTable& table);

}  // namespace dipc::montecarlo
