#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dipc/channel.hpp"
#include "dipc/codebook.hpp"

namespace dipc::analysis {

// All reported rates and logarithms are base 2.

struct CapacityBounds {
  double lower;  // (1 - kappa) / 4
  double upper;  // 3/2 + kappa
};
CapacityBounds capacity_bounds(double kappa);

struct RateBounds {
  double lower;  // (1 - kappa) n^kappa log2(n) / (4 T_cir)   [bits/s]
  double upper;  // (3 + 2 kappa) n^kappa log2(n) / (2 T_cir) [bits/s]
};
RateBounds effective_rate_bounds(std::int64_t n, double kappa, double t_cir);

// ISI rate maximizing the effective-rate lower bound: 1 - 1/ln(n).
double kappa_max(double n);

struct OptimalIsiRate {
  double kappa_max;
  double reff_lower_at_max;  // log2(e) / (4 e T_cir) * n  [bits/s]
};
OptimalIsiRate optimal_isi_rate(std::int64_t n, double t_cir);

// Per-slot bound on Var[(Ybar_t)^2]:
// 6 (A+l)^4 (1 + e^{8/l} (1 + (A+l) + (A+l)^2 + (A+l)^3)).
double variance_upper_bound(double A, double lambda);

// Total over the padded block: n_bar times the per-slot bound.
double psi_var_upper_bound(std::int64_t n_bar, double A, double lambda);

// Chebyshev bound on the type-I error probability; may exceed 1 at small n
// and is reported raw.
double type1_error_bound(std::int64_t n, double kappa, double a, double b,
                         double c_const, double rho0, double A, double lambda);

struct Type2Bounds {
  double e0;  // 16 (rho0 + 1) A^3 / (c^2 rho0^2 a^2 n^b)
  double e1;  // per-slot variance bound / (4 (c-2)^2 rho0^4 a^2 n^{2 kappa + b})
  double total() const { return e0 + e1; }
};
Type2Bounds type2_event_bounds(std::int64_t n, double kappa, double a, double b,
                               double c_const, double rho0, double A, double lambda);

// log2 Vol(S(n, r)) = (n/2) log2(pi) + n log2(r) - log2 Gamma(n/2 + 1).
double sphere_log_volume(std::int64_t n, double r);

// Exact finite-n form of the achievable codebook count (log2), i.e.
// codebook_size_lower_bound evaluated at r0(n, a, b, kappa).
double achievable_log_m(std::int64_t n, double A, double a, double b, double kappa);

// Converse separation scale theta'_n = P_max / n^{1 + b + kappa}.
double converse_theta_prime(std::int64_t n, double kappa, double b, double p_max);

// Exact finite-n converse cap on log2 M:
// log2[ 2^{-0.599 n} P_max^n / Vol(S(n, lambda theta'_n / (2 rho0))) ].
double converse_log_m_cap(std::int64_t n, double kappa, double b, double p_max,
                          double lambda, double rho0);

struct PairMargin {
  std::int64_t i;
  std::int64_t j;
  // Worst (smallest) over both orientations of max_t |1 - d_j,t / d_i,t|.
  double margin_full;     // t scanned over all n + K - 1 slots
  double margin_first_n;  // t restricted to the first n slots
};

struct SeparationReport {
  double theta_prime = 0.0;
  bool pass_full = true;
  bool pass_first_n = true;
  double worst_margin_full;
  double worst_margin_first_n;
  std::vector<PairMargin> pairs;
};

// Pairwise separation check behind the converse: for every pair of
// codewords some slot must have |1 - d_j,t / d_i,t| > theta'_n, where
// d_i,t = rho0 c_i,t + I_t^{c_i}. Scans the full padded range and the
// first-n restriction; both verdicts are reported. p_max = 0 uses the
// codebook amplitude.
SeparationReport check_pairwise_separation(const codebook::Codebook& cb,
                                        const channel::ChannelParams& params,
                                        double b, double p_max = 0.0);

struct BoundsReport {
  std::int64_t n = 0;
  double kappa = 0.0;
  double capacity_lower = 0.0;
  double capacity_upper = 0.0;
  double reff_lower = 0.0;
  double reff_upper = 0.0;
  double kappa_max = 0.0;
  double reff_at_kappa_max = 0.0;
  double type1_bound = 0.0;
  double type2_e0_bound = 0.0;
  double type2_e1_bound = 0.0;
  double psi_var_ub = 0.0;  // over the padded block n_bar = n + K - 1
  double achievable_log_m = 0.0;
  double converse_log_m_cap = 0.0;
  double separation_theta_prime = 0.0;

  // Flat key/value view in a fixed order, for the CSV and JSON emitters.
  std::vector<std::pair<std::string, double>> as_kv() const;
};

BoundsReport make_bounds_report(std::int64_t n, double kappa, double t_cir,
                                double p_ave, double p_max, double lambda,
                                double rho0, double a, double b, double c_const);

}  // namespace dipc::analysis
