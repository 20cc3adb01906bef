#include "dipc/analysis.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dipc/decoder.hpp"
#include "dipc/numeric.hpp"

namespace dipc::analysis {

namespace {

void check_kappa(double kappa) {
  if (!(kappa >= 0.0 && kappa < 1.0)) {
    throw std::domain_error("ISI rate kappa must lie in [0, 1)");
  }
}

void check_error_bound_args(double a, double b, double c_const, double rho0,
                            double A, double lambda) {
  if (!(a > 0.0)) throw std::domain_error("constant a must be positive");
  if (!(b > 0.0 && b < 1.0)) throw std::domain_error("constant b must lie in (0, 1)");
  if (!(c_const > 0.0 && c_const < 2.0)) {
    throw std::domain_error("decoder constant c must lie in (0, 2)");
  }
  if (!(rho0 > 0.0)) throw std::domain_error("rho0 must be positive");
  if (A < 0.0) throw std::domain_error("amplitude A must be non-negative");
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
}

}  // namespace

CapacityBounds capacity_bounds(double kappa) {
  check_kappa(kappa);
  return {0.25 * (1.0 - kappa), 1.5 + kappa};
}

RateBounds effective_rate_bounds(std::int64_t n, double kappa, double t_cir) {
  check_kappa(kappa);
  if (n < 2) throw std::domain_error("effective rate needs n >= 2");
  if (!(t_cir > 0.0)) throw std::domain_error("CIR duration must be positive");
  const double nd = static_cast<double>(n);
  const double scale = std::pow(nd, kappa) * std::log2(nd) / t_cir;
  return {(1.0 - kappa) * scale / 4.0, (3.0 + 2.0 * kappa) * scale / 2.0};
}

double kappa_max(double n) {
  if (!(n > std::numbers::e)) {
    throw std::domain_error("kappa_max needs n > e so the optimum lies in (0, 1)");
  }
  return 1.0 - 1.0 / std::log(n);
}

OptimalIsiRate optimal_isi_rate(std::int64_t n, double t_cir) {
  if (n < 3) throw std::domain_error("optimal ISI rate needs n >= 3");
  if (!(t_cir > 0.0)) throw std::domain_error("CIR duration must be positive");
  const double nd = static_cast<double>(n);
  // Substituting kappa_max into the rate lower bound collapses it to a form
  // exactly linear in n: n^{kappa_max} = n/e and log2(n)/ln(n) = log2(e).
  const double reff = numeric::kLog2E / (4.0 * std::numbers::e * t_cir) * nd;
  return {kappa_max(nd), reff};
}

double variance_upper_bound(double A, double lambda) {
  if (A < 0.0) throw std::domain_error("amplitude A must be non-negative");
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
  const double s = A + lambda;
  const double poly = 1.0 + s + s * s + s * s * s;
  return 6.0 * s * s * s * s * (1.0 + std::exp(8.0 / lambda) * poly);
}

double psi_var_upper_bound(std::int64_t n_bar, double A, double lambda) {
  if (n_bar < 1) throw std::domain_error("n_bar must be >= 1");
  return static_cast<double>(n_bar) * variance_upper_bound(A, lambda);
}

double type1_error_bound(std::int64_t n, double kappa, double a, double b,
                         double c_const, double rho0, double A, double lambda) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  check_kappa(kappa);
  check_error_bound_args(a, b, c_const, rho0, A, lambda);
  const double num = variance_upper_bound(A, lambda);
  const double rho0_sq = rho0 * rho0;
  return num / (c_const * c_const * rho0_sq * rho0_sq * a * a *
                std::pow(static_cast<double>(n), kappa + b));
}

Type2Bounds type2_event_bounds(std::int64_t n, double kappa, double a, double b,
                               double c_const, double rho0, double A,
                               double lambda) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  check_kappa(kappa);
  check_error_bound_args(a, b, c_const, rho0, A, lambda);
  const double nd = static_cast<double>(n);
  const double rho0_sq = rho0 * rho0;
  const double e0 = 16.0 * (rho0 + 1.0) * A * A * A /
                    (c_const * c_const * rho0_sq * a * a * std::pow(nd, b));
  const double gap = c_const - 2.0;  // strictly negative given the range check
  const double e1 = variance_upper_bound(A, lambda) /
                    (4.0 * gap * gap * rho0_sq * rho0_sq * a * a *
                     std::pow(nd, 2.0 * kappa + b));
  return {e0, e1};
}

double sphere_log_volume(std::int64_t n, double r) {
  if (n < 1) throw std::domain_error("dimension n must be >= 1");
  if (!(r > 0.0)) throw std::domain_error("radius must be positive");
  const double nd = static_cast<double>(n);
  return 0.5 * nd * std::log2(std::numbers::pi) + nd * std::log2(r) -
         numeric::log2_gamma(0.5 * nd + 1.0);
}

double achievable_log_m(std::int64_t n, double A, double a, double b, double kappa) {
  const double r0 = codebook::packing_radius(n, kappa, a, b).r0;
  return codebook::codebook_size_lower_bound(n, A, r0);
}

double converse_theta_prime(std::int64_t n, double kappa, double b, double p_max) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  check_kappa(kappa);
  if (!(b > 0.0)) throw std::domain_error("constant b must be positive");
  if (!(p_max > 0.0)) throw std::domain_error("P_max must be positive");
  return p_max / std::pow(static_cast<double>(n), 1.0 + b + kappa);
}

double converse_log_m_cap(std::int64_t n, double kappa, double b, double p_max,
                          double lambda, double rho0) {
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
  if (!(rho0 > 0.0)) throw std::domain_error("rho0 must be positive");
  const double theta_prime = converse_theta_prime(n, kappa, b, p_max);
  const double r0 = lambda * theta_prime / (2.0 * rho0);
  const double nd = static_cast<double>(n);
  return nd * std::log2(p_max) - 0.599 * nd - sphere_log_volume(n, r0);
}

SeparationReport check_pairwise_separation(const codebook::Codebook& cb,
                                        const channel::ChannelParams& params,
                                        double b, double p_max) {
  params.validate();
  if (p_max == 0.0) p_max = cb.params.A;
  const std::int64_t n = cb.params.n;
  const std::int64_t n_bar = channel::padded_length(n, params);
  const double rho0 = params.rho0();

  SeparationReport rep;
  rep.theta_prime = converse_theta_prime(n, cb.params.kappa, b, p_max);
  rep.worst_margin_full = std::numeric_limits<double>::infinity();
  rep.worst_margin_first_n = std::numeric_limits<double>::infinity();

  // d_i,t = rho0 c_i,t + I_t^{c_i} > lambda, so the ratios below are safe.
  std::vector<std::vector<double>> d(static_cast<std::size_t>(cb.m));
  for (std::int64_t i = 0; i < cb.m; ++i) {
    auto& row = d[static_cast<std::size_t>(i)];
    row.resize(static_cast<std::size_t>(n_bar));
    const auto cw = cb.codeword(i);
    for (std::int64_t t = 0; t < n_bar; ++t) {
      const double ct = (t < n) ? cw[t] : 0.0;
      row[static_cast<std::size_t>(t)] =
          rho0 * ct + decoder::isi_interference(cw, t, params);
    }
  }

  for (std::int64_t i = 0; i < cb.m; ++i) {
    for (std::int64_t j = i + 1; j < cb.m; ++j) {
      double full = 0.0, first = 0.0;
      // The separation property quantifies over ordered pairs; keep the
      // weaker orientation so a pass means both directions pass.
      for (int orient = 0; orient < 2; ++orient) {
        const auto& di = d[static_cast<std::size_t>(orient == 0 ? i : j)];
        const auto& dj = d[static_cast<std::size_t>(orient == 0 ? j : i)];
        double max_full = 0.0, max_first = 0.0;
        for (std::int64_t t = 0; t < n_bar; ++t) {
          const double dev = std::fabs(1.0 - dj[static_cast<std::size_t>(t)] /
                                                 di[static_cast<std::size_t>(t)]);
          max_full = std::max(max_full, dev);
          if (t < n) max_first = std::max(max_first, dev);
        }
        if (orient == 0) {
          full = max_full;
          first = max_first;
        } else {
          full = std::min(full, max_full);
          first = std::min(first, max_first);
        }
      }
      rep.pairs.push_back({i, j, full, first});
      rep.worst_margin_full = std::min(rep.worst_margin_full, full);
      rep.worst_margin_first_n = std::min(rep.worst_margin_first_n, first);
      if (!(full > rep.theta_prime)) rep.pass_full = false;
      if (!(first > rep.theta_prime)) rep.pass_first_n = false;
    }
  }
  return rep;
}

std::vector<std::pair<std::string, double>> BoundsReport::as_kv() const {
  return {
      {"n", static_cast<double>(n)},
      {"kappa", kappa},
      {"capacity_lower", capacity_lower},
      {"capacity_upper", capacity_upper},
      {"reff_lower", reff_lower},
      {"reff_upper", reff_upper},
      {"kappa_max", kappa_max},
      {"reff_at_kappa_max", reff_at_kappa_max},
      {"type1_bound", type1_bound},
      {"type2_e0_bound", type2_e0_bound},
      {"type2_e1_bound", type2_e1_bound},
      {"psi_var_ub", psi_var_ub},
      {"achievable_log_m", achievable_log_m},
      {"converse_log_m_cap", converse_log_m_cap},
      {"separation_theta_prime", separation_theta_prime},
  };
}

BoundsReport make_bounds_report(std::int64_t n, double kappa, double t_cir,
                                double p_ave, double p_max, double lambda,
                                double rho0, double a, double b, double c_const) {
  const double A = codebook::admissible_amplitude(p_ave, p_max);
  BoundsReport rep;
  rep.n = n;
  rep.kappa = kappa;
  const auto cap = capacity_bounds(kappa);
  rep.capacity_lower = cap.lower;
  rep.capacity_upper = cap.upper;
  const auto reff = effective_rate_bounds(n, kappa, t_cir);
  rep.reff_lower = reff.lower;
  rep.reff_upper = reff.upper;
  const auto opt = optimal_isi_rate(n, t_cir);
  rep.kappa_max = opt.kappa_max;
  rep.reff_at_kappa_max = opt.reff_lower_at_max;
  rep.type1_bound = type1_error_bound(n, kappa, a, b, c_const, rho0, A, lambda);
  const auto t2 = type2_event_bounds(n, kappa, a, b, c_const, rho0, A, lambda);
  rep.type2_e0_bound = t2.e0;
  rep.type2_e1_bound = t2.e1;
  const double k_taps = std::round(std::pow(static_cast<double>(n), kappa));
  const std::int64_t n_bar = n + static_cast<std::int64_t>(k_taps) - 1;
  rep.psi_var_ub = psi_var_upper_bound(n_bar, A, lambda);
  rep.achievable_log_m = analysis::achievable_log_m(n, A, a, b, kappa);
  rep.converse_log_m_cap = analysis::converse_log_m_cap(n, kappa, b, p_max, lambda, rho0);
  rep.separation_theta_prime = converse_theta_prime(n, kappa, b, p_max);
  return rep;
}

}  // namespace dipc::analysis
