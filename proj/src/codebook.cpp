#include "dipc/codebook.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dipc/analysis.hpp"
#include "dipc/rng.hpp"

namespace dipc::codebook {

namespace {

double sq_distance(std::span<const double> u, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u[k] - v[k];
    acc += d * d;
  }
  return acc;
}

// Squared distance with early exit once the running sum crosses the bound;
// the accept/reject loop rejects most candidates on the first few axes.
bool closer_than(std::span<const double> u, std::span<const double> v, double bound_sq) {
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u[k] - v[k];
    acc += d * d;
    if (acc >= bound_sq) return false;
  }
  return true;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double admissible_amplitude(double p_ave, double p_max) {
  if (!(p_ave > 0.0) || !(p_max > 0.0)) {
    throw std::domain_error("release rate limits must be positive");
  }
  return std::min(p_ave, p_max);
}

PackingRadius packing_radius(std::int64_t n, double kappa, double a, double b) {
  if (n < 1) throw std::domain_error("codeword length n must be >= 1");
  if (!(kappa >= 0.0 && kappa < 1.0)) throw std::domain_error("kappa must lie in [0, 1)");
  if (!(a > 0.0)) throw std::domain_error("radius constant a must be positive");
  if (!(b > 0.0 && b < 1.0)) throw std::domain_error("constant b must lie in (0, 1)");
  const double nd = static_cast<double>(n);
  const double theta = a / std::pow(nd, 0.5 * (1.0 - (b + kappa)));
  return {theta, std::sqrt(nd * theta)};
}

void PackingParams::validate() const {
  packing_radius(n, kappa, a, b);  // checks n, kappa, a, b
  if (!(A > 0.0)) throw std::domain_error("cube edge A must be positive");
}

Codebook construct_codebook(const PackingParams& params, std::uint64_t seed,
                            const ConstructOptions& opts) {
  params.validate();
  if (opts.max_rejections < 1) throw std::domain_error("max_rejections must be >= 1");
  if (opts.max_codewords < 0) throw std::domain_error("max_codewords must be >= 0");

  const auto n = static_cast<std::size_t>(params.n);
  const double r0 = params.r0();
  const double min_dist_sq = 4.0 * r0 * r0;

  Codebook cb;
  cb.params = params;
  cb.seed = seed;

  rng::Xoshiro256pp gen(seed);
  std::vector<double> candidate(n);
  std::int64_t streak = 0;
  while (streak < opts.max_rejections &&
         (opts.max_codewords == 0 || cb.m < opts.max_codewords)) {
    for (auto& x : candidate) x = gen.uniform(0.0, params.A);
    bool ok = true;
    for (std::int64_t i = 0; i < cb.m; ++i) {
      if (closer_than(cb.codeword(i), candidate, min_dist_sq)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      cb.data.insert(cb.data.end(), candidate.begin(), candidate.end());
      ++cb.m;
      streak = 0;
    } else {
      ++streak;
    }
  }
  cb.saturation_evidence = streak;
  cb.rejection_budget = opts.max_rejections;
  return cb;
}

double min_pairwise_distance(const Codebook& cb) {
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < cb.m; ++i) {
    for (std::int64_t j = i + 1; j < cb.m; ++j) {
      best = std::min(best, sq_distance(cb.codeword(i), cb.codeword(j)));
    }
  }
  return std::sqrt(best);
}

std::pair<std::int64_t, std::int64_t> closest_pair(const Codebook& cb) {
  if (cb.m < 2) throw std::domain_error("closest_pair needs at least two codewords");
  double best = std::numeric_limits<double>::infinity();
  std::pair<std::int64_t, std::int64_t> arg{0, 1};
  for (std::int64_t i = 0; i < cb.m; ++i) {
    for (std::int64_t j = i + 1; j < cb.m; ++j) {
      const double d = sq_distance(cb.codeword(i), cb.codeword(j));
      if (d < best) {
        best = d;
        arg = {i, j};
      }
    }
  }
  return arg;
}

PackingReport verify_packing(const Codebook& cb, std::int64_t cover_samples,
                             std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(cb.params.n);
  const double r0 = cb.params.r0();
  const double cover_sq = 4.0 * r0 * r0;

  PackingReport rep;
  rep.m = cb.m;
  rep.r0 = r0;
  rep.min_pairwise_distance = min_pairwise_distance(cb);
  // Constructed books satisfy this exactly; the epsilon only absorbs the
  // decimal round-trip of serialized books.
  rep.separation_ok = rep.min_pairwise_distance >= 2.0 * r0 * (1.0 - 1e-12);

  rep.linf_ok = true;
  for (double v : cb.data) {
    if (v < 0.0 || v > cb.params.A) rep.linf_ok = false;
  }

  std::int64_t covered = 0;
  rng::Xoshiro256pp gen(seed);
  std::vector<double> point(n);
  for (std::int64_t s = 0; s < cover_samples; ++s) {
    for (auto& x : point) x = gen.uniform(0.0, cb.params.A);
    bool hit = false;
    for (std::int64_t i = 0; i < cb.m && !hit; ++i) {
      hit = sq_distance(cb.codeword(i), point) <= cover_sq;
    }
    covered += hit ? 1 : 0;
  }
  rep.covering_fraction =
      cover_samples > 0 ? static_cast<double>(covered) / static_cast<double>(cover_samples) : 0.0;
  rep.covering_ok = covered == cover_samples;

  const double nd = static_cast<double>(cb.params.n);
  rep.log2_density = std::log2(static_cast<double>(cb.m)) +
                     analysis::sphere_log_volume(cb.params.n, r0) -
                     nd * std::log2(cb.params.A);
  rep.density = std::exp2(rep.log2_density);
  rep.density_lower_ok = rep.log2_density >= -nd;
  rep.density_upper_ok = rep.log2_density <= -0.599 * nd;
  rep.degenerate_regime = 2.0 * r0 >= cb.params.A * std::sqrt(nd);
  rep.saturated = cb.rejection_budget > 0 &&
                  cb.saturation_evidence >= cb.rejection_budget;
  return rep;
}

double codebook_size_lower_bound(std::int64_t n, double A, double r0) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (!(A > 0.0) || !(r0 > 0.0)) throw std::domain_error("A and r0 must be positive");
  const double nd = static_cast<double>(n);
  return nd * std::log2(A) - nd - analysis::sphere_log_volume(n, r0);
}

void write_codebook(std::ostream& os, const Codebook& cb) {
  os << "#di-codebook v1 n=" << cb.params.n << " A=" << format_double(cb.params.A)
     << " a=" << format_double(cb.params.a) << " b=" << format_double(cb.params.b)
     << " kappa=" << format_double(cb.params.kappa) << " seed=" << cb.seed
     << " M=" << cb.m << "\n";
  for (std::int64_t i = 0; i < cb.m; ++i) {
    const auto row = cb.codeword(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0) os << ' ';
      os << format_double(row[k]);
    }
    os << "\n";
  }
}

namespace {

// Pulls "key=<value>" off the header token stream.
template <typename T>
T header_field(std::istringstream& is, const std::string& key) {
  std::string token;
  if (!(is >> token) || token.rfind(key + "=", 0) != 0) {
    throw FormatError("codebook header: expected field '" + key + "'");
  }
  std::istringstream value(token.substr(key.size() + 1));
  T out;
  if (!(value >> out) || !value.eof()) {
    throw FormatError("codebook header: bad value for '" + key + "'");
  }
  return out;
}

}  // namespace

Codebook read_codebook(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw FormatError("empty codebook file");
  std::istringstream hs(header);
  std::string magic, version;
  hs >> magic >> version;
  if (magic != "#di-codebook" || version != "v1") {
    throw FormatError("not a v1 codebook file");
  }

  Codebook cb;
  cb.params.n = header_field<std::int64_t>(hs, "n");
  cb.params.A = header_field<double>(hs, "A");
  cb.params.a = header_field<double>(hs, "a");
  cb.params.b = header_field<double>(hs, "b");
  cb.params.kappa = header_field<double>(hs, "kappa");
  cb.seed = header_field<std::uint64_t>(hs, "seed");
  const auto m = header_field<std::int64_t>(hs, "M");
  std::string extra;
  if (hs >> extra) throw FormatError("codebook header: trailing token '" + extra + "'");
  cb.params.validate();
  if (m < 1) throw FormatError("codebook must contain at least one codeword");

  cb.data.reserve(static_cast<std::size_t>(m * cb.params.n));
  for (std::int64_t i = 0; i < m; ++i) {
    for (std::int64_t k = 0; k < cb.params.n; ++k) {
      double v;
      if (!(is >> v)) {
        throw FormatError("codebook row " + std::to_string(i) +
                          ": expected " + std::to_string(cb.params.n) + " values");
      }
      cb.data.push_back(v);
    }
  }
  std::string trailing;
  if (is >> trailing) {
    throw FormatError("trailing content after the last codebook row");
  }
  cb.m = m;
  return cb;
}

void save_codebook(const std::string& path, const Codebook& cb) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  write_codebook(os, cb);
  if (!os) throw FormatError("failed writing '" + path + "'");
}

Codebook load_codebook(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open '" + path + "'");
  return read_codebook(is);
}

}  // namespace dipc::codebook
