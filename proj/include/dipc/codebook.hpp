#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dipc::codebook {

// Raised on malformed codebook files (the CLI maps it to its I/O exit code).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A = min(P_ave, P_max); codewords bounded by A satisfy both release-rate
// constraints.
double admissible_amplitude(double p_ave, double p_max);

struct PackingRadius {
  double theta_n;
  double r0;
};

// theta_n = a / n^{(1-(b+kappa))/2}, r0 = sqrt(n theta_n) = sqrt(a) n^{(1+b+kappa)/4}.
PackingRadius packing_radius(std::int64_t n, double kappa, double a, double b);

struct PackingParams {
  std::int64_t n = 1;
  double A = 1.0;      // admissible cube edge
  double a = 1.0;      // radius constant, > 0
  double b = 0.3;      // radius exponent offset, in (0, 1)
  double kappa = 0.0;  // ISI rate, in [0, 1)

  double theta_n() const { return packing_radius(n, kappa, a, b).theta_n; }
  double r0() const { return packing_radius(n, kappa, a, b).r0; }
  void validate() const;
};

struct Codebook {
  PackingParams params;
  std::int64_t m = 0;
  std::vector<double> data;  // row-major, m rows of n entries
  std::uint64_t seed = 0;
  // Length of the rejection streak when construction stopped and the budget
  // it was measured against; both -1 when the codebook was loaded from a
  // file (the serialized format does not carry them).
  std::int64_t saturation_evidence = -1;
  std::int64_t rejection_budget = -1;

  std::span<const double> codeword(std::int64_t i) const {
    return {data.data() + i * params.n, static_cast<std::size_t>(params.n)};
  }
};

struct ConstructOptions {
  std::int64_t max_rejections = 10000;
  // 0 keeps drawing until the rejection streak hits max_rejections
  // (saturation); a positive cap stops early once that many codewords fit.
  std::int64_t max_codewords = 0;
};

// Greedy randomized packing: draw uniform candidates in [0, A]^n, accept a
// candidate iff it keeps every pairwise distance >= 2 r0. Deterministic
// given the seed; the first candidate is always accepted.
Codebook construct_codebook(const PackingParams& params, std::uint64_t seed,
                            const ConstructOptions& opts = {});

double min_pairwise_distance(const Codebook& cb);  // +inf when m < 2
std::pair<std::int64_t, std::int64_t> closest_pair(const Codebook& cb);

struct PackingReport {
  std::int64_t m = 0;
  double r0 = 0.0;
  double min_pairwise_distance = 0.0;
  bool separation_ok = false;
  bool linf_ok = false;
  double covering_fraction = 0.0;
  bool covering_ok = false;
  double log2_density = 0.0;  // log2(M Vol(S(n, r0)) / A^n)
  double density = 0.0;       // exp2 of the above; may underflow to zero
  bool density_lower_ok = false;  // log2_density >= -n
  bool density_upper_ok = false;  // log2_density <= -0.599 n (loose at small n)
  bool degenerate_regime = false;  // 2 r0 >= A sqrt(n): at most a couple of spheres fit
  bool saturated = false;  // construction ran its full rejection budget
};

// Checks the packing invariants and the saturation covering property: every
// point of the cube should sit within 2 r0 of some center.
PackingReport verify_packing(const Codebook& cb, std::int64_t cover_samples,
                             std::uint64_t seed);

// log2 of 2^{-n} A^n / Vol(S(n, r0)), evaluated in log space.
double codebook_size_lower_bound(std::int64_t n, double A, double r0);

// Serialization: header line
//   #di-codebook v1 n=<n> A=<A> a=<a> b=<b> kappa=<k> seed=<s> M=<M>
// followed by M whitespace-separated rows of n decimal values.
void write_codebook(std::ostream& os, const Codebook& cb);
Codebook read_codebook(std::istream& is);
void save_codebook(const std::string& path, const Codebook& cb);
Codebook load_codebook(const std::string& path);

}  // namespace dipc::codebook
