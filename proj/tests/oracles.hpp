#pragma once

#include <cstdint>
#include <functional>
#include <span>

// Brute-force reference computations used by the unit and acceptance suites.
// Everything here is independent of the library's implementation paths.
namespace oracles {

struct CountBracket {
  std::int64_t min_saturated;
  std::int64_t max_feasible;
};

// 1-D interval packing with centers in [0, A] pairwise >= min_sep apart.
// max_feasible = floor(A / min_sep) + 1 (left-to-right greedy is optimal);
// min_saturated comes from each center blocking at most 2 min_sep of length.
CountBracket interval_packing_bracket(double A, double min_sep);

// 2-D grid search in [0, A]^2 at the given step: largest M in {1, 2, 3}
// realizable with pairwise separation >= min_sep (triples use a coarser grid
// capped at 0.05 to stay tractable). min_saturated is the covering bound
// ceil(A^2 / (pi min_sep^2)).
CountBracket square_packing_bracket(double A, double min_sep, double step);

// Area bracket for saturated packings of separation 2 r0 in [0, A]^2:
// covering lower bound and disjoint-disk upper bound.
CountBracket disk_area_bracket(double A, double r0);

// E[g(Y)] for Y ~ Poisson(mean), truncated pmf summation.
double poisson_expect(double mean, const std::function<double(std::int64_t)>& g);

// log2 Vol of the n-ball via the dimension recursion
// V_n(r) = V_{n-2}(r) * 2 pi r^2 / n; no lgamma involved.
double ball_log2_volume_recursive(std::int64_t n, double r);

struct SampleStats {
  double mean;
  double var;  // unbiased
  std::int64_t count;
};
SampleStats sample_stats(std::span<const double> v);

}  // namespace oracles
