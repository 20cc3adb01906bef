#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace oracles {

namespace {

struct Point {
  double x;
  double y;
};

double sq_dist(const Point& p, const Point& q) {
  return (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y);
}

std::vector<Point> square_grid(double A, double step) {
  std::vector<Point> pts;
  const auto cells = static_cast<std::int64_t>(std::floor(A / step + 0.5));
  for (std::int64_t i = 0; i <= cells; ++i) {
    for (std::int64_t j = 0; j <= cells; ++j) {
      pts.push_back({std::min(A, static_cast<double>(i) * step),
                     std::min(A, static_cast<double>(j) * step)});
    }
  }
  return pts;
}

}  // namespace

CountBracket interval_packing_bracket(double A, double min_sep) {
  const auto max_feasible =
      static_cast<std::int64_t>(std::floor(A / min_sep)) + 1;
  // One center at c blocks at most (c - min_sep, c + min_sep); a saturated
  // arrangement must block all of [0, A].
  const auto min_saturated =
      static_cast<std::int64_t>(std::ceil(A / (2.0 * min_sep)));
  return {std::max<std::int64_t>(min_saturated, 1), max_feasible};
}

CountBracket square_packing_bracket(double A, double min_sep, double step) {
  const double sep_sq = min_sep * min_sep;
  const auto pts = square_grid(A, step);

  bool pair_found = false;
  for (std::size_t i = 0; i < pts.size() && !pair_found; ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (sq_dist(pts[i], pts[j]) >= sep_sq) {
        pair_found = true;
        break;
      }
    }
  }

  bool triple_found = false;
  if (pair_found) {
    const auto coarse = square_grid(A, std::max(step, 0.05));
    std::vector<std::pair<std::size_t, std::size_t>> far_pairs;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      for (std::size_t j = i + 1; j < coarse.size(); ++j) {
        if (sq_dist(coarse[i], coarse[j]) >= sep_sq) far_pairs.emplace_back(i, j);
      }
    }
    for (const auto& [i, j] : far_pairs) {
      for (std::size_t k = 0; k < coarse.size() && !triple_found; ++k) {
        if (k == i || k == j) continue;
        triple_found = sq_dist(coarse[i], coarse[k]) >= sep_sq &&
                       sq_dist(coarse[j], coarse[k]) >= sep_sq;
      }
      if (triple_found) break;
    }
  }

  const std::int64_t max_feasible = triple_found ? 3 : (pair_found ? 2 : 1);
  const auto min_saturated = static_cast<std::int64_t>(
      std::ceil(A * A / (std::numbers::pi * sep_sq)));
  return {std::max<std::int64_t>(min_saturated, 1), max_feasible};
}

CountBracket disk_area_bracket(double A, double r0) {
  const double cover = 2.0 * r0;
  const auto lo = static_cast<std::int64_t>(
      std::ceil(A * A / (std::numbers::pi * cover * cover)));
  const auto hi = static_cast<std::int64_t>(
      std::floor((A + 2.0 * r0) * (A + 2.0 * r0) / (std::numbers::pi * r0 * r0)));
  return {std::max<std::int64_t>(lo, 1), hi};
}

double poisson_expect(double mean,
                      const std::function<double(std::int64_t)>& g) {
  const auto cap = static_cast<std::int64_t>(mean + 40.0 * std::sqrt(mean) + 60.0);
  double log_p = -mean;  // log pmf at 0
  double acc = 0.0;
  for (std::int64_t y = 0; y <= cap; ++y) {
    if (y > 0) log_p += std::log(mean) - std::log(static_cast<double>(y));
    acc += g(y) * std::exp(log_p);
  }
  return acc;
}

double ball_log2_volume_recursive(std::int64_t n, double r) {
  // V_1 = 2r, V_2 = pi r^2, V_n = V_{n-2} * 2 pi r^2 / n.
  double log2_v = (n % 2 == 1) ? std::log2(2.0 * r)
                               : std::log2(std::numbers::pi) + 2.0 * std::log2(r);
  for (std::int64_t d = (n % 2 == 1) ? 3 : 4; d <= n; d += 2) {
    log2_v += std::log2(2.0 * std::numbers::pi) + 2.0 * std::log2(r) -
              std::log2(static_cast<double>(d));
  }
  return log2_v;
}

SampleStats sample_stats(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(v.size() - 1),
          static_cast<std::int64_t>(v.size())};
}

}  // namespace oracles
