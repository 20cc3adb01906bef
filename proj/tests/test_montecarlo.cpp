#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dipc/montecarlo.hpp"
#include "oracles.hpp"

using namespace dipc;
using doctest::Approx;

namespace {

montecarlo::ExperimentSpec small_spec() {
  montecarlo::ExperimentSpec spec;
  spec.n_grid = {8, 12};
  spec.trials = 400;
  spec.pair_budget = 4;
  spec.message_budget = 3;
  spec.m_cap = 8;
  spec.max_rejections = 2000;
  spec.base_seed = 4242;
  return spec;
}

codebook::Codebook two_word_book(std::int64_t n, double A, double lo, double hi) {
  codebook::Codebook cb;
  cb.params = {n, A, 1.0, 0.3, 0.0};
  cb.m = 2;
  cb.data.assign(static_cast<std::size_t>(2 * n), lo);
  for (std::int64_t k = 0; k < n; ++k) cb.data[static_cast<std::size_t>(n + k)] = hi;
  return cb;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("wilson interval: endpoints and containment") {
  const auto zero = montecarlo::wilson_interval(0, 50);
  CHECK(zero.low == Approx(0.0).epsilon(1e-15));
  CHECK(zero.high > 0.0);
  const auto one = montecarlo::wilson_interval(50, 50);
  CHECK(one.high == Approx(1.0).epsilon(1e-15));
  for (std::int64_t x : {0, 1, 7, 25, 49, 50}) {
    const auto ci = montecarlo::wilson_interval(x, 50);
    const double p = static_cast<double>(x) / 50.0;
    CHECK(ci.low <= p + 1e-15);
    CHECK(ci.high >= p - 1e-15);
  }
  CHECK_THROWS_AS((void)montecarlo::wilson_interval(5, 0), std::domain_error);
  CHECK_THROWS_AS((void)montecarlo::wilson_interval(6, 5), std::domain_error);
}

TEST_CASE("type-I estimate: threshold sentinels") {
  const auto cb = two_word_book(6, 4.0, 0.5, 3.5);
  channel::ChannelParams params;
  params.rho = {1.0};
  params.lambda = 1.0;

  const decoder::DecoderConfig everything{1.0, std::numeric_limits<double>::infinity()};
  const auto none = montecarlo::estimate_type1(cb, 0, params, everything, 500, 9, 2);
  CHECK(none.p_hat == 0.0);
  CHECK(none.failures == 0);

  const decoder::DecoderConfig nothing{1.0, 0.0};
  const auto all = montecarlo::estimate_type1(cb, 0, params, nothing, 500, 9, 2);
  CHECK(all.p_hat >= 0.99);  // T is almost never exactly zero
}

TEST_CASE("type-I and forced type-II are exact complements under a shared seed") {
  const auto cb = two_word_book(6, 4.0, 0.5, 3.5);
  channel::ChannelParams params;
  params.rho = {1.0};
  params.lambda = 1.0;
  const decoder::DecoderConfig cfg{1.0, 0.4};
  const std::uint64_t seed = 777;
  const auto t1 = montecarlo::estimate_type1(cb, 0, params, cfg, 800, seed, 3);
  const auto forced = montecarlo::detail::estimate_acceptance(
      cb.codeword(0), cb.codeword(0), params, cfg, 800, seed, 2);
  CHECK(t1.failures + forced.failures == 800);
  CHECK(t1.p_hat + forced.p_hat == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("type-II estimate: guard and separated pair") {
  const auto cb = two_word_book(16, 10.0, 0.0, 10.0);
  channel::ChannelParams params;
  params.rho = {1.0};
  params.lambda = 0.1;
  const auto cfg = decoder::DecoderConfig::make(cb.params.theta_n(), 1.0, 1.0);
  CHECK_THROWS_AS((void)montecarlo::estimate_type2(cb, 1, 1, params, cfg, 100, 5, 1),
                  std::invalid_argument);
  // Widely separated pair: outputs of the all-zero codeword never look like
  // the all-ten codeword.
  const auto est = montecarlo::estimate_type2(cb, 0, 1, params, cfg, 2000, 5, 2);
  CHECK(est.p_hat == 0.0);
  CHECK(est.analytic_bound > 0.0);
}

TEST_CASE("metric moments: zero-codeword oracle") {
  // K = 1, lambda = 1, all-zero codeword: T = (1/n) sum [(y_t - 1)^2 - 1]
  // with y_t ~ Pois(1), so Var[T] = Var[(Y-1)^2] / n.
  const std::int64_t n = 16;
  codebook::Codebook cb;
  cb.params = {n, 1.0, 1.0, 0.3, 0.0};
  cb.m = 1;
  cb.data.assign(static_cast<std::size_t>(n), 0.0);
  channel::ChannelParams params;
  params.rho = {1.0};
  params.lambda = 1.0;

  const double e2 = oracles::poisson_expect(1.0, [](std::int64_t y) {
    const double d = static_cast<double>(y) - 1.0;
    return d * d;
  });
  const double e4 = oracles::poisson_expect(1.0, [](std::int64_t y) {
    const double d = static_cast<double>(y) - 1.0;
    return d * d * d * d;
  });
  const double var_t = (e4 - e2 * e2) / static_cast<double>(n);

  const auto mom = montecarlo::estimate_metric_moments(cb, 0, params, 100000, 31, 0);
  CHECK(std::fabs(mom.mean) <= 5.0 * mom.se_mean);
  CHECK(std::fabs(mom.var - var_t) <= 5.0 * mom.se_var);
}

TEST_CASE("metric moments: expectation zero with ISI taps") {
  montecarlo::ExperimentSpec spec = small_spec();
  const auto params = montecarlo::cell_channel(spec, 2);
  codebook::PackingParams packing{12, 4.0, 1.0, 0.3, std::log2(2.0) / std::log2(12.0)};
  const auto cb = codebook::construct_codebook(packing, 88, {2000, 6});
  const auto mom = montecarlo::estimate_metric_moments(cb, 0, params, 50000, 77, 0);
  CHECK(std::fabs(mom.mean) <= 5.0 * mom.se_mean);
}

TEST_CASE("run_sweep: empty grid gives an empty table") {
  auto spec = small_spec();
  spec.n_grid = {};
  const auto table = montecarlo::run_sweep(spec);
  CHECK(table.rows.empty());
  CHECK(table.cells.empty());
}

TEST_CASE("run_sweep: trial floor is enforced") {
  auto spec = small_spec();
  spec.trials = 0;
  CHECK_THROWS_AS((void)montecarlo::run_sweep(spec), std::domain_error);
}

TEST_CASE("run_sweep: deterministic and thread-count independent") {
  auto spec = small_spec();
  spec.threads = 1;
  const auto a = montecarlo::run_sweep(spec);
  spec.threads = 3;
  const auto b = montecarlo::run_sweep(spec);
  const auto c = montecarlo::run_sweep(spec);
  CHECK(montecarlo::to_csv(a) == montecarlo::to_csv(b));
  CHECK(montecarlo::to_json_string(b) == montecarlo::to_json_string(c));
}

TEST_CASE("run_sweep: estimates respect their invariants") {
  const auto table = montecarlo::run_sweep(small_spec());
  CHECK(table.rows.size() == 2 * 4);  // two cells, four kinds each
  for (const auto& cell : table.cells) {
    CHECK(cell.status == "ok");
    CHECK(cell.m >= 2);
    for (const auto& rec : cell.type1) {
      CHECK(rec.est.p_hat * static_cast<double>(rec.est.trials) ==
            Approx(static_cast<double>(rec.est.failures)).epsilon(1e-12));
      CHECK(rec.est.ci_low <= rec.est.p_hat + 1e-15);
      CHECK(rec.est.ci_high >= rec.est.p_hat - 1e-15);
    }
    for (const auto& rec : cell.type2) {
      CHECK(rec.est.ci_low <= rec.est.p_hat + 1e-15);
      CHECK(rec.est.ci_high >= rec.est.p_hat - 1e-15);
      CHECK(rec.i != rec.j);
    }
  }
  for (const auto& row : table.rows) {
    if (row.kind == "type1_max" || row.kind == "type2_max") {
      CHECK(row.dominance_ok);  // Chebyshev companions are vacuous at this scale
    }
  }
}

TEST_CASE("run_sweep: a throwing cell is recorded in-row and the sweep continues") {
  auto spec = small_spec();
  // K = 4 at n = 2 means an effective ISI rate of 2, outside [0, 1): the
  // cell fails validation while the n = 8 cell still runs.
  spec.n_grid = {2, 8};
  spec.k_taps = 4;
  const auto table = montecarlo::run_sweep(spec);
  REQUIRE(table.cells.size() == 2);
  CHECK(table.cells[0].status != "ok");
  CHECK(table.cells[1].status == "ok");
  bool error_row = false;
  for (const auto& row : table.rows) {
    if (row.n == 2 && row.kind == "error") error_row = true;
  }
  CHECK(error_row);
}

TEST_CASE("run_sweep: per-cell failures are recorded, not fatal") {
  auto spec = small_spec();
  // theta' and the radius formulas reject b outside (0,1) only at validate
  // time; an unsatisfiable packing cap with a huge radius makes M = 1 and the
  // type-II rows degrade gracefully instead.
  spec.a = 400.0;  // 2 r0 far beyond the cube diagonal: M = 1 everywhere
  const auto table = montecarlo::run_sweep(spec);
  CHECK(table.cells.size() == 2);
  for (const auto& cell : table.cells) {
    CHECK(cell.status == "ok");
    CHECK(cell.m == 1);
  }
  bool skipped = false;
  for (const auto& row : table.rows) {
    if (row.kind == "type2_max") skipped = skipped || row.status != "ok";
  }
  CHECK(skipped);
}

}  // TEST_SUITE
