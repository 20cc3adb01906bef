#include "dipc/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dipc/numeric.hpp"
#include "dipc/rng.hpp"

namespace dipc::montecarlo {

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static chunking over [0, count); the work per index must not depend on
// execution order. Rethrows the first worker exception.
void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t, std::int64_t)>& body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count < 2) {
    body(0, count);
    return;
  }
  const auto workers = static_cast<std::int64_t>(
      std::min<std::int64_t>(threads, std::max<std::int64_t>(count, 1)));
  const std::int64_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (std::int64_t w = 0; w < workers; ++w) {
    const std::int64_t lo = w * chunk;
    const std::int64_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        body(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void sample_counts(std::span<const double> means, rng::Xoshiro256pp& gen,
                   std::vector<std::int64_t>& out) {
  out.resize(means.size());
  for (std::size_t t = 0; t < means.size(); ++t) out[t] = rng::poisson(gen, means[t]);
}

std::vector<double> slot_means(std::span<const double> cw,
                               const channel::ChannelParams& params) {
  const std::int64_t n_bar =
      channel::padded_length(static_cast<std::int64_t>(cw.size()), params);
  std::vector<double> means(static_cast<std::size_t>(n_bar));
  for (std::int64_t t = 0; t < n_bar; ++t) {
    means[static_cast<std::size_t>(t)] = channel::convolved_mean(cw, t, params);
  }
  return means;
}

void check_message_index(const codebook::Codebook& cb, std::int64_t i) {
  if (i < 0 || i >= cb.m) throw std::out_of_range("message index outside [0, M)");
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials < 1) throw std::domain_error("wilson_interval needs trials >= 1");
  if (successes < 0 || successes > trials) {
    throw std::domain_error("successes must lie in [0, trials]");
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace detail {

ErrorEstimate estimate_acceptance(std::span<const double> sender,
                                  std::span<const double> hypothesis,
                                  const channel::ChannelParams& params,
                                  const decoder::DecoderConfig& cfg,
                                  std::int64_t trials, std::uint64_t seed,
                                  int threads) {
  params.validate();
  cfg.validate();
  if (trials < 1) throw std::domain_error("trials must be >= 1");
  if (sender.size() != hypothesis.size()) {
    throw std::invalid_argument("sender and hypothesis codewords differ in length");
  }

  const auto means = slot_means(sender, params);
  const decoder::MetricWorkspace workspace(hypothesis, params);

  std::vector<std::uint8_t> accepted(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> y;
    std::vector<double> scratch;
    for (std::int64_t tr = lo; tr < hi; ++tr) {
      auto gen = rng::make_stream(seed, 0, static_cast<std::uint64_t>(tr));
      sample_counts(means, gen, y);
      const double metric = workspace.evaluate(y, scratch);
      accepted[static_cast<std::size_t>(tr)] = std::fabs(metric) <= cfg.tau_n ? 1 : 0;
    }
  });

  std::int64_t count = 0;
  for (auto v : accepted) count += v;

  ErrorEstimate est;
  est.failures = count;
  est.trials = trials;
  est.p_hat = static_cast<double>(count) / static_cast<double>(trials);
  const auto ci = wilson_interval(count, trials);
  est.ci_low = ci.low;
  est.ci_high = ci.high;
  return est;
}

}  // namespace detail

ErrorEstimate estimate_type1(const codebook::Codebook& cb, std::int64_t i,
                             const channel::ChannelParams& params,
                             const decoder::DecoderConfig& cfg,
                             std::int64_t trials, std::uint64_t seed, int threads) {
  check_message_index(cb, i);
  // Type-I rejects the true message: complement of landing in its own region.
  ErrorEstimate est = detail::estimate_acceptance(cb.codeword(i), cb.codeword(i),
                                                  params, cfg, trials, seed, threads);
  est.failures = est.trials - est.failures;
  est.p_hat = static_cast<double>(est.failures) / static_cast<double>(est.trials);
  const auto ci = wilson_interval(est.failures, est.trials);
  est.ci_low = ci.low;
  est.ci_high = ci.high;
  est.analytic_bound =
      analysis::type1_error_bound(cb.params.n, cb.params.kappa, cb.params.a,
                                  cb.params.b, cfg.c_const, params.rho0(),
                                  cb.params.A, params.lambda);
  return est;
}

ErrorEstimate estimate_type2(const codebook::Codebook& cb, std::int64_t i,
                             std::int64_t j, const channel::ChannelParams& params,
                             const decoder::DecoderConfig& cfg,
                             std::int64_t trials, std::uint64_t seed, int threads) {
  check_message_index(cb, i);
  check_message_index(cb, j);
  if (i == j) {
    throw std::invalid_argument("type-II needs i != j (i == j is a type-I setup)");
  }
  ErrorEstimate est = detail::estimate_acceptance(cb.codeword(i), cb.codeword(j),
                                                  params, cfg, trials, seed, threads);
  est.analytic_bound =
      analysis::type2_event_bounds(cb.params.n, cb.params.kappa, cb.params.a,
                                   cb.params.b, cfg.c_const, params.rho0(),
                                   cb.params.A, params.lambda)
          .total();
  return est;
}

MetricMoments estimate_metric_moments(const codebook::Codebook& cb, std::int64_t i,
                                      const channel::ChannelParams& params,
                                      std::int64_t trials, std::uint64_t seed,
                                      int threads) {
  check_message_index(cb, i);
  params.validate();
  if (trials < 2) throw std::domain_error("moment estimation needs trials >= 2");

  const auto cw = cb.codeword(i);
  const auto means = slot_means(cw, params);
  const decoder::MetricWorkspace workspace(cw, params);

  std::vector<double> values(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> y;
    std::vector<double> scratch;
    for (std::int64_t tr = lo; tr < hi; ++tr) {
      auto gen = rng::make_stream(seed, 0, static_cast<std::uint64_t>(tr));
      sample_counts(means, gen, y);
      values[static_cast<std::size_t>(tr)] = workspace.evaluate(y, scratch);
    }
  });

  const double nd = static_cast<double>(trials);
  MetricMoments mom;
  mom.trials = trials;
  mom.mean = numeric::pairwise_sum(values) / nd;

  std::vector<double> sq(values.size()), quart(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double d = values[k] - mom.mean;
    sq[k] = d * d;
    quart[k] = d * d * d * d;
  }
  const double m2 = numeric::pairwise_sum(sq) / nd;
  const double m4 = numeric::pairwise_sum(quart) / nd;
  mom.var = m2 * nd / (nd - 1.0);
  mom.se_mean = std::sqrt(mom.var / nd);
  // Moment-based standard error of the sample variance.
  mom.se_var = std::sqrt(std::max(0.0, (m4 - m2 * m2 * (nd - 3.0) / (nd - 1.0)) / nd));
  return mom;
}

void ExperimentSpec::validate() const {
  for (auto n : n_grid) {
    if (n < 2) throw std::domain_error("sweep codeword lengths must be >= 2");
  }
  if (k_taps < 0) throw std::domain_error("k_taps must be >= 0");
  if (k_taps == 0 && !(kappa >= 0.0 && kappa < 1.0)) {
    throw std::domain_error("kappa must lie in [0, 1)");
  }
  if (profile != "uniform" && profile != "geometric") {
    throw std::domain_error("unknown tap profile '" + profile + "'");
  }
  if (!(tap_decay > 0.0 && tap_decay <= 1.0)) {
    throw std::domain_error("tap decay must lie in (0, 1]");
  }
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
  if (!(symbol_period > 0.0)) throw std::domain_error("symbol period must be positive");
  if (!(cir_duration > 0.0)) throw std::domain_error("CIR duration must be positive");
  codebook::admissible_amplitude(p_ave, p_max);
  if (!(a > 0.0)) throw std::domain_error("constant a must be positive");
  if (!(b > 0.0 && b < 1.0)) throw std::domain_error("constant b must lie in (0, 1)");
  if (!(c_const > 0.0 && c_const < 2.0)) {
    throw std::domain_error("decoder constant c must lie in (0, 2)");
  }
  if (trials < 100) throw std::domain_error("trials must be >= 100");
  if (pair_budget < 1 || pair_budget > 256) {
    throw std::domain_error("pair budget must lie in [1, 256]");
  }
  if (message_budget < 1 || message_budget > 256) {
    throw std::domain_error("message budget must lie in [1, 256]");
  }
  if (m_cap < 0) throw std::domain_error("m_cap must be >= 0");
  if (max_rejections < 1) throw std::domain_error("max_rejections must be >= 1");
}

channel::ChannelParams cell_channel(const ExperimentSpec& spec, std::int64_t k_taps) {
  std::vector<double> p(static_cast<std::size_t>(k_taps));
  if (spec.profile == "uniform") {
    for (auto& v : p) v = 1.0 / static_cast<double>(k_taps);
  } else {  // geometric
    double w = 0.5;
    for (auto& v : p) {
      v = w;
      w *= spec.tap_decay;
    }
  }
  return channel::ChannelParams::from_arrival_probs(p, spec.symbol_period,
                                                    spec.lambda, spec.cir_duration);
}

namespace {

// Seed-stream tags inside one sweep cell. Cell ci owns tags
// [ci*1024, (ci+1)*1024); budgets are capped at 256 so the tag blocks
// below never collide.
constexpr std::uint64_t kTagCodebook = 0;
constexpr std::uint64_t kTagMessageSample = 1;
constexpr std::uint64_t kTagPairSample = 2;
constexpr std::uint64_t kTagMoments = 3;
constexpr std::uint64_t kTagType1Base = 256;
constexpr std::uint64_t kTagType2Base = 512;

std::uint64_t cell_seed(const ExperimentSpec& spec, std::int64_t cell,
                        std::uint64_t tag) {
  return rng::derive_seed(spec.base_seed,
                          static_cast<std::uint64_t>(cell) * 1024 + tag);
}

std::vector<std::int64_t> sample_distinct(std::int64_t m, std::int64_t budget,
                                          rng::Xoshiro256pp& gen) {
  std::vector<std::int64_t> all(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i;
  if (m <= budget) return all;
  // Partial Fisher-Yates: the first `budget` entries are a uniform sample.
  for (std::int64_t i = 0; i < budget; ++i) {
    const auto pick = i + static_cast<std::int64_t>(
                              gen.uniform01() * static_cast<double>(m - i));
    std::swap(all[static_cast<std::size_t>(i)],
              all[static_cast<std::size_t>(std::min(pick, m - 1))]);
  }
  all.resize(static_cast<std::size_t>(budget));
  return all;
}

void run_cell(const ExperimentSpec& spec, std::int64_t cell_index, std::int64_t n,
              SweepCell& cell, std::vector<ResultRow>& rows) {
  const std::int64_t k_taps =
      spec.k_taps > 0
          ? spec.k_taps
          : std::max<std::int64_t>(
                1, static_cast<std::int64_t>(std::llround(
                       std::pow(static_cast<double>(n), spec.kappa))));
  const double kappa_eff =
      spec.k_taps > 0
          ? std::log2(static_cast<double>(k_taps)) / std::log2(static_cast<double>(n))
          : spec.kappa;

  cell.n = n;
  cell.k_taps = k_taps;
  cell.kappa = kappa_eff;

  const auto params = cell_channel(spec, k_taps);
  const double amplitude = codebook::admissible_amplitude(spec.p_ave, spec.p_max);
  codebook::PackingParams packing{n, amplitude, spec.a, spec.b, kappa_eff};
  const auto radius = codebook::packing_radius(n, kappa_eff, spec.a, spec.b);
  const auto cfg =
      decoder::DecoderConfig::make(radius.theta_n, params.rho0(), spec.c_const);

  cell.amplitude = amplitude;
  cell.theta_n = radius.theta_n;
  cell.r0 = radius.r0;
  cell.tau_n = cfg.tau_n;
  cell.codebook_seed = cell_seed(spec, cell_index, kTagCodebook);

  const auto cb = codebook::construct_codebook(
      packing, cell.codebook_seed, {spec.max_rejections, spec.m_cap});
  cell.m = cb.m;
  cell.min_pairwise_distance = codebook::min_pairwise_distance(cb);

  auto row_common = [&](const char* kind) {
    ResultRow row;
    row.n = n;
    row.k_taps = k_taps;
    row.kappa = kappa_eff;
    row.kind = kind;
    row.trials = spec.trials;
    return row;
  };

  // Type I: headline is the maximum over the sampled messages, matching the
  // for-every-message error requirement.
  auto msg_gen = rng::Xoshiro256pp(cell_seed(spec, cell_index, kTagMessageSample));
  const auto messages = sample_distinct(cb.m, spec.message_budget, msg_gen);
  std::size_t argmax1 = 0;
  for (std::size_t k = 0; k < messages.size(); ++k) {
    const auto i = messages[k];
    EstimateRecord rec;
    rec.i = i;
    rec.est = estimate_type1(cb, i, params, cfg, spec.trials,
                             cell_seed(spec, cell_index, kTagType1Base + k),
                             spec.threads);
    cell.type1.push_back(rec);
    if (rec.est.p_hat > cell.type1[argmax1].est.p_hat) argmax1 = k;
  }
  {
    const auto& top = cell.type1[argmax1];
    auto row = row_common("type1_max");
    row.empirical = top.est.p_hat;
    row.ci_low = top.est.ci_low;
    row.ci_high = top.est.ci_high;
    row.analytic_bound = top.est.analytic_bound;
    row.dominance_ok = top.est.ci_low <= std::min(1.0, top.est.analytic_bound);
    row.detail = "i=" + std::to_string(top.i);
    rows.push_back(row);
  }

  // Type II: uniformly sampled ordered pairs plus the closest pair, which
  // stresses the separation-driven bound hardest.
  if (cb.m >= 2) {
    auto pair_gen = rng::Xoshiro256pp(cell_seed(spec, cell_index, kTagPairSample));
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    const std::int64_t max_ordered = cb.m * (cb.m - 1);
    const std::int64_t want = std::min<std::int64_t>(spec.pair_budget, max_ordered);
    while (static_cast<std::int64_t>(pairs.size()) < want) {
      const auto i = static_cast<std::int64_t>(pair_gen.uniform01() *
                                               static_cast<double>(cb.m));
      const auto j = static_cast<std::int64_t>(pair_gen.uniform01() *
                                               static_cast<double>(cb.m));
      if (i == j || i >= cb.m || j >= cb.m) continue;
      if (std::find(pairs.begin(), pairs.end(), std::make_pair(i, j)) != pairs.end()) {
        continue;
      }
      pairs.emplace_back(i, j);
    }
    const auto close = codebook::closest_pair(cb);
    if (std::find(pairs.begin(), pairs.end(), close) == pairs.end()) {
      pairs.push_back(close);
    }

    std::size_t argmax2 = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      EstimateRecord rec;
      rec.i = pairs[k].first;
      rec.j = pairs[k].second;
      rec.est = estimate_type2(cb, rec.i, rec.j, params, cfg, spec.trials,
                               cell_seed(spec, cell_index, kTagType2Base + k),
                               spec.threads);
      cell.type2.push_back(rec);
      if (rec.est.p_hat > cell.type2[argmax2].est.p_hat) argmax2 = k;
    }
    const auto& top = cell.type2[argmax2];
    auto row = row_common("type2_max");
    row.empirical = top.est.p_hat;
    row.ci_low = top.est.ci_low;
    row.ci_high = top.est.ci_high;
    row.analytic_bound = top.est.analytic_bound;
    row.dominance_ok = top.est.ci_low <= std::min(1.0, top.est.analytic_bound);
    row.detail = "i=" + std::to_string(top.i) + ";j=" + std::to_string(top.j);
    rows.push_back(row);
  } else {
    auto row = row_common("type2_max");
    row.trials = 0;
    row.status = "skipped: M < 2";
    rows.push_back(row);
  }

  // Decoding-metric moments for the first sampled message: expectation-zero
  // and the variance cap.
  cell.moments =
      estimate_metric_moments(cb, messages.front(), params, spec.trials,
                              cell_seed(spec, cell_index, kTagMoments), spec.threads);
  const std::int64_t n_bar = channel::padded_length(n, params);
  cell.metric_var_bound =
      analysis::psi_var_upper_bound(n_bar, amplitude, spec.lambda) /
      (static_cast<double>(n_bar) * static_cast<double>(n_bar));
  {
    auto row = row_common("metric_mean");
    row.empirical = cell.moments.mean;
    row.ci_low = cell.moments.mean - 1.959963984540054 * cell.moments.se_mean;
    row.ci_high = cell.moments.mean + 1.959963984540054 * cell.moments.se_mean;
    row.analytic_bound = 0.0;
    row.dominance_ok = std::fabs(cell.moments.mean) <= 5.0 * cell.moments.se_mean;
    row.detail = "i=" + std::to_string(messages.front());
    rows.push_back(row);
  }
  {
    auto row = row_common("metric_var");
    row.empirical = cell.moments.var;
    row.ci_low = cell.moments.var - 1.959963984540054 * cell.moments.se_var;
    row.ci_high = cell.moments.var + 1.959963984540054 * cell.moments.se_var;
    row.analytic_bound = cell.metric_var_bound;
    row.dominance_ok =
        cell.moments.var <= cell.metric_var_bound + 5.0 * cell.moments.se_var;
    row.detail = "i=" + std::to_string(messages.front());
    rows.push_back(row);
  }
}

}  // namespace

ResultTable run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  ResultTable table;
  table.spec = spec;
  for (std::size_t ci = 0; ci < spec.n_grid.size(); ++ci) {
    SweepCell cell;
    try {
      run_cell(spec, static_cast<std::int64_t>(ci), spec.n_grid[ci], cell,
               table.rows);
    } catch (const std::exception& e) {
      cell.n = spec.n_grid[ci];
      cell.status = e.what();
      ResultRow row;
      row.n = spec.n_grid[ci];
      row.kind = "error";
      row.status = e.what();
      table.rows.push_back(row);
    }
    table.cells.push_back(std::move(cell));
  }
  return table;
}

std::string to_csv(const ResultTable& table) {
  std::string out = "#dipc-results v1\n";
  out +=
      "n,k,kappa,kind,empirical,ci_low,ci_high,analytic_bound,dominance_ok,"
      "trials,detail,status\n";
  for (const auto& row : table.rows) {
    out += std::to_string(row.n) + ',' + std::to_string(row.k_taps) + ',' +
           fmt(row.kappa) + ',' + row.kind + ',' + fmt(row.empirical) + ',' +
           fmt(row.ci_low) + ',' + fmt(row.ci_high) + ',' +
           fmt(row.analytic_bound) + ',' + (row.dominance_ok ? "1" : "0") + ',' +
           std::to_string(row.trials) + ',' + sanitize(row.detail) + ',' +
           sanitize(row.status) + '\n';
  }
  return out;
}

namespace {

nlohmann::json estimate_json(const ErrorEstimate& est) {
  return {{"p_hat", est.p_hat},         {"failures", est.failures},
          {"trials", est.trials},       {"ci_low", est.ci_low},
          {"ci_high", est.ci_high},     {"analytic_bound", est.analytic_bound}};
}

}  // namespace

std::string to_json_string(const ResultTable& table) {
  const auto& spec = table.spec;
  nlohmann::json j;
  j["schema"] = "dipc-results v1";
  j["spec"] = {{"n_grid", spec.n_grid},
               {"k_taps", spec.k_taps},
               {"kappa", spec.kappa},
               {"profile", spec.profile},
               {"tap_decay", spec.tap_decay},
               {"lambda", spec.lambda},
               {"symbol_period", spec.symbol_period},
               {"cir_duration", spec.cir_duration},
               {"p_ave", spec.p_ave},
               {"p_max", spec.p_max},
               {"a", spec.a},
               {"b", spec.b},
               {"c_const", spec.c_const},
               {"trials", spec.trials},
               {"base_seed", spec.base_seed},
               {"pair_budget", spec.pair_budget},
               {"message_budget", spec.message_budget},
               {"m_cap", spec.m_cap},
               {"max_rejections", spec.max_rejections}};
  j["cells"] = nlohmann::json::array();
  for (const auto& cell : table.cells) {
    nlohmann::json c = {{"n", cell.n},
                        {"k", cell.k_taps},
                        {"kappa", cell.kappa},
                        {"m", cell.m},
                        {"amplitude", cell.amplitude},
                        {"theta_n", cell.theta_n},
                        {"r0", cell.r0},
                        {"tau_n", cell.tau_n},
                        {"min_pairwise_distance", cell.min_pairwise_distance},
                        {"codebook_seed", cell.codebook_seed},
                        {"status", cell.status}};
    c["type1"] = nlohmann::json::array();
    for (const auto& rec : cell.type1) {
      auto e = estimate_json(rec.est);
      e["i"] = rec.i;
      c["type1"].push_back(e);
    }
    c["type2"] = nlohmann::json::array();
    for (const auto& rec : cell.type2) {
      auto e = estimate_json(rec.est);
      e["i"] = rec.i;
      e["j"] = rec.j;
      c["type2"].push_back(e);
    }
    c["metric_moments"] = {{"mean", cell.moments.mean},
                           {"var", cell.moments.var},
                           {"se_mean", cell.moments.se_mean},
                           {"se_var", cell.moments.se_var},
                           {"trials", cell.moments.trials},
                           {"var_bound", cell.metric_var_bound}};
    j["cells"].push_back(c);
  }
  j["rows"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    j["rows"].push_back({{"n", row.n},
                         {"k", row.k_taps},
                         {"kappa", row.kappa},
                         {"kind", row.kind},
                         {"empirical", row.empirical},
                         {"ci_low", row.ci_low},
                         {"ci_high", row.ci_high},
                         {"analytic_bound", row.analytic_bound},
                         {"dominance_ok", row.dominance_ok},
                         {"trials", row.trials},
                         {"detail", row.detail},
                         {"status", row.status}});
  }
  return j.dump(2) + "\n";
}

}  // namespace dipc::montecarlo
