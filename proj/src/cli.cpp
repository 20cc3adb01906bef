#include "dipc/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dipc/analysis.hpp"
#include "dipc/channel.hpp"
#include "dipc/codebook.hpp"
#include "dipc/decoder.hpp"
#include "dipc/montecarlo.hpp"

namespace dipc::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw codebook::FormatError("cannot open '" + path.string() + "' for writing");
  os << content;
  if (!os) throw codebook::FormatError("failed writing '" + path.string() + "'");
}

using KvRows = std::vector<std::pair<std::string, double>>;

std::string kv_csv(const std::string& schema, const KvRows& rows) {
  std::string out = "#" + schema + "\nquantity,value\n";
  for (const auto& [key, value] : rows) out += key + ',' + fmt(value) + '\n';
  return out;
}

std::string kv_json(const std::string& schema, const KvRows& rows) {
  nlohmann::json j;
  j["schema"] = schema;
  for (const auto& [key, value] : rows) j[key] = value;
  return j.dump(2) + "\n";
}

void emit_kv(const fs::path& dir, const std::string& stem, const std::string& schema,
             const KvRows& rows, const std::string& format) {
  if (format == "csv" || format == "both") {
    write_text_file(dir / (stem + ".csv"), kv_csv(schema, rows));
  }
  if (format == "json" || format == "both") {
    write_text_file(dir / (stem + ".json"), kv_json(schema, rows));
  }
}

struct KappaRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
};

KappaRange parse_kappa_range(const std::string& text) {
  KappaRange r;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &r.lo, &r.hi, &r.step, &extra) != 3) {
    throw std::domain_error("--sweep-kappa wants lo:hi:step, got '" + text + "'");
  }
  if (!(r.step > 0.0) || r.lo > r.hi || r.lo < 0.0 || r.hi >= 1.0) {
    throw std::domain_error("--sweep-kappa range must satisfy 0 <= lo <= hi < 1, step > 0");
  }
  return r;
}

// ---- bounds ---------------------------------------------------------------

struct BoundsConfig {
  double kappa = 0.0;
  std::int64_t n = 0;  // 0: closed-form capacity only
  double t_cir = 1.0;
  double lambda = 1.0;
  double rho0 = 1.0;
  double a = 1.0;
  double b = 0.3;
  double c_const = 1.0;
  double p_ave = 1.0;
  double p_max = 1.0;
  std::string sweep_kappa;
  std::string out_dir = ".";
  std::string format = "both";
};

int cmd_bounds(const BoundsConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  if (!cfg.sweep_kappa.empty()) {
    if (cfg.n < 2) {
      throw std::domain_error("--sweep-kappa needs --n >= 2 for the effective rate");
    }
    const auto range = parse_kappa_range(cfg.sweep_kappa);
    std::vector<double> grid;
    const auto steps = static_cast<std::int64_t>(
        std::floor((range.hi - range.lo) / range.step + 1e-9));
    for (std::int64_t i = 0; i <= steps; ++i) {
      grid.push_back(range.lo + static_cast<double>(i) * range.step);
    }
    std::size_t argmax = 0;
    std::vector<analysis::RateBounds> reff(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      reff[i] = analysis::effective_rate_bounds(cfg.n, grid[i], cfg.t_cir);
      if (reff[i].lower > reff[argmax].lower) argmax = i;
    }
    std::string csv = "#dipc-kappa-sweep v1\n";
    csv += "kappa,capacity_lower,capacity_upper,reff_lower,reff_upper,is_argmax\n";
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto cap = analysis::capacity_bounds(grid[i]);
      csv += fmt(grid[i]) + ',' + fmt(cap.lower) + ',' + fmt(cap.upper) + ',' +
             fmt(reff[i].lower) + ',' + fmt(reff[i].upper) + ',' +
             (i == argmax ? "1" : "0") + '\n';
      rows.push_back({{"kappa", grid[i]},
                      {"capacity_lower", cap.lower},
                      {"capacity_upper", cap.upper},
                      {"reff_lower", reff[i].lower},
                      {"reff_upper", reff[i].upper},
                      {"is_argmax", i == argmax}});
    }
    if (cfg.format == "csv" || cfg.format == "both") {
      write_text_file(dir / "kappa_sweep.csv", csv);
    }
    if (cfg.format == "json" || cfg.format == "both") {
      nlohmann::json j;
      j["schema"] = "dipc-kappa-sweep v1";
      j["n"] = cfg.n;
      j["t_cir"] = cfg.t_cir;
      j["rows"] = rows;
      write_text_file(dir / "kappa_sweep.json", j.dump(2) + "\n");
    }
    std::cout << "kappa sweep: " << grid.size() << " points, argmax at kappa="
              << fmt(grid[argmax]) << " (1 - 1/ln n = "
              << fmt(analysis::kappa_max(static_cast<double>(cfg.n))) << ")\n";
    return kExitOk;
  }

  KvRows rows;
  rows.emplace_back("kappa", cfg.kappa);
  const auto cap = analysis::capacity_bounds(cfg.kappa);
  rows.emplace_back("capacity_lower", cap.lower);
  rows.emplace_back("capacity_upper", cap.upper);
  if (cfg.n > 0) {
    const auto report = analysis::make_bounds_report(
        cfg.n, cfg.kappa, cfg.t_cir, cfg.p_ave, cfg.p_max, cfg.lambda, cfg.rho0,
        cfg.a, cfg.b, cfg.c_const);
    rows = report.as_kv();
  }
  emit_kv(dir, "bounds", "dipc-bounds v1", rows, cfg.format);
  std::cout << "capacity bounds at kappa=" << fmt(cfg.kappa) << ": ["
            << fmt(cap.lower) << ", " << fmt(cap.upper) << "]\n";
  return kExitOk;
}

// ---- pack -----------------------------------------------------------------

struct PackConfig {
  std::int64_t n = 0;
  double p_ave = 1.0;
  double p_max = 1.0;
  double amplitude = 0.0;  // 0: derive from p_ave/p_max
  double a = 1.0;
  double b = 0.3;
  double kappa = 0.0;
  std::uint64_t seed = 1;
  std::int64_t max_rejections = 10000;
  std::int64_t m_cap = 0;
  std::int64_t cover_samples = 100000;
  std::uint64_t verify_seed = 999;
  std::string out_dir = ".";
  std::string format = "both";
};

KvRows packing_report_rows(const codebook::Codebook& cb,
                           const codebook::PackingReport& rep) {
  const double nd = static_cast<double>(cb.params.n);
  const double log2_m = std::log2(static_cast<double>(cb.m));
  return {
      {"n", nd},
      {"A", cb.params.A},
      {"a", cb.params.a},
      {"b", cb.params.b},
      {"kappa", cb.params.kappa},
      {"seed", static_cast<double>(cb.seed)},
      {"m", static_cast<double>(rep.m)},
      {"theta_n", cb.params.theta_n()},
      {"r0", rep.r0},
      {"min_pairwise_distance", rep.min_pairwise_distance},
      {"separation_ok", rep.separation_ok ? 1.0 : 0.0},
      {"linf_ok", rep.linf_ok ? 1.0 : 0.0},
      {"covering_fraction", rep.covering_fraction},
      {"covering_ok", rep.covering_ok ? 1.0 : 0.0},
      {"log2_density", rep.log2_density},
      {"density", rep.density},
      {"density_lower_ok", rep.density_lower_ok ? 1.0 : 0.0},
      {"density_upper_ok", rep.density_upper_ok ? 1.0 : 0.0},
      {"degenerate_regime", rep.degenerate_regime ? 1.0 : 0.0},
      {"saturated", rep.saturated ? 1.0 : 0.0},
      {"saturation_evidence", static_cast<double>(cb.saturation_evidence)},
      {"log2_m", log2_m},
      {"log2_m_over_n_log2_n",
       cb.params.n > 1 ? log2_m / (nd * std::log2(nd)) : 0.0},
      {"log2_m_lower_bound",
       codebook::codebook_size_lower_bound(cb.params.n, cb.params.A, rep.r0)},
  };
}

int cmd_pack(const PackConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  const double amplitude = cfg.amplitude > 0.0
                               ? cfg.amplitude
                               : codebook::admissible_amplitude(cfg.p_ave, cfg.p_max);
  codebook::PackingParams params{cfg.n, amplitude, cfg.a, cfg.b, cfg.kappa};
  const auto cb = codebook::construct_codebook(params, cfg.seed,
                                               {cfg.max_rejections, cfg.m_cap});
  const auto rep = codebook::verify_packing(cb, cfg.cover_samples, cfg.verify_seed);

  codebook::save_codebook((dir / "codebook.txt").string(), cb);
  emit_kv(dir, "packing_report", "dipc-packing-report v1",
          packing_report_rows(cb, rep), cfg.format);

  const double nd = static_cast<double>(cb.params.n);
  std::cout << "M=" << cb.m << " log2(M)/(n log2 n)="
            << fmt(cb.params.n > 1
                       ? std::log2(static_cast<double>(cb.m)) / (nd * std::log2(nd))
                       : 0.0)
            << "\n";
  if (rep.degenerate_regime) {
    std::cout << "warning: degenerate regime (2 r0 >= A sqrt(n)); only a handful "
                 "of spheres can fit\n";
  }
  return kExitOk;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateConfig {
  montecarlo::ExperimentSpec spec;
  std::string out_dir = ".";
  std::string format = "both";
};

int cmd_simulate(const SimulateConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  const auto table = montecarlo::run_sweep(cfg.spec);
  if (cfg.format == "csv" || cfg.format == "both") {
    write_text_file(dir / "results.csv", montecarlo::to_csv(table));
  }
  if (cfg.format == "json" || cfg.format == "both") {
    write_text_file(dir / "results.json", montecarlo::to_json_string(table));
  }

  std::size_t failed_cells = 0;
  for (const auto& cell : table.cells) {
    if (cell.status != "ok") {
      ++failed_cells;
      std::cout << "n=" << cell.n << " failed: " << cell.status << "\n";
      continue;
    }
    double t1 = 0.0, t2 = 0.0;
    bool dom = true;
    for (const auto& row : table.rows) {
      if (row.n != cell.n) continue;
      if (row.kind == "type1_max") t1 = row.empirical;
      if (row.kind == "type2_max" && row.status == "ok") t2 = row.empirical;
      if (row.status == "ok") dom = dom && row.dominance_ok;
    }
    std::cout << "n=" << cell.n << " K=" << cell.k_taps << " M=" << cell.m
              << " type1_max=" << fmt(t1) << " type2_max=" << fmt(t2)
              << " dominance=" << (dom ? "pass" : "FAIL") << "\n";
  }
  return failed_cells == table.cells.size() && !table.cells.empty() ? kExitCheckFailed
                                                                    : kExitOk;
}

// ---- verify -----------------------------------------------------------------

struct VerifyConfig {
  std::string codebook_path;
  std::vector<double> rho{1.0};
  double lambda = 1.0;
  double symbol_period = 1.0;
  double cir_duration = 1.0;
  double b = 0.3;
  double p_max = 0.0;  // 0: use the codebook amplitude
  std::int64_t cover_samples = 100000;
  std::uint64_t seed = 7;
  std::string out_dir = ".";
  std::string format = "both";
};

int cmd_verify(const VerifyConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  const auto cb = codebook::load_codebook(cfg.codebook_path);
  channel::ChannelParams params;
  params.rho = cfg.rho;
  params.lambda = cfg.lambda;
  params.symbol_period = cfg.symbol_period;
  params.cir_duration = cfg.cir_duration;
  params.validate();

  const auto rep = codebook::verify_packing(cb, cfg.cover_samples, cfg.seed);
  const auto sep = analysis::check_pairwise_separation(cb, params, cfg.b, cfg.p_max);

  KvRows rows = packing_report_rows(cb, rep);
  rows.emplace_back("separation_theta_prime", sep.theta_prime);
  rows.emplace_back("separation_pass_full", sep.pass_full ? 1.0 : 0.0);
  rows.emplace_back("separation_pass_first_n", sep.pass_first_n ? 1.0 : 0.0);
  rows.emplace_back("separation_worst_margin_full", sep.worst_margin_full);
  rows.emplace_back("separation_worst_margin_first_n", sep.worst_margin_first_n);
  emit_kv(dir, "verification", "dipc-verification v1", rows, cfg.format);

  const bool pass = rep.separation_ok && rep.linf_ok && rep.covering_ok &&
                    sep.pass_full && sep.pass_first_n;
  std::cout << "packing: separation=" << (rep.separation_ok ? "pass" : "FAIL")
            << " linf=" << (rep.linf_ok ? "pass" : "FAIL")
            << " covering=" << (rep.covering_ok ? "pass" : "FAIL")
            << " | separation property: full=" << (sep.pass_full ? "pass" : "FAIL")
            << " first_n=" << (sep.pass_first_n ? "pass" : "FAIL") << "\n";
  return pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Deterministic identification codes over the Poisson channel "
               "with inter-symbol interference: bounds, packing, simulation"};
  app.require_subcommand(1);
  // Usage: dipc --config exp.ini <subcommand> ...; keys live in a [subcommand]
  // section and unknown keys are rejected.
  app.set_config("--config", "", "Read options from a key=value config file");
  app.allow_config_extras(false);

  BoundsConfig bounds_cfg;
  PackConfig pack_cfg;
  SimulateConfig sim_cfg;
  VerifyConfig verify_cfg;

  const auto format_check = CLI::IsMember({"csv", "json", "both"});

  auto* bounds = app.add_subcommand("bounds", "Evaluate the closed-form bounds");
  bounds->add_option("--kappa", bounds_cfg.kappa, "ISI rate in [0, 1)");
  bounds->add_option("--n", bounds_cfg.n, "Codeword length (enables rate bounds)");
  bounds->add_option("--t-cir", bounds_cfg.t_cir, "CIR duration [s]");
  bounds->add_option("--lambda", bounds_cfg.lambda, "Interference mean");
  bounds->add_option("--rho0", bounds_cfg.rho0, "Current-symbol tap weight");
  bounds->add_option("--a", bounds_cfg.a, "Packing radius constant");
  bounds->add_option("--b", bounds_cfg.b, "Packing exponent offset in (0,1)");
  bounds->add_option("--c", bounds_cfg.c_const, "Decoder constant in (0,2)");
  bounds->add_option("--p-ave", bounds_cfg.p_ave, "Average release rate limit");
  bounds->add_option("--p-max", bounds_cfg.p_max, "Peak release rate limit");
  bounds->add_option("--sweep-kappa", bounds_cfg.sweep_kappa,
                     "Emit a kappa grid lo:hi:step instead of a single report");
  bounds->add_option("--out", bounds_cfg.out_dir, "Output directory")
      ->envname("DIPC_OUT_DIR");
  bounds->add_option("--format", bounds_cfg.format)->check(format_check);

  auto* pack = app.add_subcommand("pack", "Construct a sphere-packing codebook");
  pack->add_option("--n", pack_cfg.n, "Codeword length")->required();
  pack->add_option("--p-ave", pack_cfg.p_ave, "Average release rate limit");
  pack->add_option("--p-max", pack_cfg.p_max, "Peak release rate limit");
  pack->add_option("--amplitude", pack_cfg.amplitude,
                   "Cube edge A (overrides the release-rate limits)");
  pack->add_option("--a", pack_cfg.a, "Packing radius constant");
  pack->add_option("--b", pack_cfg.b, "Packing exponent offset in (0,1)");
  pack->add_option("--kappa", pack_cfg.kappa, "ISI rate in [0, 1)");
  pack->add_option("--seed", pack_cfg.seed, "Construction seed");
  pack->add_option("--max-rejections", pack_cfg.max_rejections,
                   "Consecutive rejections declaring saturation");
  pack->add_option("--m-cap", pack_cfg.m_cap, "Stop after this many codewords (0: saturate)");
  pack->add_option("--cover-samples", pack_cfg.cover_samples, "Covering-check samples");
  pack->add_option("--verify-seed", pack_cfg.verify_seed, "Covering-check seed");
  pack->add_option("--out", pack_cfg.out_dir, "Output directory")->envname("DIPC_OUT_DIR");
  pack->add_option("--format", pack_cfg.format)->check(format_check);

  auto* sim = app.add_subcommand("simulate", "Run the Monte Carlo error sweep");
  sim->add_option("--n-grid", sim_cfg.spec.n_grid, "Codeword lengths")
      ->delimiter(',');
  sim->add_option("--k", sim_cfg.spec.k_taps, "Fixed tap count (0: derive from kappa)");
  sim->add_option("--kappa", sim_cfg.spec.kappa, "ISI rate when --k 0");
  sim->add_option("--profile", sim_cfg.spec.profile, "Tap profile: uniform | geometric");
  sim->add_option("--tap-decay", sim_cfg.spec.tap_decay,
                  "Per-tap decay of the geometric profile");
  sim->add_option("--lambda", sim_cfg.spec.lambda, "Interference mean");
  sim->add_option("--t-s", sim_cfg.spec.symbol_period, "Symbol period [s]");
  sim->add_option("--t-cir", sim_cfg.spec.cir_duration, "CIR duration [s]");
  sim->add_option("--p-ave", sim_cfg.spec.p_ave, "Average release rate limit");
  sim->add_option("--p-max", sim_cfg.spec.p_max, "Peak release rate limit");
  sim->add_option("--a", sim_cfg.spec.a, "Packing radius constant");
  sim->add_option("--b", sim_cfg.spec.b, "Packing exponent offset in (0,1)");
  sim->add_option("--c", sim_cfg.spec.c_const, "Decoder constant in (0,2)");
  sim->add_option("--trials", sim_cfg.spec.trials, "Trials per estimate");
  sim->add_option("--seed", sim_cfg.spec.base_seed, "Base seed");
  sim->add_option("--pairs", sim_cfg.spec.pair_budget, "Sampled type-II pairs");
  sim->add_option("--messages", sim_cfg.spec.message_budget, "Sampled type-I messages");
  sim->add_option("--m-cap", sim_cfg.spec.m_cap, "Codebook size cap per cell");
  sim->add_option("--max-rejections", sim_cfg.spec.max_rejections,
                  "Consecutive rejections declaring saturation");
  sim->add_option("--threads", sim_cfg.spec.threads, "Worker threads (0: hardware)");
  sim->add_option("--out", sim_cfg.out_dir, "Output directory")->envname("DIPC_OUT_DIR");
  sim->add_option("--format", sim_cfg.format)->check(format_check);

  auto* verify = app.add_subcommand("verify", "Check a codebook file");
  verify->add_option("--codebook", verify_cfg.codebook_path, "Codebook file")
      ->required();
  verify->add_option("--rho", verify_cfg.rho, "Tap weights")->delimiter(',');
  verify->add_option("--lambda", verify_cfg.lambda, "Interference mean");
  verify->add_option("--t-s", verify_cfg.symbol_period, "Symbol period [s]");
  verify->add_option("--t-cir", verify_cfg.cir_duration, "CIR duration [s]");
  verify->add_option("--b", verify_cfg.b, "Separation exponent offset");
  verify->add_option("--p-max", verify_cfg.p_max,
                     "Peak rate for theta' (0: use the codebook amplitude)");
  verify->add_option("--cover-samples", verify_cfg.cover_samples, "Covering-check samples");
  verify->add_option("--seed", verify_cfg.seed, "Covering-check seed");
  verify->add_option("--out", verify_cfg.out_dir, "Output directory")->envname("DIPC_OUT_DIR");
  verify->add_option("--format", verify_cfg.format)->check(format_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (bounds->parsed()) return cmd_bounds(bounds_cfg);
    if (pack->parsed()) return cmd_pack(pack_cfg);
    if (sim->parsed()) return cmd_simulate(sim_cfg);
    if (verify->parsed()) return cmd_verify(verify_cfg);
  } catch (const codebook::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitConfigError;
}

}  // namespace dipc::cli
