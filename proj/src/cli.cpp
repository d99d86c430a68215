/*
 * Copyright 2026 The bassim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "bassim/cli.hpp"

#include "bassim/errors.hpp"
#include "bassim/metrics.hpp"
#include "bassim/sim.hpp"
#include "bassim/topology.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <array>
#include <future>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>

namespace bassim {

namespace fs = std::filesystem;

namespace {

constexpr std::array<double, 8> kGammaGrid = {0.5, 0.6, 0.7, 0.8,
                                              0.9, 0.95, 0.99, 1.0};

void setup_logging() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("bassim");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("BASS_SIM_LOG")) {
      spdlog::set_level(spdlog::level::from_str(env));
    }
  });
}

struct SimFlags {
  std::string scenario;
  int epochs = 10;
  std::uint64_t seed = 1;
  double arrival_rate = SimConfig{}.arrival_rate;
  double session_mean = SimConfig{}.session_epochs_mean;
  std::size_t k = kDefaultCandidates;
  double load_threshold = kDefaultLoadThreshold;
  double reserve = kDefaultReserveMbps;
  bool remeasure_noise = false;
  int realloc_period = 1;
  double throughput_floor = 0.0;
  std::size_t exact_max_clients = kDefaultExactMaxClients;

  SimConfig config(Policy policy, std::uint64_t run_seed) const {
    SimConfig c;
    c.epochs = epochs;
    c.arrival_rate = arrival_rate;
    c.session_epochs_mean = session_mean;
    c.policy = policy;
    c.k_candidates = k;
    c.load_threshold = load_threshold;
    c.reserve_mbps = reserve;
    c.seed = run_seed;
    c.remeasure_noise = remeasure_noise;
    c.realloc_period_epochs = realloc_period;
    c.realloc_throughput_floor_mbps = throughput_floor;
    c.exact_max_clients = exact_max_clients;
    return c;
  }
};

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("--scenario", f.scenario, "Scenario JSON file")->required();
  cmd->add_option("--epochs", f.epochs, "Scheduling rounds to simulate")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for arrivals, departures, policies")
      ->capture_default_str();
  cmd->add_option("--arrival-rate", f.arrival_rate,
                  "Mean new clients per epoch")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--session-mean", f.session_mean,
                  "Mean session length in epochs (inf: no departures)")
      ->capture_default_str();
  cmd->add_option("-k,--candidates", f.k, "Candidate servers per client")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--load-threshold", f.load_threshold,
                  "Minimum remaining/total ratio for a server to be offered")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--reserve-mbps", f.reserve,
                  "Per-server capacity kept unallocatable")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_flag("--remeasure-noise", f.remeasure_noise,
                "Draw fresh path noise every epoch");
  cmd->add_option("--realloc-period", f.realloc_period,
                  "Epochs between full re-allocations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--throughput-floor-mbps", f.throughput_floor,
                  "Re-allocate clients below this throughput between periods "
                  "(0 disables)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--exact-max-clients", f.exact_max_clients,
                  "Batch size cap for bass_exact")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::vector<EpochRecord> run_policy(const Scenario& scenario,
                                    const SimFlags& flags, Policy policy,
                                    int runs) {
  std::vector<EpochRecord> all;
  for (int r = 0; r < runs; ++r) {
    auto records = run_simulation(
        scenario, flags.config(policy, flags.seed + static_cast<std::uint64_t>(r)));
    all.insert(all.end(), std::make_move_iterator(records.begin()),
               std::make_move_iterator(records.end()));
  }
  return all;
}

double mean_objective(const PolicySummary& p) {
  if (p.objective_series.empty()) return 0.0;
  double sum = 0.0;
  for (double v : p.objective_series) sum += v;
  return sum / static_cast<double>(p.objective_series.size());
}

double cdf_at(const std::vector<CdfPoint>& points, double x) {
  double f = 0.0;
  for (const auto& p : points) {
    if (p.value > x) break;
    f = p.fraction;
  }
  return f;
}

void print_summary(std::ostream& out, const PolicySummary& p) {
  out << fmt::format("policy: {}\n", p.policy)
      << fmt::format("epochs: {}\n", p.objective_series.size())
      << fmt::format("records: {}\n", p.records)
      << fmt::format("gamma_records: {}\n", p.gamma_records)
      << fmt::format("mean_gamma: {:.6f}\n", p.mean_gamma)
      << fmt::format("frac_gamma_one: {:.6f}\n", p.frac_gamma_one)
      << fmt::format("mean_gain_multiplier: {:.6f}\n", p.multiplier.mean)
      << fmt::format("dead_direct_paths: {}\n", p.multiplier.dead_direct)
      << fmt::format("mean_objective_mbps: {:.6f}\n", mean_objective(p));
}

std::string comparison_table(const std::vector<PolicySummary>& policies,
                             bool csv) {
  const bool with_delta = policies.size() > 1;
  std::string out;
  if (csv) {
    out += "policy,records,gamma_records,mean_gamma,median_gamma,"
           "frac_gamma_one,mean_multiplier,mean_objective_mbps";
    if (with_delta) out += ",delta_mean_gamma,delta_frac_gamma_one";
    out += '\n';
  } else {
    out += fmt::format("{:<12} {:>8} {:>10} {:>12} {:>14} {:>16} {:>16}",
                       "policy", "records", "mean_gamma", "median_gamma",
                       "frac_gamma_one", "mean_multiplier", "mean_objective");
    if (with_delta) {
      out += fmt::format(" {:>17} {:>21}", "delta_mean_gamma",
                         "delta_frac_gamma_one");
    }
    out += '\n';
  }
  const PolicySummary& ref = policies.front();
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const auto& p = policies[i];
    if (csv) {
      out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}", p.policy,
                         p.records, p.gamma_records, p.mean_gamma,
                         p.median_gamma, p.frac_gamma_one, p.multiplier.mean,
                         mean_objective(p));
    } else {
      out += fmt::format("{:<12} {:>8} {:>10.6f} {:>12.6f} {:>14.6f} {:>16.6f} "
                         "{:>16.6f}",
                         p.policy, p.records, p.mean_gamma, p.median_gamma,
                         p.frac_gamma_one, p.multiplier.mean,
                         mean_objective(p));
    }
    if (with_delta) {
      if (i == 0) {
        out += csv ? ",," : fmt::format(" {:>17} {:>21}", "-", "-");
      } else {
        const double dg = p.mean_gamma - ref.mean_gamma;
        const double df = p.frac_gamma_one - ref.frac_gamma_one;
        out += csv ? fmt::format(",{:.6f},{:.6f}", dg, df)
                   : fmt::format(" {:>17.6f} {:>21.6f}", dg, df);
      }
    }
    out += '\n';
  }
  return out;
}

std::string gamma_cdf_lines(const std::vector<PolicySummary>& policies) {
  std::string out = "gamma CDF, fraction of records with gamma <= x\n";
  out += fmt::format("{:<12}", "x");
  for (double x : kGammaGrid) out += fmt::format(" {:>7.2f}", x);
  out += '\n';
  for (const auto& p : policies) {
    out += fmt::format("{:<12}", p.policy);
    for (double x : kGammaGrid) {
      out += fmt::format(" {:>7.4f}", cdf_at(p.gamma_cdf, x));
    }
    out += '\n';
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError(fmt::format("cannot create output directory '{}': {}",
                              dir.string(), ec.message()));
  }
}

int cmd_generate(int clients, int servers, int origins, std::uint64_t seed,
                 const std::string& out_path, const NetModelParams& params,
                 std::ostream& out) {
  const Scenario s = generate_scenario(clients, servers, origins, params, seed);
  save_scenario(s, out_path);
  out << fmt::format("wrote {}: {} clients, {} servers, {} origins, seed {}\n",
                     out_path, s.clients.size(), s.agg_servers.size(),
                     s.origins.size(), s.seed);
  return kExitOk;
}

int cmd_run(const SimFlags& flags, Policy policy, const std::string& out_dir,
            std::ostream& out) {
  const Scenario scenario = load_scenario(flags.scenario);
  const auto records = run_simulation(scenario, flags.config(policy, flags.seed));
  const SummaryReport report = make_report(to_string(policy), records);
  ensure_dir(out_dir);
  emit_report(report, ReportFormat::csv, fs::path(out_dir) / "records.csv");
  emit_report(report, ReportFormat::json, fs::path(out_dir) / "report.json");
  write_file(fs::path(out_dir) / "summary.csv", summary_csv(report));
  print_summary(out, report.policies.front());
  return kExitOk;
}

int cmd_compare(const SimFlags& flags, const std::vector<Policy>& policies,
                int runs, const std::string& out_dir, std::ostream& out) {
  const Scenario scenario = load_scenario(flags.scenario);
  std::vector<std::future<std::vector<EpochRecord>>> jobs;
  for (Policy p : policies) {
    jobs.push_back(std::async(std::launch::async, run_policy,
                              std::cref(scenario), std::cref(flags), p, runs));
  }
  SummaryReport combined;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const auto records = jobs[i].get();
    const auto name = to_string(policies[i]);
    combined.policies.push_back(summarize(name, records));
    auto rows = to_rows(name, records);
    combined.rows.insert(combined.rows.end(), rows.begin(), rows.end());
  }
  out << fmt::format("scenario: {}  epochs: {}  runs: {}  seed: {}\n",
                     flags.scenario, flags.epochs, runs, flags.seed);
  out << comparison_table(combined.policies, false);
  out << gamma_cdf_lines(combined.policies);
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_file(fs::path(out_dir) / "compare.csv",
               comparison_table(combined.policies, true));
    emit_report(combined, ReportFormat::csv, fs::path(out_dir) / "records.csv");
    emit_report(combined, ReportFormat::json, fs::path(out_dir) / "report.json");
    write_file(fs::path(out_dir) / "summary.csv", summary_csv(combined));
  }
  return kExitOk;
}

int cmd_report(const std::string& input, const std::string& format,
               const std::string& out_path, std::ostream& out) {
  const SummaryReport report = load_report_json(input);
  if (report.policies.empty()) {
    throw ValidationError(fmt::format("{}: report has no policies", input));
  }
  out << comparison_table(report.policies, false);
  out << gamma_cdf_lines(report.policies);
  if (!out_path.empty()) {
    emit_report(report, format == "csv" ? ReportFormat::csv : ReportFormat::json,
                out_path);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  setup_logging();

  CLI::App app{"Multipath uplink aggregation scheduling simulator", "bassim"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic scenario file");
  int n_clients = 60, m_servers = 8, k_origins = 10;
  std::uint64_t gen_seed = 42;
  std::string gen_out;
  NetModelParams params;
  gen->add_option("--clients", n_clients, "Number of B-box clients")
      ->check(CLI::Range(1, 1'000'000))
      ->capture_default_str();
  gen->add_option("--servers", m_servers, "Number of aggregation servers")
      ->check(CLI::Range(1, 1'000'000))
      ->capture_default_str();
  gen->add_option("--origins", k_origins, "Number of origin servers")
      ->check(CLI::Range(1, 1'000'000))
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "Scenario seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output scenario path")->required();
  gen->add_option("--base-path-mbps", params.base_path_mbps,
                  "Path bandwidth at zero distance")
      ->capture_default_str();
  gen->add_option("--distance-decay", params.distance_decay_per_1000km,
                  "Bandwidth decay per 1000 km")
      ->capture_default_str();
  gen->add_option("--noise-sigma", params.noise_sigma,
                  "Log-space sigma of path noise")
      ->capture_default_str();
  gen->add_option("--wifi-mu", params.wifi_lognormal_mu,
                  "Log-space mean of Wi-Fi uplinks")
      ->capture_default_str();
  gen->add_option("--wifi-sigma", params.wifi_lognormal_sigma,
                  "Log-space sigma of Wi-Fi uplinks")
      ->capture_default_str();
  gen->add_option("--cellular-low-mbps", params.cellular_uplink_mbps_low,
                  "Lower bound of cellular uplinks")
      ->capture_default_str();
  gen->add_option("--cellular-high-mbps", params.cellular_uplink_mbps_high,
                  "Upper bound of cellular uplinks")
      ->capture_default_str();
  gen->add_option("--wifi-links", params.wifi_links_per_client,
                  "Wi-Fi links per client")
      ->capture_default_str();
  gen->add_option("--cellular-links", params.cellular_links_per_client,
                  "Cellular links per client")
      ->capture_default_str();
  gen->add_option("--server-capacity-mbps", params.server_capacity_mbps,
                  "Total capacity of each aggregation server")
      ->capture_default_str();

  // run
  auto* run = app.add_subcommand("run", "Simulate one policy on a scenario");
  SimFlags run_flags;
  std::string run_policy_name = "bass_greedy";
  std::string run_out;
  add_sim_flags(run, run_flags);
  run->add_option("--policy", run_policy_name,
                  fmt::format("Allocation policy ({})", kPolicyNames))
      ->capture_default_str();
  run->add_option("--out", run_out, "Output directory")->required();

  // compare
  auto* cmp = app.add_subcommand("compare", "Run several policies on the same seeds");
  SimFlags cmp_flags;
  std::string cmp_policies = "bass_greedy,random";
  int cmp_runs = 1;
  std::string cmp_out;
  add_sim_flags(cmp, cmp_flags);
  cmp->add_option("--policies", cmp_policies, "Comma-separated policy list")
      ->capture_default_str();
  cmp->add_option("--runs", cmp_runs, "Seeds per policy: seed, seed+1, ...")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmp->add_option("--out", cmp_out, "Optional output directory");

  // report
  auto* rep = app.add_subcommand("report", "Summarize or convert a report.json");
  std::string rep_in, rep_format = "json", rep_out;
  rep->add_option("--input", rep_in, "report.json written by run/compare")
      ->required();
  rep->add_option("--format", rep_format, "Output format for --out")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  rep->add_option("--out", rep_out, "Re-emit the report to this path");

  std::vector<std::string> argv_store{"bassim"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  // Semantic flag checks: anything rejected here is a usage error.
  Policy run_policy_value = Policy::bass_greedy;
  std::vector<Policy> cmp_policy_values;
  try {
    if (gen->parsed()) validate(params);
    if (run->parsed()) {
      run_policy_value = policy_from_string(run_policy_name);
      validate(run_flags.config(run_policy_value, run_flags.seed));
    }
    if (cmp->parsed()) {
      std::set<Policy> seen;
      for (const auto& name : CLI::detail::split(cmp_policies, ',')) {
        const Policy p = policy_from_string(CLI::detail::trim_copy(name));
        if (!seen.insert(p).second) {
          throw ValidationError(fmt::format("policy '{}' listed twice", name));
        }
        cmp_policy_values.push_back(p);
      }
      validate(cmp_flags.config(cmp_policy_values.front(), cmp_flags.seed));
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_generate(n_clients, m_servers, k_origins, gen_seed, gen_out,
                          params, out);
    }
    if (run->parsed()) return cmd_run(run_flags, run_policy_value, run_out, out);
    if (cmp->parsed()) {
      return cmd_compare(cmp_flags, cmp_policy_values, cmp_runs, cmp_out, out);
    }
    if (rep->parsed()) return cmd_report(rep_in, rep_format, rep_out, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace bassim
