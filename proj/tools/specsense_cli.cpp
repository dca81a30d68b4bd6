// Command-line front end for the spectrum sensing Monte Carlo toolkit.
//
// Subcommands:
//   reliability  error-probability sweep over channel counts and cycle counts
//   agility      budget search at a target error, one-shot baseline vs adaptive
//   region       detectability classification over an (alpha, beta) grid
//   trace        single-realization exploration trace
//   theory       closed-form predictions for one operating point
//
// Every file-writing run creates "<out>.meta.json" before computing and
// finalizes it afterwards; an interrupted run leaves it marked incomplete.
// Exit codes: 0 success, 2 usage error, 1 runtime failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "specsense/cli_util.hpp"
#include "specsense/experiments.hpp"
#include "specsense/io.hpp"
#include "specsense/theory.hpp"

namespace {

namespace exp = specsense::experiments;
namespace io = specsense::io;
namespace cli = specsense::cli;
namespace theory = specsense::theory;

struct ReliabilityOpts {
  std::string n_range = "10:1000:log25";
  int m = 5;
  int t = 2;
  std::string k_list = "1,2,3,4";
  double alpha_exp = -2.0 / 3.0;
  double beta_exp = 0.2;
  std::string epsilon_list;
  std::string gamma_list;
  std::int64_t trials = 10000;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out = "reliability.csv";
};

struct AgilityOpts {
  double target = 0.01;
  int n = 1000;
  int t = 2;
  std::string k_list = "1,2,3,4";
  double alpha_exp = -2.0 / 3.0;
  double beta_exp = 0.2;
  int m_max = 64;
  std::int64_t trials = 10000;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out = "agility.csv";
};

struct RegionOpts {
  std::string alpha_list = "0.25,0.3,0.55,0.7,0.85";
  std::string beta_list = "0.013,0.024,0.36,0.42,0.48";
  int m = 5;
  int k = 4;
  int n = 1000;
  int t = 2;
  double threshold = 0.1;
  std::int64_t trials = 1000;
  std::uint64_t seed = 42;
  int threads = 1;
  std::string out = "region.csv";
};

struct TraceOpts {
  int n = 1000;
  double alpha_exp = -2.0 / 3.0;
  double beta_exp = 0.2;
  int k = 4;
  int m_explore = 1;
  std::uint64_t seed = 42;
  std::string out = "trace.csv";
};

struct TheoryOpts {
  int m = 5;
  int k = 4;
  int n = 1000;
  int t = 2;
  double alpha_exp = -2.0 / 3.0;
  double beta_exp = 0.2;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int usage_error(const std::exception& e) {
  std::fprintf(stderr, "usage error: %s\n", e.what());
  return 2;
}

int run_reliability(const ReliabilityOpts& o) {
  exp::SweepSpec spec;
  try {
    spec.n_values = cli::parse_int_range(o.n_range);
    spec.k_values = cli::parse_int_list(o.k_list);
    spec.epsilon_rule = o.epsilon_list.empty()
                            ? exp::ValueRule::power_of_n(o.alpha_exp)
                            : exp::ValueRule::explicit_list(cli::parse_double_list(o.epsilon_list));
    spec.gamma_rule = o.gamma_list.empty()
                          ? exp::ValueRule::power_of_n(o.beta_exp)
                          : exp::ValueRule::explicit_list(cli::parse_double_list(o.gamma_list));
    spec.m = o.m;
    spec.t = o.t;
    spec.trials = o.trials;
    spec.master_seed = o.seed;
    spec.validate();
  } catch (const std::exception& e) {
    return usage_error(e);
  }

  nlohmann::json params{{"n", o.n_range},         {"m", o.m},
                        {"t", o.t},               {"k", o.k_list},
                        {"alpha_exp", o.alpha_exp}, {"beta_exp", o.beta_exp},
                        {"epsilon", o.epsilon_list}, {"gamma", o.gamma_list},
                        {"trials", o.trials},     {"threads", o.threads}};
  nlohmann::json meta = io::make_run_metadata("reliability", o.seed, std::move(params));
  io::write_json_file(io::metadata_path(o.out), meta);

  const auto start = std::chrono::steady_clock::now();
  const auto rows = exp::run_reliability_sweep(spec, o.threads);
  io::write_results_csv(o.out, rows);

  meta["status"] = "complete";
  meta["duration_seconds"] = seconds_since(start);
  io::write_json_file(io::metadata_path(o.out), meta);
  std::printf("reliability: %zu rows -> %s (%.1f s)\n", rows.size(), o.out.c_str(),
              seconds_since(start));
  return 0;
}

int run_agility(const AgilityOpts& o) {
  std::vector<int> ks;
  double epsilon = 0.0, gamma = 0.0;
  try {
    ks = cli::parse_int_list(o.k_list);
    for (int k : ks)
      if (k < 1) throw std::invalid_argument("--k entries must be >= 1 (the one-shot baseline always runs)");
    epsilon = std::pow(static_cast<double>(o.n), o.alpha_exp);
    gamma = std::pow(static_cast<double>(o.n), o.beta_exp);
    if (!(o.target > 0.0 && o.target < 1.0))
      throw std::invalid_argument("--target must lie in (0, 1)");
    if (o.m_max < 1) throw std::invalid_argument("--m-max must be >= 1");
    if (o.trials < 1) throw std::invalid_argument("--trials must be >= 1");
  } catch (const std::exception& e) {
    return usage_error(e);
  }

  nlohmann::json params{{"target", o.target},     {"n", o.n},
                        {"t", o.t},               {"k", o.k_list},
                        {"alpha_exp", o.alpha_exp}, {"beta_exp", o.beta_exp},
                        {"m_max", o.m_max},       {"trials", o.trials},
                        {"threads", o.threads}};
  nlohmann::json meta = io::make_run_metadata("agility", o.seed, std::move(params));
  io::write_json_file(io::metadata_path(o.out), meta);

  const auto start = std::chrono::steady_clock::now();
  std::vector<exp::ResultRow> rows;
  nlohmann::json details = nlohmann::json::array();
  const exp::BudgetSearchResult base = exp::find_required_budget(
      o.target, 0, o.n, epsilon, gamma, o.t, o.trials, o.seed, o.m_max, o.threads);
  rows.push_back(base.row);
  details.push_back({{"k", 0},
                     {"attainable", base.attainable},
                     {"per_channel_budget", base.per_channel_budget},
                     {"probes", base.probes},
                     {"monotonicity_violated", base.monotonicity_violated}});
  for (int k : ks) {
    const exp::BudgetSearchResult found = exp::find_required_budget(
        o.target, k, o.n, epsilon, gamma, o.t, o.trials, o.seed, o.m_max, o.threads);
    rows.push_back(found.row);
    nlohmann::json entry{{"k", k},
                         {"attainable", found.attainable},
                         {"per_channel_budget", found.per_channel_budget},
                         {"probes", found.probes},
                         {"monotonicity_violated", found.monotonicity_violated}};
    if (base.attainable && found.attainable)
      entry["gain_vs_one_shot"] = base.per_channel_budget / found.per_channel_budget;
    details.push_back(std::move(entry));
  }
  io::write_results_csv(o.out, rows);

  meta["status"] = "complete";
  meta["duration_seconds"] = seconds_since(start);
  meta["results"] = std::move(details);
  io::write_json_file(io::metadata_path(o.out), meta);
  std::printf("agility: %zu rows -> %s (%.1f s)\n", rows.size(), o.out.c_str(),
              seconds_since(start));
  return 0;
}

int run_region(const RegionOpts& o) {
  std::vector<double> alphas, betas;
  try {
    alphas = cli::parse_double_list(o.alpha_list);
    betas = cli::parse_double_list(o.beta_list);
  } catch (const std::exception& e) {
    return usage_error(e);
  }

  nlohmann::json params{{"alpha", o.alpha_list}, {"beta", o.beta_list},
                        {"m", o.m},              {"k", o.k},
                        {"n", o.n},              {"t", o.t},
                        {"threshold", o.threshold}, {"trials", o.trials},
                        {"threads", o.threads}};
  nlohmann::json meta = io::make_run_metadata("region", o.seed, std::move(params));
  io::write_json_file(io::metadata_path(o.out), meta);

  const auto start = std::chrono::steady_clock::now();
  exp::GridResult grid;
  try {
    grid = exp::detectability_grid(alphas, betas, o.m, o.k, o.n, o.trials, o.seed, o.t,
                                   o.threshold, o.threads);
  } catch (const std::invalid_argument& e) {
    return usage_error(e);
  }
  io::write_results_csv(o.out, grid.rows);

  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : grid.cells)
    cells.push_back({{"alpha", cell.alpha},
                     {"beta", cell.beta},
                     {"epsilon", cell.epsilon},
                     {"gamma", cell.gamma},
                     {"err_one_shot", cell.err_one_shot},
                     {"err_adaptive", cell.err_adaptive},
                     {"classification", exp::to_string(cell.classification)}});
  nlohmann::json boundaries = nlohmann::json::array();
  for (std::size_t i = 0; i < alphas.size(); ++i)
    boundaries.push_back({{"alpha", alphas[i]},
                          {"beta_one_shot", grid.boundaries[i].first},
                          {"beta_adaptive", grid.boundaries[i].second}});
  meta["status"] = "complete";
  meta["duration_seconds"] = seconds_since(start);
  meta["threshold"] = grid.threshold;
  meta["cells"] = std::move(cells);
  meta["boundaries"] = std::move(boundaries);
  io::write_json_file(io::metadata_path(o.out), meta);
  std::printf("region: %zu cells -> %s (%.1f s)\n", grid.cells.size(), o.out.c_str(),
              seconds_since(start));
  return 0;
}

int run_trace(const TraceOpts& o) {
  const double epsilon = std::pow(static_cast<double>(o.n), o.alpha_exp);
  const double gamma = std::pow(static_cast<double>(o.n), o.beta_exp);

  nlohmann::json params{{"n", o.n},
                        {"alpha_exp", o.alpha_exp},
                        {"beta_exp", o.beta_exp},
                        {"k", o.k},
                        {"m_explore", o.m_explore}};
  nlohmann::json meta = io::make_run_metadata("trace", o.seed, std::move(params));
  io::write_json_file(io::metadata_path(o.out), meta);

  const auto start = std::chrono::steady_clock::now();
  exp::TraceResult trace;
  try {
    trace = exp::exploration_trace(o.n, epsilon, gamma, o.k, o.seed, o.m_explore);
  } catch (const std::invalid_argument& e) {
    return usage_error(e);
  }
  io::write_trace_csv(o.out, trace);

  meta["status"] = "complete";
  meta["duration_seconds"] = seconds_since(start);
  io::write_json_file(io::metadata_path(o.out), meta);
  const auto& first = trace.rows.front();
  const auto& last = trace.rows.back();
  std::printf("trace: %d cycles, %d -> %d channels retained -> %s\n", o.k,
              first.holes + first.occupied, last.holes + last.occupied, o.out.c_str());
  return 0;
}

int run_theory(const TheoryOpts& o) {
  const double epsilon = std::pow(static_cast<double>(o.n), o.alpha_exp);
  const double gamma = std::pow(static_cast<double>(o.n), o.beta_exp);
  double p_na = 0.0, p_a = 0.0, gain = 0.0, m_detect = 0.0;
  std::int64_t m_eff = 0;
  try {
    p_na = theory::p_na_asymptotic(gamma, o.m, epsilon, o.t);
    m_eff = theory::m_prime(o.m, o.k);
    p_a = theory::p_a_asymptotic(gamma, static_cast<double>(m_eff), o.k, epsilon, o.t);
    gain = theory::agility_gain_lower_bound(o.m, o.k);
    m_detect = theory::detection_allocation_asymptotic(o.m, o.k, gamma);
  } catch (const std::exception& e) {
    return usage_error(e);
  }
  const double k_star = epsilon < std::exp(-1.0) ? theory::optimal_cycles(epsilon)
                                                 : std::nan("");
  std::printf("n=%d\n", o.n);
  std::printf("epsilon=%s\n", io::format_double(epsilon).c_str());
  std::printf("gamma=%s\n", io::format_double(gamma).c_str());
  std::printf("m=%d\nk=%d\nt=%d\n", o.m, o.k, o.t);
  std::printf("p_na=%s\n", io::format_double(p_na).c_str());
  std::printf("p_a=%s\n", io::format_double(p_a).c_str());
  std::printf("agility_gain_lb=%s\n", io::format_double(gain).c_str());
  std::printf("m_prime=%lld\n", static_cast<long long>(m_eff));
  std::printf("m_detect_asymptotic=%s\n", io::format_double(m_detect).c_str());
  std::printf("k_star=%s\n", io::format_double(k_star).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectrum sensing Monte Carlo toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kToolVersion));

  ReliabilityOpts rel;
  CLI::App* reliability =
      app.add_subcommand("reliability", "Error-probability sweep over n and cycle counts");
  reliability->add_option("--n", rel.n_range, "channel counts (lo:hi:logN, lo:hi:linN, or list)")
      ->capture_default_str();
  reliability->add_option("--m", rel.m, "per-channel sampling budget")->capture_default_str();
  reliability->add_option("--t", rel.t, "holes to return")->capture_default_str();
  reliability->add_option("--k", rel.k_list, "adaptive cycle counts (comma list)")
      ->capture_default_str();
  reliability->add_option("--alpha-exp", rel.alpha_exp, "epsilon = n^alpha_exp")
      ->capture_default_str();
  reliability->add_option("--beta-exp", rel.beta_exp, "gamma = n^beta_exp")
      ->capture_default_str();
  reliability->add_option("--epsilon", rel.epsilon_list,
                          "explicit epsilon list (overrides --alpha-exp; one per n)");
  reliability->add_option("--gamma", rel.gamma_list,
                          "explicit gamma list (overrides --beta-exp; one per n)");
  reliability->add_option("--trials", rel.trials, "Monte Carlo trials per cell")
      ->capture_default_str();
  reliability->add_option("--seed", rel.seed, "master seed")->capture_default_str();
  reliability->add_option("--threads", rel.threads, "worker threads (never changes results)")
      ->capture_default_str();
  reliability->add_option("--out", rel.out, "results CSV path")->capture_default_str();

  AgilityOpts agi;
  CLI::App* agility =
      app.add_subcommand("agility", "Required budget at a target error, one-shot vs adaptive");
  agility->add_option("--target", agi.target, "target error probability")->capture_default_str();
  agility->add_option("--n", agi.n, "channel count")->capture_default_str();
  agility->add_option("--t", agi.t, "holes to return")->capture_default_str();
  agility->add_option("--k", agi.k_list, "adaptive cycle counts (comma list)")
      ->capture_default_str();
  agility->add_option("--alpha-exp", agi.alpha_exp, "epsilon = n^alpha_exp")
      ->capture_default_str();
  agility->add_option("--beta-exp", agi.beta_exp, "gamma = n^beta_exp")->capture_default_str();
  agility->add_option("--m-max", agi.m_max, "largest per-channel budget probed")
      ->capture_default_str();
  agility->add_option("--trials", agi.trials, "Monte Carlo trials per probe")
      ->capture_default_str();
  agility->add_option("--seed", agi.seed, "master seed")->capture_default_str();
  agility->add_option("--threads", agi.threads, "worker threads (never changes results)")
      ->capture_default_str();
  agility->add_option("--out", agi.out, "results CSV path")->capture_default_str();

  RegionOpts reg;
  CLI::App* region =
      app.add_subcommand("region", "Detectability classification over an (alpha, beta) grid");
  region->add_option("--alpha", reg.alpha_list, "alpha grid (comma list, in [0,1])")
      ->capture_default_str();
  region->add_option("--beta", reg.beta_list, "beta grid (comma list, positive)")
      ->capture_default_str();
  region->add_option("--m", reg.m, "per-channel sampling budget")->capture_default_str();
  region->add_option("--k", reg.k, "adaptive cycle count")->capture_default_str();
  region->add_option("--n", reg.n, "channel count")->capture_default_str();
  region->add_option("--t", reg.t, "holes to return")->capture_default_str();
  region->add_option("--threshold", reg.threshold, "success threshold on error rate")
      ->capture_default_str();
  region->add_option("--trials", reg.trials, "Monte Carlo trials per cell")
      ->capture_default_str();
  region->add_option("--seed", reg.seed, "master seed")->capture_default_str();
  region->add_option("--threads", reg.threads, "worker threads (never changes results)")
      ->capture_default_str();
  region->add_option("--out", reg.out, "results CSV path")->capture_default_str();

  TraceOpts tra;
  CLI::App* trace = app.add_subcommand("trace", "Single-realization exploration trace");
  trace->add_option("--n", tra.n, "channel count")->capture_default_str();
  trace->add_option("--alpha-exp", tra.alpha_exp, "epsilon = n^alpha_exp")
      ->capture_default_str();
  trace->add_option("--beta-exp", tra.beta_exp, "gamma = n^beta_exp")->capture_default_str();
  trace->add_option("--k", tra.k, "exploration cycles")->capture_default_str();
  trace->add_option("--m-explore", tra.m_explore, "samples per retained channel per cycle")
      ->capture_default_str();
  trace->add_option("--seed", tra.seed, "master seed")->capture_default_str();
  trace->add_option("--out", tra.out, "trace CSV path")->capture_default_str();

  TheoryOpts the;
  CLI::App* theory_cmd =
      app.add_subcommand("theory", "Closed-form predictions for one operating point");
  theory_cmd->add_option("--m", the.m, "per-channel sampling budget")->capture_default_str();
  theory_cmd->add_option("--k", the.k, "adaptive cycle count")->capture_default_str();
  theory_cmd->add_option("--n", the.n, "channel count")->capture_default_str();
  theory_cmd->add_option("--t", the.t, "holes to return")->capture_default_str();
  theory_cmd->add_option("--alpha-exp", the.alpha_exp, "epsilon = n^alpha_exp")
      ->capture_default_str();
  theory_cmd->add_option("--beta-exp", the.beta_exp, "gamma = n^beta_exp")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (reliability->parsed()) return run_reliability(rel);
    if (agility->parsed()) return run_agility(agi);
    if (region->parsed()) return run_region(reg);
    if (trace->parsed()) return run_trace(tra);
    if (theory_cmd->parsed()) return run_theory(the);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
