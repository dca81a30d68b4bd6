#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "specsense/detect.hpp"
#include "specsense/random.hpp"
#include "specsense/spectrum.hpp"
#include "specsense/theory.hpp"

namespace specsense {
namespace experiments {

// ---------------------------------------------------------------------------
// Confidence intervals
// ---------------------------------------------------------------------------

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion; default z is the 95%
/// two-sided normal quantile. Well-behaved at counts of 0 and trials.
inline WilsonInterval wilson_interval(std::int64_t count, std::int64_t trials,
                                      double z = 1.959963984540054) {
  if (trials < 1) throw std::invalid_argument("wilson_interval: trials must be >= 1");
  if (count < 0 || count > trials)
    throw std::invalid_argument("wilson_interval: count out of range");
  const double nn = static_cast<double>(trials);
  const double p = static_cast<double>(count) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // Rounding can land the bounds an ulp inside the point estimate; the
  // interval must always contain it.
  return {std::max(0.0, std::min(center - half, p)),
          std::min(1.0, std::max(center + half, p))};
}

// ---------------------------------------------------------------------------
// Deterministic parallel driver
// ---------------------------------------------------------------------------

/// Runs body(0..total-1) on up to `threads` workers pulling indices from a
/// shared counter. Bodies must write only to their own index's slot, which
/// makes results independent of scheduling; the first exception thrown by
/// any body is rethrown in the caller after all workers join.
template <class Fn>
inline void parallel_for(std::int64_t total, int threads, Fn&& body) {
  if (total <= 0) return;
  int workers = threads < 1 ? 1 : threads;
  if (static_cast<std::int64_t>(workers) > total) workers = static_cast<int>(total);
  if (workers == 1) {
    for (std::int64_t i = 0; i < total; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= total) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Sweep configuration
// ---------------------------------------------------------------------------

/// Parameter rule: either a power of the channel count (value = n^exponent)
/// or an explicit per-n list aligned with SweepSpec::n_values.
struct ValueRule {
  bool from_exponent = true;
  double exponent = 0.0;
  std::vector<double> values;

  static ValueRule power_of_n(double e) {
    ValueRule rule;
    rule.from_exponent = true;
    rule.exponent = e;
    return rule;
  }
  static ValueRule explicit_list(std::vector<double> v) {
    ValueRule rule;
    rule.from_exponent = false;
    rule.values = std::move(v);
    return rule;
  }
  double value_at(int n, std::size_t index) const {
    if (from_exponent) return std::pow(static_cast<double>(n), exponent);
    if (index >= values.size())
      throw std::invalid_argument("ValueRule: list shorter than the n list");
    return values[index];
  }
};

struct SweepSpec {
  std::vector<int> n_values;
  ValueRule epsilon_rule = ValueRule::power_of_n(-2.0 / 3.0);
  ValueRule gamma_rule = ValueRule::power_of_n(0.2);
  int m = 5;  // per-channel sampling budget
  std::vector<int> k_values = {1, 2, 3, 4};
  int t = 2;
  std::int64_t trials = 10000;
  std::uint64_t master_seed = 42;

  void validate() const {
    if (n_values.empty()) throw std::invalid_argument("SweepSpec: n_values empty");
    if (m < 1) throw std::invalid_argument("SweepSpec: m must be >= 1");
    if (t < 1) throw std::invalid_argument("SweepSpec: t must be >= 1");
    if (trials < 1) throw std::invalid_argument("SweepSpec: trials must be >= 1");
    for (int n : n_values)
      if (n < std::max(t, 2)) throw std::invalid_argument("SweepSpec: n must be >= max(t, 2)");
    for (int k : k_values)
      if (k < 0) throw std::invalid_argument("SweepSpec: cycle counts must be >= 0");
    if (!epsilon_rule.from_exponent && epsilon_rule.values.size() != n_values.size())
      throw std::invalid_argument("SweepSpec: epsilon list must match n_values");
    if (!gamma_rule.from_exponent && gamma_rule.values.size() != n_values.size())
      throw std::invalid_argument("SweepSpec: gamma list must match n_values");
  }
};

/// One aggregated parameter cell, mirroring the results CSV schema.
struct ResultRow {
  std::string experiment;
  int n = 0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double m = 0.0;  // per-channel budget; fractional only for budget-search rows
  int k = 0;       // 0 = one-shot detector
  int t = 0;
  std::int64_t trials = 0;
  double err_emp = 0.0;
  double err_lo = 0.0;
  double err_hi = 0.0;
  double err_theory = 0.0;
  double mean_samples = 0.0;
  std::int64_t fail_picked_occupied = 0;
  std::int64_t fail_insufficient = 0;
  std::int64_t fail_budget = 0;
};

namespace detail {

inline constexpr std::uint64_t kReliabilityKind = 1;
inline constexpr std::uint64_t kAgilityKind = 2;
inline constexpr std::uint64_t kRegionKind = 3;
inline constexpr std::uint64_t kTraceKind = 4;

inline std::uint64_t experiment_id(std::uint64_t kind, std::uint64_t ordinal) {
  return (kind << 32) | (ordinal & 0xffffffffull);
}

struct CellTask {
  ScenarioConfig config;
  int cycles = 0;                  // 0 = one-shot detector
  int samples_per_channel = 0;     // one-shot path
  std::int64_t total_budget = 0;   // adaptive path
};

struct CellStats {
  std::int64_t trials = 0;
  std::int64_t errors = 0;
  std::int64_t fail_po = 0;
  std::int64_t fail_is = 0;
  std::int64_t fail_be = 0;
  double mean_samples = 0.0;
};

/// Monte Carlo over one parameter cell. Each trial owns a random stream
/// derived from (master_seed, experiment_id, trial) and writes into its own
/// slot, so the aggregate is independent of thread count and scheduling.
inline CellStats run_cell(const CellTask& task, std::int64_t trials,
                          std::uint64_t master_seed, std::uint64_t experiment_id,
                          int threads) {
  struct Slot {
    std::uint8_t error = 0;
    FailureKind kind = FailureKind::kNone;
    std::int64_t spent = 0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(trials));
  const PowerModel model = PowerModel::worst_case();
  parallel_for(trials, threads, [&](std::int64_t trial) {
    RandomStream rng(derive_trial_seed(master_seed, experiment_id,
                                       static_cast<std::uint64_t>(trial)));
    const Realization real = draw_occupancy(task.config, rng, model);
    const DetectionOutcome out =
        task.cycles == 0
            ? run_nonadaptive(task.config, real, task.samples_per_channel, rng)
            : run_adaptive(task.config, real, task.cycles, task.total_budget, rng);
    auto& slot = slots[static_cast<std::size_t>(trial)];
    slot.error = out.success ? 0 : 1;
    slot.kind = out.failure;
    slot.spent = out.samples_spent;
  });

  CellStats stats;
  stats.trials = trials;
  long double spent_sum = 0.0L;
  for (const Slot& slot : slots) {
    stats.errors += slot.error;
    switch (slot.kind) {
      case FailureKind::kNone: break;
      case FailureKind::kPickedOccupied: ++stats.fail_po; break;
      case FailureKind::kInsufficientSurvivors: ++stats.fail_is; break;
      case FailureKind::kBudgetExhausted: ++stats.fail_be; break;
    }
    spent_sum += static_cast<long double>(slot.spent);
  }
  stats.mean_samples = static_cast<double>(spent_sum / static_cast<long double>(trials));
  return stats;
}

inline ResultRow make_row(std::string experiment, const ScenarioConfig& config, double m,
                          int k, const CellStats& stats, double err_theory) {
  ResultRow row;
  row.experiment = std::move(experiment);
  row.n = config.n;
  row.epsilon = config.epsilon;
  row.gamma = config.gamma;
  row.m = m;
  row.k = k;
  row.t = config.target_holes;
  row.trials = stats.trials;
  row.err_emp = static_cast<double>(stats.errors) / static_cast<double>(stats.trials);
  const WilsonInterval w = wilson_interval(stats.errors, stats.trials);
  row.err_lo = w.lo;
  row.err_hi = w.hi;
  row.err_theory = err_theory;
  row.mean_samples = stats.mean_samples;
  row.fail_picked_occupied = stats.fail_po;
  row.fail_insufficient = stats.fail_is;
  row.fail_budget = stats.fail_be;
  return row;
}

/// Asymptotic error overlay at the budget-conserving detection allocation
/// 2^k(M-2)+2; reduces to the one-shot formula at k = 0.
inline double overlay_error(double gamma, int m, int k, double epsilon, int t) {
  const double m_detect = static_cast<double>(theory::m_prime(m, k));
  return theory::p_a_asymptotic(gamma, m_detect, k, epsilon, t);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Error-probability sweep (one-shot baseline plus adaptive cycles)
// ---------------------------------------------------------------------------

/// For every n and every cycle count (0 denoting the one-shot detector,
/// always included), runs `trials` seeded realizations and aggregates error
/// rates, Wilson intervals, the closed-form overlay, budget usage, and
/// failure-kind counts. Per-trial failures are data, never aborts.
inline std::vector<ResultRow> run_reliability_sweep(const SweepSpec& spec, int threads = 1) {
  spec.validate();
  std::vector<int> cycle_list{0};
  for (int k : spec.k_values)
    if (k != 0) cycle_list.push_back(k);

  std::vector<ResultRow> rows;
  rows.reserve(spec.n_values.size() * cycle_list.size());
  std::uint64_t ordinal = 0;
  for (std::size_t ni = 0; ni < spec.n_values.size(); ++ni) {
    const int n = spec.n_values[ni];
    ScenarioConfig config;
    config.n = n;
    config.epsilon = spec.epsilon_rule.value_at(n, ni);
    config.gamma = spec.gamma_rule.value_at(n, ni);
    config.target_holes = spec.t;
    config.validate();
    for (int k : cycle_list) {
      detail::CellTask task;
      task.config = config;
      task.cycles = k;
      task.samples_per_channel = spec.m;
      task.total_budget = static_cast<std::int64_t>(spec.m) * n;
      const detail::CellStats stats =
          detail::run_cell(task, spec.trials, spec.master_seed,
                           detail::experiment_id(detail::kReliabilityKind, ordinal++),
                           threads);
      rows.push_back(detail::make_row(
          "reliability", config, static_cast<double>(spec.m), k, stats,
          detail::overlay_error(config.gamma, spec.m, k, config.epsilon, spec.t)));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Budget search at a target error
// ---------------------------------------------------------------------------

struct BudgetSearchResult {
  bool attainable = false;
  double per_channel_budget = 0.0;
  std::int64_t probes = 0;
  bool monotonicity_violated = false;
  ResultRow row;  // statistics at the returned budget (or at m_max if unattainable)
};

/// Smallest per-channel budget whose upper Wilson bound meets target_error,
/// found by bisection. cycles = 0 searches integer samples-per-channel for
/// the one-shot detector; cycles >= 1 searches integer total budget (1/n
/// per-channel granularity) for the adaptive detector. Every probe reuses
/// the same trial seeds (common random numbers), which makes the error
/// curve monotone in practice; probe pairs whose Wilson intervals order the
/// wrong way are still flagged. An unreachable target is reported, not thrown.
inline BudgetSearchResult find_required_budget(double target_error, int cycles, int n,
                                               double epsilon, double gamma, int t,
                                               std::int64_t trials, std::uint64_t seed,
                                               int m_max = 64, int threads = 1) {
  if (!(target_error > 0.0 && target_error < 1.0))
    throw std::invalid_argument("find_required_budget: target must lie in (0, 1)");
  if (cycles < 0) throw std::invalid_argument("find_required_budget: cycles must be >= 0");
  if (m_max < 1) throw std::invalid_argument("find_required_budget: m_max must be >= 1");
  if (trials < 1) throw std::invalid_argument("find_required_budget: trials must be >= 1");
  ScenarioConfig config;
  config.n = n;
  config.epsilon = epsilon;
  config.gamma = gamma;
  config.target_holes = t;
  config.validate();

  const std::uint64_t id =
      detail::experiment_id(detail::kAgilityKind, static_cast<std::uint64_t>(cycles));
  struct Probe {
    std::int64_t grid = 0;
    detail::CellStats stats;
    WilsonInterval w;
  };
  std::vector<Probe> probes;
  auto run_probe = [&](std::int64_t grid) -> const Probe& {
    detail::CellTask task;
    task.config = config;
    task.cycles = cycles;
    if (cycles == 0)
      task.samples_per_channel = static_cast<int>(grid);
    else
      task.total_budget = grid;
    Probe probe;
    probe.grid = grid;
    probe.stats = detail::run_cell(task, trials, seed, id, threads);
    probe.w = wilson_interval(probe.stats.errors, trials);
    probes.push_back(std::move(probe));
    return probes.back();
  };
  const auto per_channel = [&](std::int64_t grid) {
    return cycles == 0 ? static_cast<double>(grid)
                       : static_cast<double>(grid) / static_cast<double>(n);
  };

  const std::int64_t lo_grid = cycles == 0 ? 1 : n;
  const std::int64_t hi_grid =
      cycles == 0 ? m_max : static_cast<std::int64_t>(m_max) * n;

  BudgetSearchResult result;
  const Probe top = run_probe(hi_grid);
  std::int64_t chosen = hi_grid;
  if (top.w.hi <= target_error) {
    result.attainable = true;
    std::int64_t lo = lo_grid, hi = hi_grid;
    while (lo < hi) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (run_probe(mid).w.hi <= target_error)
        hi = mid;
      else
        lo = mid + 1;
    }
    chosen = lo;
  }
  result.per_channel_budget = per_channel(chosen);
  result.probes = static_cast<std::int64_t>(probes.size());

  // Wrong-way ordering beyond noise: a strictly larger budget whose whole
  // Wilson interval sits above a smaller budget's interval.
  std::sort(probes.begin(), probes.end(),
            [](const Probe& a, const Probe& b) { return a.grid < b.grid; });
  for (std::size_t i = 0; i < probes.size(); ++i)
    for (std::size_t j = i + 1; j < probes.size(); ++j)
      if (probes[j].grid > probes[i].grid && probes[j].w.lo > probes[i].w.hi)
        result.monotonicity_violated = true;

  const Probe* chosen_probe = nullptr;
  for (const Probe& probe : probes)
    if (probe.grid == chosen) chosen_probe = &probe;
  result.row = detail::make_row("agility", config, result.per_channel_budget, cycles,
                                chosen_probe->stats, target_error);
  return result;
}

// ---------------------------------------------------------------------------
// Detectability region grid
// ---------------------------------------------------------------------------

enum class CellClass { kBothFail, kAdaptiveOnly, kOneShotOnly, kBothSucceed };

inline const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::kBothFail: return "both-fail";
    case CellClass::kAdaptiveOnly: return "adaptive-only";
    case CellClass::kOneShotOnly: return "one-shot-only";
    case CellClass::kBothSucceed: return "both-succeed";
  }
  return "?";
}

struct GridCell {
  double alpha = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double err_one_shot = 0.0;
  double err_adaptive = 0.0;
  CellClass classification = CellClass::kBothFail;
};

struct GridResult {
  std::vector<GridCell> cells;  // row-major over alpha_grid x beta_grid
  // (beta_one_shot, beta_adaptive) theoretical boundary per alpha value
  std::vector<std::pair<double, double>> boundaries;
  std::vector<ResultRow> rows;  // two CSV rows per cell: one-shot then adaptive
  double threshold = 0.0;
};

/// Classifies each (alpha, beta) cell under epsilon = n^(alpha-1),
/// gamma = n^beta by the empirical error of both detectors against a
/// success threshold (strict <). Both methods get the same total budget M*n.
inline GridResult detectability_grid(const std::vector<double>& alpha_grid,
                                     const std::vector<double>& beta_grid, int m, int k,
                                     int n, std::int64_t trials, std::uint64_t seed,
                                     int t = 2, double threshold = 0.1, int threads = 1) {
  if (alpha_grid.empty() || beta_grid.empty())
    throw std::invalid_argument("detectability_grid: empty grid");
  for (double a : alpha_grid)
    if (!(a >= 0.0 && a <= 1.0))
      throw std::invalid_argument("detectability_grid: alpha must lie in [0, 1]");
  for (double b : beta_grid)
    if (!(b > 0.0)) throw std::invalid_argument("detectability_grid: beta must be positive");
  if (m < 1) throw std::invalid_argument("detectability_grid: m must be >= 1");
  if (k < 0) throw std::invalid_argument("detectability_grid: cycles must be >= 0");
  if (trials < 1) throw std::invalid_argument("detectability_grid: trials must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("detectability_grid: threshold must lie in (0, 1)");

  GridResult grid;
  grid.threshold = threshold;
  grid.cells.reserve(alpha_grid.size() * beta_grid.size());
  grid.boundaries.reserve(alpha_grid.size());
  for (double alpha : alpha_grid)
    grid.boundaries.push_back(theory::power_scaling_boundaries(alpha, m, k));

  for (std::size_t ai = 0; ai < alpha_grid.size(); ++ai) {
    for (std::size_t bi = 0; bi < beta_grid.size(); ++bi) {
      const double alpha = alpha_grid[ai];
      const double beta = beta_grid[bi];
      ScenarioConfig config;
      config.n = n;
      config.epsilon = std::pow(static_cast<double>(n), alpha - 1.0);
      config.gamma = std::pow(static_cast<double>(n), beta);
      config.target_holes = t;
      config.validate();

      const std::uint64_t base = (ai * beta_grid.size() + bi) * 2;
      detail::CellTask one_shot;
      one_shot.config = config;
      one_shot.cycles = 0;
      one_shot.samples_per_channel = m;
      const detail::CellStats na_stats =
          detail::run_cell(one_shot, trials, seed,
                           detail::experiment_id(detail::kRegionKind, base), threads);

      detail::CellTask adaptive;
      adaptive.config = config;
      adaptive.cycles = k;
      adaptive.total_budget = static_cast<std::int64_t>(m) * n;
      const detail::CellStats a_stats =
          detail::run_cell(adaptive, trials, seed,
                           detail::experiment_id(detail::kRegionKind, base + 1), threads);

      GridCell cell;
      cell.alpha = alpha;
      cell.beta = beta;
      cell.epsilon = config.epsilon;
      cell.gamma = config.gamma;
      cell.err_one_shot =
          static_cast<double>(na_stats.errors) / static_cast<double>(trials);
      cell.err_adaptive =
          static_cast<double>(a_stats.errors) / static_cast<double>(trials);
      const bool na_ok = cell.err_one_shot < threshold;
      const bool a_ok = cell.err_adaptive < threshold;
      cell.classification = na_ok ? (a_ok ? CellClass::kBothSucceed : CellClass::kOneShotOnly)
                                  : (a_ok ? CellClass::kAdaptiveOnly : CellClass::kBothFail);
      grid.cells.push_back(cell);

      grid.rows.push_back(detail::make_row(
          "region", config, static_cast<double>(m), 0, na_stats,
          detail::overlay_error(config.gamma, m, 0, config.epsilon, t)));
      grid.rows.push_back(detail::make_row(
          "region", config, static_cast<double>(m), k, a_stats,
          detail::overlay_error(config.gamma, m, k, config.epsilon, t)));
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Single-realization exploration trace
// ---------------------------------------------------------------------------

struct TraceRow {
  int cycle = 0;  // 0 = initial census, then one row per exploration pass
  int holes = 0;
  int occupied = 0;
};

struct TraceResult {
  int configured_cycles = 0;
  std::vector<TraceRow> rows;
};

/// Runs the exploration phase once (no detection) and reports how many
/// holes / occupied channels survive each cycle. k = 0 yields only the
/// initial census row.
inline TraceResult exploration_trace(int n, double epsilon, double gamma, int k,
                                     std::uint64_t seed, int exploration_samples = 1) {
  if (k < 0) throw std::invalid_argument("exploration_trace: cycles must be >= 0");
  if (exploration_samples < 1)
    throw std::invalid_argument("exploration_trace: exploration samples must be >= 1");
  ScenarioConfig config;
  config.n = n;
  config.epsilon = epsilon;
  config.gamma = gamma;
  config.target_holes = 1;
  config.validate();

  RandomStream rng(derive_trial_seed(
      seed, detail::experiment_id(detail::kTraceKind, 0), 0));
  const Realization real = draw_occupancy(config, rng, PowerModel::worst_case());
  std::vector<int> retained(static_cast<std::size_t>(n));
  std::iota(retained.begin(), retained.end(), 0);

  TraceResult trace;
  trace.configured_cycles = k;
  auto record = [&](int cycle) {
    const auto split = specsense::detail::count_split(real, retained);
    trace.rows.push_back({cycle, split.first, split.second});
  };
  record(0);
  const double threshold =
      specsense::detail::cached_gamma_median(exploration_samples) * (1.0 + gamma);
  for (int cycle = 1; cycle <= k; ++cycle) {
    const auto energies = specsense::detail::measure_into_sentinel(
        real, retained, exploration_samples, MeasureMode::kSufficientStat, rng);
    retained = exploration_cycle(retained, energies, threshold);
    record(cycle);
  }
  return trace;
}

}  // namespace experiments
}  // namespace specsense
