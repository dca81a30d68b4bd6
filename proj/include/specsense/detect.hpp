#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "specsense/gamma.hpp"
#include "specsense/random.hpp"
#include "specsense/spectrum.hpp"

namespace specsense {

inline constexpr double kEliminated = std::numeric_limits<double>::infinity();

/// Why a detection run did not return target_holes vacant channels.
enum class FailureKind {
  kNone,                   // success
  kPickedOccupied,         // selection contains an occupied channel
  kInsufficientSurvivors,  // fewer candidates than target_holes remained
  kBudgetExhausted,        // sampling budget ran out before detection
};

inline const char* to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::kNone: return "none";
    case FailureKind::kPickedOccupied: return "picked-occupied";
    case FailureKind::kInsufficientSurvivors: return "insufficient-survivors";
    case FailureKind::kBudgetExhausted: return "budget-exhausted";
  }
  return "unknown";
}

/// Result of one detector run. retention_trace records, per exploration
/// cycle attained (entry 0 is the initial state), how many vacant and
/// occupied channels remained in the retained set.
struct DetectionOutcome {
  std::vector<int> selected;  // ascending channel indices, empty on failure
  bool success = false;
  FailureKind failure = FailureKind::kNone;
  std::vector<std::pair<int, int>> retention_trace;  // (holes, occupied)
  std::int64_t samples_spent = 0;
};

/// Log of the per-channel posterior-odds statistic for vacancy given an
/// energy reading:  -samples*log(1+power) + energy*power/(1+power).
/// Monotone increasing in energy for any fixed positive power.
inline double map_statistic_log(double energy, double power, int samples) {
  if (samples < 1) throw std::invalid_argument("map_statistic_log: samples must be >= 1");
  if (!(power >= 0.0)) throw std::invalid_argument("map_statistic_log: power must be >= 0");
  if (!(energy >= 0.0)) throw std::invalid_argument("map_statistic_log: energy must be >= 0");
  return -samples * std::log1p(power) + energy * power / (1.0 + power);
}

/// Exponentiated form of map_statistic_log (may overflow to +inf for very
/// large energies; rank order is what matters downstream).
inline double map_statistic(double energy, double power, int samples) {
  return std::exp(map_statistic_log(energy, power, samples));
}

/// Indices of the t smallest finite energies, ties broken toward the smaller
/// index. Entries equal to +inf mark eliminated channels and are never
/// selected. Returns nullopt when fewer than t finite entries exist.
inline std::optional<std::vector<int>> robust_select(const std::vector<double>& energies,
                                                     int t) {
  if (t < 1) throw std::invalid_argument("robust_select: t must be >= 1");
  std::vector<int> order;
  order.reserve(energies.size());
  for (int i = 0; i < static_cast<int>(energies.size()); ++i) {
    const double e = energies[static_cast<std::size_t>(i)];
    if (e != e) throw std::invalid_argument("robust_select: NaN energy");
    if (e != kEliminated) order.push_back(i);
  }
  if (static_cast<int>(order.size()) < t) return std::nullopt;
  std::partial_sort(order.begin(), order.begin() + t, order.end(), [&](int a, int b) {
    const double ea = energies[static_cast<std::size_t>(a)];
    const double eb = energies[static_cast<std::size_t>(b)];
    return ea < eb || (ea == eb && a < b);
  });
  std::vector<int> picked(order.begin(), order.begin() + t);
  std::sort(picked.begin(), picked.end());
  return picked;
}

/// One elimination pass: keeps exactly the retained indices whose energy is
/// strictly below the threshold. Every retained index must carry a finite
/// measured energy in the full-length energy vector.
inline std::vector<int> exploration_cycle(const std::vector<int>& retained,
                                          const std::vector<double>& energies,
                                          double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("exploration_cycle: threshold must be positive");
  std::vector<int> kept;
  kept.reserve(retained.size());
  for (int i : retained) {
    if (i < 0 || i >= static_cast<int>(energies.size()))
      throw std::out_of_range("exploration_cycle: retained index out of range");
    const double e = energies[static_cast<std::size_t>(i)];
    if (!(e >= 0.0) || e == kEliminated)
      throw std::logic_error("exploration_cycle: retained channel lacks a measured energy");
    if (e < threshold) kept.push_back(i);
  }
  return kept;
}

/// Samples per survivor in the detection phase: floor of the unspent budget
/// divided equally over the survivors.
inline std::int64_t compute_detection_allocation(std::int64_t total_budget,
                                                 std::int64_t consumed,
                                                 std::int64_t survivor_count) {
  if (survivor_count < 1)
    throw std::domain_error("compute_detection_allocation: no survivors");
  if (consumed < 0 || consumed > total_budget)
    throw std::invalid_argument("compute_detection_allocation: consumed outside [0, budget]");
  return (total_budget - consumed) / survivor_count;
}

namespace detail {

/// Memoized unit-scale Gamma medians; the exploration threshold needs one per
/// cycle and the solve is pure, so small shapes are tabled once per process.
inline double cached_gamma_median(int shape) {
  constexpr int kMaxCached = 64;
  static const std::array<double, kMaxCached> table = [] {
    std::array<double, kMaxCached> t{};
    for (int s = 1; s <= kMaxCached; ++s) t[static_cast<std::size_t>(s - 1)] = gamma_median(s);
    return t;
  }();
  return shape <= kMaxCached ? table[static_cast<std::size_t>(shape - 1)] : gamma_median(shape);
}

/// Measures `channels` with `samples` looks each into a full-length energy
/// vector whose unlisted entries stay at +inf.
inline std::vector<double> measure_into_sentinel(const Realization& real,
                                                 const std::vector<int>& channels,
                                                 int samples, MeasureMode mode,
                                                 RandomStream& rng) {
  std::vector<double> energies(static_cast<std::size_t>(real.n()), kEliminated);
  const std::vector<double> measured = measure_energies(real, channels, samples, mode, rng);
  for (std::size_t j = 0; j < channels.size(); ++j)
    energies[static_cast<std::size_t>(channels[j])] = measured[j];
  return energies;
}

inline std::pair<int, int> count_split(const Realization& real, const std::vector<int>& set) {
  int holes = 0;
  for (int i : set) holes += real.is_hole(i);
  return {holes, static_cast<int>(set.size()) - holes};
}

inline DetectionOutcome finish_selection(const Realization& real,
                                         const std::vector<double>& energies, int t,
                                         DetectionOutcome outcome) {
  const auto picked = robust_select(energies, t);
  if (!picked) {
    outcome.failure = FailureKind::kInsufficientSurvivors;
    return outcome;
  }
  outcome.selected = *picked;
  outcome.success = std::all_of(outcome.selected.begin(), outcome.selected.end(),
                                [&](int i) { return real.is_hole(i); });
  outcome.failure = outcome.success ? FailureKind::kNone : FailureKind::kPickedOccupied;
  return outcome;
}

}  // namespace detail

/// Baseline detector: every channel gets `samples` looks, then the
/// target_holes smallest energies are declared vacant.
inline DetectionOutcome run_nonadaptive(const ScenarioConfig& config, const Realization& real,
                                        int samples, RandomStream& rng,
                                        MeasureMode mode = MeasureMode::kSufficientStat) {
  config.validate();
  if (real.n() != config.n)
    throw std::invalid_argument("run_nonadaptive: realization size mismatch");
  if (samples < 1) throw std::invalid_argument("run_nonadaptive: samples must be >= 1");

  std::vector<int> all(static_cast<std::size_t>(config.n));
  for (int i = 0; i < config.n; ++i) all[static_cast<std::size_t>(i)] = i;

  DetectionOutcome outcome;
  outcome.retention_trace.push_back(detail::count_split(real, all));
  const auto energies = detail::measure_into_sentinel(real, all, samples, mode, rng);
  outcome.samples_spent = static_cast<std::int64_t>(config.n) * samples;
  return detail::finish_selection(real, energies, config.target_holes, std::move(outcome));
}

/// Adaptive two-phase detector. Exploration runs `cycles` elimination passes:
/// cycle k measures every retained channel with exploration_samples[k-1]
/// looks (default 1) and keeps channels whose energy falls strictly below
/// (1 + gamma) times the median of a unit-scale Gamma with that many degrees
/// of freedom, halving worst-case occupied channels while passing nearly all
/// holes. Detection splits the unspent budget equally over the survivors and
/// picks the target_holes smallest energies; eliminated channels keep a +inf
/// sentinel. A cycle that cannot be fully paid for, or a zero detection
/// allocation, aborts with kBudgetExhausted; fewer survivors than
/// target_holes aborts with kInsufficientSurvivors.
inline DetectionOutcome run_adaptive(const ScenarioConfig& config, const Realization& real,
                                     int cycles, std::int64_t total_budget,
                                     RandomStream& rng,
                                     const std::vector<int>& exploration_samples = {},
                                     MeasureMode mode = MeasureMode::kSufficientStat) {
  config.validate();
  if (real.n() != config.n)
    throw std::invalid_argument("run_adaptive: realization size mismatch");
  if (cycles < 0) throw std::invalid_argument("run_adaptive: cycles must be >= 0");
  if (total_budget < 1) throw std::invalid_argument("run_adaptive: budget must be positive");
  if (!exploration_samples.empty() &&
      static_cast<int>(exploration_samples.size()) != cycles)
    throw std::invalid_argument("run_adaptive: exploration_samples must have one entry per cycle");

  std::vector<int> retained(static_cast<std::size_t>(config.n));
  for (int i = 0; i < config.n; ++i) retained[static_cast<std::size_t>(i)] = i;

  DetectionOutcome outcome;
  outcome.retention_trace.push_back(detail::count_split(real, retained));

  for (int k = 0; k < cycles; ++k) {
    const int mk = exploration_samples.empty() ? 1 : exploration_samples[static_cast<std::size_t>(k)];
    if (mk < 1) throw std::invalid_argument("run_adaptive: exploration samples must be >= 1");
    const std::int64_t cost = static_cast<std::int64_t>(retained.size()) * mk;
    if (outcome.samples_spent + cost > total_budget) {
      outcome.failure = FailureKind::kBudgetExhausted;
      return outcome;
    }
    const auto energies = detail::measure_into_sentinel(real, retained, mk, mode, rng);
    outcome.samples_spent += cost;
    const double threshold = detail::cached_gamma_median(mk) * (1.0 + config.gamma);
    retained = exploration_cycle(retained, energies, threshold);
    outcome.retention_trace.push_back(detail::count_split(real, retained));
  }

  if (static_cast<int>(retained.size()) < config.target_holes) {
    outcome.failure = FailureKind::kInsufficientSurvivors;
    return outcome;
  }
  const std::int64_t detection_samples = compute_detection_allocation(
      total_budget, outcome.samples_spent, static_cast<std::int64_t>(retained.size()));
  if (detection_samples == 0) {
    outcome.failure = FailureKind::kBudgetExhausted;
    return outcome;
  }
  const auto energies = detail::measure_into_sentinel(
      real, retained, static_cast<int>(detection_samples), mode, rng);
  outcome.samples_spent += detection_samples * static_cast<std::int64_t>(retained.size());
  return detail::finish_selection(real, energies, config.target_holes, std::move(outcome));
}

}  // namespace specsense
