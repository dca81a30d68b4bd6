// Release acceptance harness.
//
// Runs the ten release criteria end to end against the library, printing one
// [PASS]/[FAIL] line per criterion with the measured quantity next to its
// requirement. The process exit code is the number of failed criteria, so a
// fully green run exits 0.
//
// Usage: acceptance [criterion-number ...]   (default: all ten)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdint>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "specsense/detect.hpp"
#include "specsense/experiments.hpp"
#include "specsense/gamma.hpp"
#include "specsense/io.hpp"
#include "specsense/random.hpp"
#include "specsense/spectrum.hpp"
#include "specsense/theory.hpp"

namespace {

using namespace specsense;
namespace exp = specsense::experiments;

std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return buffer;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

/// Kolmogorov-Smirnov sup-distance of a sample against a reference CDF.
template <typename Cdf>
double ks_distance(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    sup = std::max(sup, std::fabs((static_cast<double>(i) + 1.0) / n - f));
    sup = std::max(sup, std::fabs(f - static_cast<double>(i) / n));
  }
  return sup;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double sup = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    sup = std::max(sup, std::fabs(static_cast<double>(i) / na -
                                  static_cast<double>(j) / nb));
  }
  return sup;
}

// --------------------------------------------------------------------------
// 1. Gamma quantile round trip
// --------------------------------------------------------------------------
Outcome quantile_round_trip() {
  double worst = 0.0;
  for (int shape = 1; shape <= 64; ++shape) {
    const GammaParams params{shape, 1.0};
    for (int j = 0; j < 50; ++j) {
      // 50 levels spread log-uniformly across (1e-9, 0.999).
      const double q = std::exp(std::log(1e-9) +
                                (std::log(0.999) - std::log(1e-9)) * j / 49.0);
      worst = std::max(
          worst, std::fabs(gamma_cdf(gamma_quantile(q, params), params) - q));
    }
  }
  const double median_err = std::fabs(gamma_median(1) - std::log(2.0));
  return {worst <= 1e-10 && median_err <= 1e-12,
          fmt("max |CDF(Q(q))-q| = %.3g (need <= 1e-10), shape-1 median off by "
              "%.3g (need <= 1e-12)",
              worst, median_err)};
}

// --------------------------------------------------------------------------
// 2. Exact-vector energies match direct Gamma draws
// --------------------------------------------------------------------------
Outcome exact_sampling_equivalence() {
  const struct {
    int shape;
    double variance;
  } combos[] = {{1, 1.0}, {5, 1.0}, {5, 4.57}};
  constexpr std::int64_t kDraws = 100000;
  double worst = 0.0;
  std::uint64_t combo_index = 0;
  for (const auto& c : combos) {
    std::vector<double> direct(kDraws), exact(kDraws);
    RandomStream r_direct(derive_trial_seed(42, (11ull << 32) | combo_index, 0));
    RandomStream r_exact(derive_trial_seed(42, (11ull << 32) | combo_index, 1));
    ++combo_index;
    for (auto& y : direct) y = sample_gamma({c.shape, c.variance}, r_direct);
    for (auto& y : exact) y = sample_energy_exact(c.shape, c.variance, r_exact);
    worst = std::max(worst, ks_two_sample(std::move(direct), std::move(exact)));
  }
  return {worst < 0.015,
          fmt("max two-sample KS = %.4f over three (shape, variance) pairs "
              "(need < 0.015)",
              worst)};
}

// --------------------------------------------------------------------------
// 3. Scaled minima converge to the order-statistic limit law
// --------------------------------------------------------------------------
Outcome order_stat_limit() {
  constexpr std::int64_t kChannels = 100000;
  constexpr int kReps = 1000;
  std::vector<double> buffer(kChannels);
  double worst = 0.0;
  for (int shape : {1, 3, 5}) {
    const double scale = order_stat_scale(kChannels, {shape, 1.0});
    std::vector<std::vector<double>> scaled(3);
    for (auto& v : scaled) v.reserve(kReps);
    for (int rep = 0; rep < kReps; ++rep) {
      RandomStream rng(derive_trial_seed(
          42, (12ull << 32) | static_cast<std::uint64_t>(shape), rep));
      for (auto& y : buffer) y = sample_gamma({shape, 1.0}, rng);
      std::partial_sort(buffer.begin(), buffer.begin() + 3, buffer.end());
      for (int rank = 1; rank <= 3; ++rank)
        scaled[static_cast<std::size_t>(rank - 1)].push_back(buffer[rank - 1] / scale);
    }
    for (int rank = 1; rank <= 3; ++rank) {
      const double d = ks_distance(
          scaled[static_cast<std::size_t>(rank - 1)],
          [&](double w) { return order_stat_limit_cdf(rank, shape, w); });
      worst = std::max(worst, d);
    }
  }
  return {worst <= 0.02,
          fmt("max sup-distance = %.4f over shapes {1,3,5} x ranks 1..3 "
              "(need <= 0.02)",
              worst)};
}

// --------------------------------------------------------------------------
// 4. Median-threshold exploration halves worst-case occupied channels
// --------------------------------------------------------------------------
Outcome exploration_halving() {
  const double gamma = std::pow(1000.0, 0.2);
  constexpr int kChannels = 100000;
  const double sigma = std::sqrt(0.25 / kChannels);

  std::vector<int> indices(kChannels);
  std::iota(indices.begin(), indices.end(), 0);
  Realization at_gamma;
  at_gamma.occupancy.assign(kChannels, 1);
  at_gamma.powers.assign(kChannels, gamma);
  Realization at_twice;
  at_twice.occupancy.assign(kChannels, 1);
  at_twice.powers.assign(kChannels, 2.0 * gamma);

  bool pass = true;
  std::string detail;
  std::uint64_t ordinal = 0;
  for (int mk : {1, 4, 9}) {
    const double threshold = gamma_median(mk) * (1.0 + gamma);
    RandomStream rng(derive_trial_seed(42, (13ull << 32) | ordinal++, 0));
    const auto energies =
        measure_energies(at_gamma, indices, mk, MeasureMode::kSufficientStat, rng);
    const double retained =
        static_cast<double>(exploration_cycle(indices, energies, threshold).size()) /
        kChannels;

    RandomStream rng_hot(derive_trial_seed(42, (13ull << 32) | ordinal++, 0));
    const auto hot = measure_energies(at_twice, indices, mk,
                                      MeasureMode::kSufficientStat, rng_hot);
    const double retained_hot =
        static_cast<double>(exploration_cycle(indices, hot, threshold).size()) /
        kChannels;

    if (std::fabs(retained - 0.5) > 3.0 * sigma) pass = false;
    if (!(retained_hot < 0.5 - 3.0 * sigma)) pass = false;
    detail += fmt("%sM_k=%d: %.4f at power gamma, %.4f at 2*gamma",
                  detail.empty() ? "" : "; ", mk, retained, retained_hot);
  }
  detail += fmt(" (need 0.5 +/- %.4f, and < %.4f at 2*gamma)", 3.0 * sigma,
                0.5 - 3.0 * sigma);
  return {pass, detail};
}

// --------------------------------------------------------------------------
// 5. One-shot error agrees with the closed form at n=2000
// --------------------------------------------------------------------------
Outcome one_shot_error_formula() {
  constexpr int kChannels = 2000;
  constexpr std::int64_t kTrials = 10000;
  ScenarioConfig config;
  config.n = kChannels;
  config.epsilon = std::pow(static_cast<double>(kChannels), -2.0 / 3.0);
  config.gamma = std::pow(static_cast<double>(kChannels), 0.2);
  config.target_holes = 2;

  std::int64_t failures = 0;
  for (std::int64_t trial = 0; trial < kTrials; ++trial) {
    RandomStream rng(derive_trial_seed(42, 14ull << 32, trial));
    const Realization real = draw_occupancy(config, rng);
    if (!run_nonadaptive(config, real, 5, rng).success) ++failures;
  }
  const double err = static_cast<double>(failures) / kTrials;
  const exp::WilsonInterval iv = exp::wilson_interval(failures, kTrials);
  const double formula = theory::p_na_asymptotic(config.gamma, 5, config.epsilon, 2);
  const double tol = std::max(3.0 * (iv.hi - iv.lo) / 2.0, 0.25 * formula);
  return {std::fabs(err - formula) <= tol,
          fmt("empirical %.4f vs formula %.4f (need within %.4f)", err, formula,
              tol)};
}

// --------------------------------------------------------------------------
// 6. Adaptive detector improves tenfold and monotonically at n=100
// --------------------------------------------------------------------------
Outcome adaptive_improvement() {
  exp::SweepSpec spec;
  spec.n_values = {100};
  spec.k_values = {1, 2, 3, 4};
  spec.trials = 100000;

  const auto rows = exp::run_reliability_sweep(spec);
  const double p_na = rows[0].err_emp;
  const double p_a4 = rows[4].err_emp;
  const bool tenfold = p_a4 <= p_na / 10.0;

  bool monotone = true;
  for (std::size_t i = 2; i < rows.size(); ++i)
    if (rows[i].err_lo > rows[i - 1].err_hi) monotone = false;

  std::string curve;
  for (std::size_t i = 1; i < rows.size(); ++i)
    curve += fmt("%s%.4f", curve.empty() ? "" : ", ", rows[i].err_emp);
  return {tenfold && monotone,
          fmt("one-shot %.4f; adaptive K=1..4: {%s} (need K=4 <= %.4f and no "
              "significant rise)",
              p_na, curve.c_str(), p_na / 10.0)};
}

// --------------------------------------------------------------------------
// 7. Measured budget ratio clears the agility lower bound
// --------------------------------------------------------------------------
Outcome budget_advantage() {
  constexpr int kChannels = 1000;
  const double epsilon = std::pow(static_cast<double>(kChannels), -2.0 / 3.0);
  const double gamma = std::pow(static_cast<double>(kChannels), 0.2);
  constexpr double kTarget = 1e-2;

  const exp::BudgetSearchResult base =
      exp::find_required_budget(kTarget, 0, kChannels, epsilon, gamma, 2, 10000, 42);
  bool pass = base.attainable;

  std::string gains;
  bool nondecreasing = true;
  double previous = 0.0;
  double ratio_at_four = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const exp::BudgetSearchResult found = exp::find_required_budget(
        kTarget, k, kChannels, epsilon, gamma, 2, 10000, 42);
    if (!found.attainable) pass = false;
    const double ratio = base.per_channel_budget / found.per_channel_budget;
    if (ratio < previous - 1e-12) nondecreasing = false;
    previous = ratio;
    if (k == 4) ratio_at_four = ratio;
    gains += fmt("%s%.3f", gains.empty() ? "" : ", ", ratio);
  }
  const double bar =
      0.8 * theory::agility_gain_lower_bound(
                static_cast<int>(std::llround(base.per_channel_budget)), 4);
  pass = pass && nondecreasing && ratio_at_four >= bar;
  return {pass, fmt("one-shot budget m=%.0f; gains K=1..4: {%s} (need "
                    "nondecreasing, K=4 >= %.3f)",
                    base.per_channel_budget, gains.c_str(), bar)};
}

// --------------------------------------------------------------------------
// 8. Grid cells classify consistently with the scaling boundaries
// --------------------------------------------------------------------------
Outcome region_classification() {
  const std::vector<double> alphas{0.25, 0.3, 0.55, 0.7, 0.85};
  const std::vector<double> betas{0.013, 0.024, 0.36, 0.42, 0.48};
  const exp::GridResult grid =
      exp::detectability_grid(alphas, betas, 5, 4, 1000, 1000, 42);

  // Cells strictly above both boundaries must both succeed and cells
  // strictly below both must both fail; of the cells in between, at least
  // one must be solvable only by the adaptive detector.
  int above = 0, below = 0, between = 0;
  int misclassified = 0;
  int adaptive_only_between = 0;
  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    const exp::GridCell& cell = grid.cells[c];
    const auto& bounds = grid.boundaries[c / betas.size()];
    if (cell.beta > bounds.first) {
      ++above;
      if (cell.classification != exp::CellClass::kBothSucceed) ++misclassified;
    } else if (cell.beta < bounds.second) {
      ++below;
      if (cell.classification != exp::CellClass::kBothFail) ++misclassified;
    } else if (cell.beta > bounds.second && cell.beta < bounds.first) {
      ++between;
      if (cell.classification == exp::CellClass::kAdaptiveOnly)
        ++adaptive_only_between;
    }
  }
  return {misclassified == 0 && adaptive_only_between >= 1,
          fmt("%d above-both, %d below-both all classified as expected "
              "(%d off); %d between, of which %d adaptive-only (need >= 1)",
              above, below, misclassified, between, adaptive_only_between)};
}

// --------------------------------------------------------------------------
// 9. Exploration keeps holes while halving occupied channels
// --------------------------------------------------------------------------
Outcome retention_profile() {
  constexpr int kChannels = 1000;
  constexpr int kSeeds = 1000;
  const double epsilon = std::pow(static_cast<double>(kChannels), -2.0 / 3.0);
  const double gamma = std::pow(static_cast<double>(kChannels), 0.2);

  double ratio_sum = 0.0;
  long ratio_count = 0;
  int kept_every_hole = 0;
  for (int s = 0; s < kSeeds; ++s) {
    const exp::TraceResult trace =
        exp::exploration_trace(kChannels, epsilon, gamma, 4, 1000 + s);
    for (std::size_t i = 1; i < trace.rows.size(); ++i) {
      if (trace.rows[i - 1].occupied == 0) continue;
      ratio_sum += static_cast<double>(trace.rows[i].occupied) /
                   static_cast<double>(trace.rows[i - 1].occupied);
      ++ratio_count;
    }
    if (trace.rows.back().holes == trace.rows.front().holes) ++kept_every_hole;
  }
  const double mean_ratio = ratio_sum / static_cast<double>(ratio_count);
  const double hole_fraction = static_cast<double>(kept_every_hole) / kSeeds;
  const bool pass =
      std::fabs(mean_ratio - 0.5) <= 0.02 && hole_fraction >= 0.99;
  return {pass, fmt("mean occupied survival %.4f (need 0.5 +/- 0.02); %.3f of "
                    "seeds kept every hole (need >= 0.99)",
                    mean_ratio, hole_fraction)};
}

// --------------------------------------------------------------------------
// 10. Worker count never changes the CSV bytes
// --------------------------------------------------------------------------
Outcome worker_determinism() {
  exp::SweepSpec spec;
  spec.n_values = {50, 100};
  spec.k_values = {1, 2, 3};
  spec.trials = 500;

  const int workers =
      static_cast<int>(std::max(4u, std::thread::hardware_concurrency()));
  const std::string serial = io::results_csv_string(exp::run_reliability_sweep(spec, 1));
  const std::string parallel =
      io::results_csv_string(exp::run_reliability_sweep(spec, workers));
  return {serial == parallel,
          fmt("1 worker vs %d workers: CSV bytes %s (%zu bytes)", workers,
              serial == parallel ? "identical" : "DIFFER", serial.size())};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit_seconds;  // 0 = no limit stated
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "gamma quantile round trip", 1.0, quantile_round_trip},
    {2, "exact-vector sampling equivalence", 10.0, exact_sampling_equivalence},
    {3, "scaled order-statistic limit law", 120.0, order_stat_limit},
    {4, "median-threshold exploration halving", 30.0, exploration_halving},
    {5, "one-shot error vs closed form", 60.0, one_shot_error_formula},
    {6, "adaptive improvement at n=100", 600.0, adaptive_improvement},
    {7, "budget ratio vs agility bound", 1800.0, budget_advantage},
    {8, "detectability region classification", 900.0, region_classification},
    {9, "exploration retention profile", 120.0, retention_profile},
    {10, "worker-count determinism", 0.0, worker_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id < 1 || id > 10) {
      std::fprintf(stderr, "usage: acceptance [criterion-number ...] (1-10)\n");
      return 64;
    }
    selected.push_back(id);
  }

  int failures = 0;
  int executed = 0;
  for (const Criterion& criterion : kCriteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), criterion.id) == selected.end())
      continue;
    ++executed;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome = criterion.run();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::string timing = fmt("%.1f s", elapsed);
    if (criterion.time_limit_seconds > 0.0) {
      timing += fmt(" / %.0f s", criterion.time_limit_seconds);
      if (elapsed > criterion.time_limit_seconds) {
        outcome.pass = false;
        outcome.detail += "; exceeded time limit";
      }
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] criterion %d: %s: %s [%s]\n",
                outcome.pass ? "PASS" : "FAIL", criterion.id, criterion.name,
                outcome.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", executed - failures, executed);
  return failures;
}
