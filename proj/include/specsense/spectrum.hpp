#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "specsense/gamma.hpp"
#include "specsense/random.hpp"

namespace specsense {

/// Band-level scenario: n channels, each independently vacant (a hole) with
/// probability epsilon; occupied channels carry power at least gamma above
/// the unit noise floor. target_holes is the number of holes a detector must
/// return.
struct ScenarioConfig {
  int n = 0;
  double epsilon = 0.0;
  double gamma = 0.0;
  int target_holes = 1;

  void validate() const {
    if (n < 1) throw std::invalid_argument("ScenarioConfig: n must be >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0))
      throw std::invalid_argument("ScenarioConfig: epsilon must lie in (0, 1)");
    if (!(gamma > 0.0)) throw std::invalid_argument("ScenarioConfig: gamma must be positive");
    if (target_holes < 1 || target_holes > n)
      throw std::invalid_argument("ScenarioConfig: target_holes must lie in [1, n]");
  }
};

/// How occupied channels receive their transmit powers.
struct PowerModel {
  enum class Kind {
    kWorstCase,     // every occupied channel at exactly gamma
    kFixedList,     // explicit per-channel power list (holes ignored)
    kScaledRandom,  // uniform on [gamma, spread * gamma] per occupied channel
  };

  Kind kind = Kind::kWorstCase;
  std::vector<double> fixed;  // used by kFixedList, length n
  double spread = 1.0;        // used by kScaledRandom, must be >= 1

  static PowerModel worst_case() { return {}; }
  static PowerModel fixed_list(std::vector<double> powers) {
    return {Kind::kFixedList, std::move(powers), 1.0};
  }
  static PowerModel scaled_random(double spread) {
    return {Kind::kScaledRandom, {}, spread};
  }
};

/// One drawn band state: occupancy indicators and per-channel powers
/// (0 on holes). Powers never fall below the scenario's gamma.
struct Realization {
  std::vector<std::uint8_t> occupancy;
  std::vector<double> powers;

  int n() const { return static_cast<int>(occupancy.size()); }
  bool is_hole(int i) const { return occupancy[static_cast<std::size_t>(i)] == 0; }

  int hole_count() const {
    int holes = 0;
    for (auto z : occupancy) holes += (z == 0);
    return holes;
  }
};

/// Draws channel occupancy (one uniform per channel, in channel order) and
/// assigns powers per the model. kScaledRandom consumes one extra uniform per
/// occupied channel; the other models add no draws.
inline Realization draw_occupancy(const ScenarioConfig& config, RandomStream& rng,
                                  const PowerModel& model = PowerModel::worst_case()) {
  config.validate();
  if (model.kind == PowerModel::Kind::kFixedList &&
      model.fixed.size() != static_cast<std::size_t>(config.n))
    throw std::invalid_argument("draw_occupancy: fixed power list length must equal n");
  if (model.kind == PowerModel::Kind::kScaledRandom && !(model.spread >= 1.0))
    throw std::invalid_argument("draw_occupancy: power spread must be >= 1");

  Realization real;
  real.occupancy.resize(static_cast<std::size_t>(config.n));
  real.powers.assign(static_cast<std::size_t>(config.n), 0.0);
  for (int i = 0; i < config.n; ++i) {
    const bool hole = rng.uniform() < config.epsilon;
    real.occupancy[static_cast<std::size_t>(i)] = hole ? 0 : 1;
  }
  for (int i = 0; i < config.n; ++i) {
    if (real.is_hole(i)) continue;
    double p = config.gamma;
    switch (model.kind) {
      case PowerModel::Kind::kWorstCase:
        break;
      case PowerModel::Kind::kFixedList:
        p = model.fixed[static_cast<std::size_t>(i)];
        break;
      case PowerModel::Kind::kScaledRandom:
        p = config.gamma * (1.0 + (model.spread - 1.0) * rng.uniform());
        break;
    }
    if (p < config.gamma)
      throw std::invalid_argument("draw_occupancy: occupied power below gamma");
    real.powers[static_cast<std::size_t>(i)] = p;
  }
  return real;
}

/// Energy measurement mode. kSufficientStat draws the channel energy directly
/// from its Gamma law (one engine word per sample); kExactVector accumulates
/// squared complex samples (two engine words per sample). Both produce
/// Gamma(samples, 1 + power) energies on occupied channels and
/// Gamma(samples, 1) on holes.
enum class MeasureMode { kSufficientStat, kExactVector };

/// Measures the listed channels with `samples` looks each, in the order the
/// indices are given. Engine-word consumption depends only on indices.size(),
/// samples and mode, never on channel state.
inline std::vector<double> measure_energies(const Realization& real,
                                            const std::vector<int>& indices, int samples,
                                            MeasureMode mode, RandomStream& rng) {
  if (samples < 1) throw std::invalid_argument("measure_energies: samples must be >= 1");
  std::vector<double> energies;
  energies.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= real.n())
      throw std::out_of_range("measure_energies: channel index out of range");
    const double variance = 1.0 + real.powers[static_cast<std::size_t>(i)];
    energies.push_back(mode == MeasureMode::kSufficientStat
                           ? sample_gamma({samples, variance}, rng)
                           : sample_energy_exact(samples, variance, rng));
  }
  return energies;
}

}  // namespace specsense
