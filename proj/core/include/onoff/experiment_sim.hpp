#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "onoff/distributions.hpp"
#include "onoff/forward_model.hpp"

namespace onoff {

/// SplitMix64 (Steele, Lea & Flood 2014). Fully specified integer arithmetic,
/// so a given seed yields the same stream on every platform.
class SplitMix64 {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64";

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Independent stream for efficiency index `nu` under a scenario seed.
SplitMix64 substream(std::uint64_t seed, std::uint64_t nu) noexcept;

/// Exact Binomial(trials, p) draw as a sum of Bernoulli trials.
std::uint64_t binomial_sample(SplitMix64& rng, std::uint64_t trials, double p);

/// Parametric description of a scenario's truth, kept so that scenario
/// files stay human-editable.
struct TruthModel {
  Family family;
  ParamMap params;
  int n_bar;
};

struct ScenarioSpec {
  PhotonDistribution truth;
  EfficiencyGrid grid;
  std::uint64_t runs_per_eta;
  std::uint64_t seed;
  std::string label;
  std::optional<TruthModel> truth_model;
};

/// Throws InvalidArgument when runs_per_eta is zero.
void validate(const ScenarioSpec& spec);

/// One record per η_ν with n₀ν ~ Binomial(n_ν, p₀(η_ν)); deterministic in the seed.
std::vector<OnOffRecord> simulate_counts(const ScenarioSpec& spec);

/// heralded_photon, weak_coherent, attenuated_thermal, pulsed_gaussian,
/// pulsed_thermal, pulsed_multithermal.
std::span<const std::string_view> preset_names();

/// Scenario for a named preset, seed 0 unless overridden by the caller.
ScenarioSpec preset(std::string_view name);

}  // namespace onoff
