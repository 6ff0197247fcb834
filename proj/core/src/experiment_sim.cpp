#include "onoff/experiment_sim.hpp"

#include <array>
#include <cmath>
#include <string>

#include "onoff/error.hpp"

namespace onoff {
namespace {

constexpr std::array<std::string_view, 6> kPresetNames = {
    "heralded_photon", "weak_coherent",  "attenuated_thermal",
    "pulsed_gaussian", "pulsed_thermal", "pulsed_multithermal"};

ScenarioSpec from_model(std::string_view label, TruthModel model, EfficiencyGrid grid,
                        std::uint64_t runs) {
  PhotonDistribution truth = make_distribution(model.family, model.params, model.n_bar);
  return ScenarioSpec{std::move(truth), std::move(grid), runs, 0, std::string(label),
                      std::move(model)};
}

}  // namespace

SplitMix64 substream(std::uint64_t seed, std::uint64_t nu) noexcept {
  SplitMix64 mixer(seed ^ (0x9E3779B97F4A7C15ULL * (nu + 1)));
  return SplitMix64(mixer.next());
}

std::uint64_t binomial_sample(SplitMix64& rng, std::uint64_t trials, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("binomial probability outside [0, 1]");
  if (p == 0.0) return 0;
  if (p == 1.0) return trials;
  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) successes += rng.uniform() < p ? 1 : 0;
  return successes;
}

void validate(const ScenarioSpec& spec) {
  if (spec.runs_per_eta < 1) throw InvalidArgument("runs_per_eta must be >= 1");
}

std::vector<OnOffRecord> simulate_counts(const ScenarioSpec& spec) {
  validate(spec);
  const auto p = no_click_vector(spec.truth, spec.grid);
  std::vector<OnOffRecord> records;
  records.reserve(spec.grid.size());
  for (std::size_t v = 0; v < spec.grid.size(); ++v) {
    SplitMix64 rng = substream(spec.seed, v);
    records.push_back({spec.grid[v], spec.runs_per_eta,
                       binomial_sample(rng, spec.runs_per_eta, p[v])});
  }
  return records;
}

std::span<const std::string_view> preset_names() { return kPresetNames; }

ScenarioSpec preset(std::string_view name) {
  if (name == "heralded_photon") {
    // Background vacuum 2.7 %, accidental second photon at 1.85 % of the
    // single-photon weight; ϱ₁ follows from normalization.
    const double w0 = 0.027;
    const double w1 = (1.0 - w0) / 1.0185;
    return from_model(name, {Family::fock_mixture, {{"w0", w0}, {"w1", w1}, {"w2", 0.0185 * w1}}, 2},
                      EfficiencyGrid::log_spaced(1e-4, 0.20, 34), 1'000'000);
  }
  if (name == "weak_coherent")
    return from_model(name, {Family::coherent, {{"alpha2", 0.02}}, 10},
                      EfficiencyGrid::log_spaced(1e-3, 0.66, 15), 1'000'000);
  if (name == "attenuated_thermal")
    return from_model(name, {Family::thermal, {{"N", 0.05}}, 20},
                      EfficiencyGrid::log_spaced(1e-3, 0.66, 15), 1'000'000);
  if (name == "pulsed_gaussian")
    return from_model(name, {Family::gaussian, {{"N", 4.88}, {"sigma2", 0.63}}, 60},
                      EfficiencyGrid::linear(0.005, 0.20, 37), 10'000);
  if (name == "pulsed_thermal")
    return from_model(name, {Family::thermal, {{"N", 5.33}}, 200},
                      EfficiencyGrid::linear(0.005, 0.20, 24), 10'000);
  if (name == "pulsed_multithermal")
    return from_model(name, {Family::multithermal, {{"N", 6.17}, {"mu", 5.0}}, 200},
                      EfficiencyGrid::linear(0.005, 0.20, 18), 10'000);
  throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

}  // namespace onoff
