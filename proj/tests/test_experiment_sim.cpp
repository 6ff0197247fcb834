#include <gtest/gtest.h>

#include <cmath>

#include "onoff/error.hpp"
#include "onoff/experiment_sim.hpp"

using namespace onoff;

TEST(SplitMix64, ReferenceStream) {
  SplitMix64 g(0);
  EXPECT_EQ(g.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(g.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(g.next(), 0x06c45d188009454fULL);
}

TEST(SplitMix64, UniformInHalfOpenUnitInterval) {
  SplitMix64 g(77);
  double lo = 1.0, hi = 0.0, mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform();
    lo = std::min(lo, u), hi = std::max(hi, u), mean += u;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(mean / 100000, 0.5, 5 * std::sqrt(1.0 / 12 / 100000));
}

TEST(Substream, DistinctPerIndexAndSeed) {
  EXPECT_NE(substream(1, 0).next(), substream(1, 1).next());
  EXPECT_NE(substream(1, 0).next(), substream(2, 0).next());
  EXPECT_EQ(substream(5, 3).next(), substream(5, 3).next());
}

TEST(BinomialSample, EdgeProbabilities) {
  SplitMix64 g(1);
  EXPECT_EQ(binomial_sample(g, 1000, 0.0), 0u);
  EXPECT_EQ(binomial_sample(g, 1000, 1.0), 1000u);
  EXPECT_THROW(binomial_sample(g, 10, -0.1), InvalidArgument);
  EXPECT_THROW(binomial_sample(g, 10, 1.1), InvalidArgument);
}

TEST(SimulateCounts, VacuumNeverClicks) {
  ScenarioSpec spec{fock(0, 4), EfficiencyGrid::linear(0.1, 1.0, 10), 5000, 3, "vacuum", {}};
  for (const auto& r : simulate_counts(spec)) EXPECT_EQ(r.n_no_click, r.n_runs);
}

TEST(SimulateCounts, SinglePhotonAtHalfEfficiency) {
  ScenarioSpec spec{fock(1, 3), EfficiencyGrid({0.5}), 1'000'000, 17, "fock1", {}};
  const auto r = simulate_counts(spec);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0].frequency(), 0.5, 0.0015);
}

TEST(SimulateCounts, DeterministicInSeed) {
  auto spec = preset("pulsed_gaussian");
  spec.seed = 99;
  EXPECT_EQ(simulate_counts(spec), simulate_counts(spec));
  auto other = spec;
  other.seed = 100;
  EXPECT_NE(simulate_counts(spec), simulate_counts(other));
}

TEST(SimulateCounts, RejectsZeroRuns) {
  ScenarioSpec spec{fock(0, 1), EfficiencyGrid({0.5}), 0, 0, "bad", {}};
  EXPECT_THROW(simulate_counts(spec), InvalidArgument);
}

TEST(Preset, HeraldedPhoton) {
  const auto s = preset("heralded_photon");
  EXPECT_NEAR(s.truth[0], 0.027, 1e-15);
  EXPECT_NEAR(s.truth[2] / s.truth[1], 0.0185, 1e-15);
  EXPECT_NEAR(s.truth[1], 0.9553, 5e-5);
  EXPECT_NEAR(s.truth[2], 0.0177, 5e-5);
  EXPECT_EQ(s.grid.size(), 34u);
  EXPECT_EQ(s.grid[0], 1e-4);
  EXPECT_EQ(s.grid[33], 0.20);
  EXPECT_NEAR(s.grid[1] / s.grid[0], s.grid[2] / s.grid[1], 1e-12);
  EXPECT_EQ(s.runs_per_eta, 1'000'000u);
}

TEST(Preset, WeakCoherent) {
  const auto s = preset("weak_coherent");
  EXPECT_NEAR(mean_photon(s.truth), 0.02, 1e-9);
  EXPECT_EQ(s.grid.size(), 15u);
  EXPECT_EQ(s.grid[0], 1e-3);
  EXPECT_EQ(s.grid[14], 0.66);
  EXPECT_EQ(s.runs_per_eta, 1'000'000u);
}

TEST(Preset, AttenuatedThermal) {
  const auto s = preset("attenuated_thermal");
  EXPECT_NEAR(mean_photon(s.truth), 0.05, 1e-9);
  EXPECT_EQ(s.grid.size(), 15u);
  EXPECT_EQ(s.runs_per_eta, 1'000'000u);
}

TEST(Preset, PulsedGaussian) {
  const auto s = preset("pulsed_gaussian");
  ASSERT_TRUE(s.truth_model);
  EXPECT_EQ(s.truth_model->family, Family::gaussian);
  EXPECT_EQ(s.truth, gaussian_pulsed(4.88, 0.63, s.truth.truncation()));
  EXPECT_EQ(s.grid.size(), 37u);
  EXPECT_EQ(s.grid[0], 0.005);
  EXPECT_EQ(s.grid[36], 0.20);
  EXPECT_NEAR(s.grid[1] - s.grid[0], s.grid[36] - s.grid[35], 1e-12);
  EXPECT_EQ(s.runs_per_eta, 10'000u);
}

TEST(Preset, PulsedThermalAndMultithermal) {
  const auto t = preset("pulsed_thermal");
  EXPECT_NEAR(mean_photon(t.truth), 5.33, 1e-6);
  EXPECT_EQ(t.grid.size(), 24u);
  EXPECT_EQ(t.runs_per_eta, 10'000u);
  const auto m = preset("pulsed_multithermal");
  EXPECT_NEAR(mean_photon(m.truth), 6.17, 1e-6);
  EXPECT_EQ(m.truth, multithermal(6.17, 5, m.truth.truncation()));
  EXPECT_EQ(m.grid.size(), 18u);
  EXPECT_EQ(m.runs_per_eta, 10'000u);
}

TEST(Preset, UnknownNameThrows) { EXPECT_THROW(preset("squeezed_vacuum"), InvalidArgument); }

TEST(Preset, NamesAreAllConstructible) {
  ASSERT_EQ(preset_names().size(), 6u);
  for (auto name : preset_names()) EXPECT_EQ(preset(name).label, name);
}

TEST(SimulationProperties, FrequenciesWithinFiveSigma) {
  for (auto name : preset_names()) {
    for (std::uint64_t seed : {1u, 2u}) {
      auto spec = preset(name);
      spec.seed = seed;
      const auto p = no_click_vector(spec.truth, spec.grid);
      const auto records = simulate_counts(spec);
      ASSERT_EQ(records.size(), spec.grid.size());
      for (std::size_t v = 0; v < records.size(); ++v) {
        EXPECT_EQ(records[v].eta, spec.grid[v]);
        const double sd = std::sqrt(p[v] * (1 - p[v]) / static_cast<double>(records[v].n_runs));
        EXPECT_LE(std::abs(records[v].frequency() - p[v]), 5 * sd + 1e-12) << name << " v=" << v;
      }
    }
  }
}
