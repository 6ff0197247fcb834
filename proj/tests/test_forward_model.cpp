#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "onoff/error.hpp"
#include "onoff/experiment_sim.hpp"
#include "onoff/forward_model.hpp"
#include "support/oracles.hpp"

using namespace onoff;

TEST(EfficiencyGrid, Validation) {
  EXPECT_THROW(EfficiencyGrid({}), InvalidArgument);
  EXPECT_THROW(EfficiencyGrid({0.0}), InvalidArgument);
  EXPECT_THROW(EfficiencyGrid({1.1}), InvalidArgument);
  EXPECT_THROW(EfficiencyGrid({0.2, 0.2}), InvalidArgument);
  EXPECT_NO_THROW(EfficiencyGrid({1.0, 0.5}));
}

TEST(EfficiencyGrid, SpacingHitsEndpoints) {
  const auto lin = EfficiencyGrid::linear(0.005, 0.20, 37);
  EXPECT_EQ(lin.size(), 37u);
  EXPECT_EQ(lin[0], 0.005);
  EXPECT_EQ(lin[36], 0.20);
  EXPECT_NEAR(lin[1] - lin[0], (0.20 - 0.005) / 36, 1e-15);

  const auto lg = EfficiencyGrid::log_spaced(1e-4, 0.2, 34);
  EXPECT_EQ(lg[0], 1e-4);
  EXPECT_EQ(lg[33], 0.2);
  EXPECT_NEAR(lg[1] / lg[0], lg[33] / lg[32], 1e-12);
}

TEST(VisibilityMatrix, PerfectDetector) {
  const VisibilityMatrix A(EfficiencyGrid({1.0}), 3);
  EXPECT_EQ(A(0, 0), 1.0);
  for (int n = 1; n <= 3; ++n) EXPECT_EQ(A(0, n), 0.0);
}

TEST(VisibilityMatrix, PowersOfOneHalf) {
  const auto A = visibility_matrix(EfficiencyGrid({0.5}), 3);
  const std::vector<double> want{1, 0.5, 0.25, 0.125};
  for (int n = 0; n <= 3; ++n) EXPECT_EQ(A(0, n), want[n]);
}

TEST(VisibilityMatrix, DirectExponentiation) {
  const auto A = visibility_matrix(EfficiencyGrid({0.2}), 2);
  EXPECT_NEAR(A(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(A(0, 1), 0.8, 1e-15);
  EXPECT_NEAR(A(0, 2), 0.64, 1e-15);
}

TEST(VisibilityMatrix, ShapeAndStructure) {
  const auto grid = EfficiencyGrid::linear(0.05, 0.9, 6);
  const VisibilityMatrix A(grid, 7);
  EXPECT_EQ(A.rows(), 6u);
  EXPECT_EQ(A.cols(), 8u);
  EXPECT_EQ(A.truncation(), 7);
  for (std::size_t v = 0; v < A.rows(); ++v) {
    EXPECT_EQ(A(v, 0), 1.0);
    for (std::size_t n = 1; n < A.cols(); ++n) EXPECT_LT(A(v, n), A(v, n - 1));
  }
  EXPECT_THROW(VisibilityMatrix(grid, -1), InvalidArgument);
}

TEST(NoClickProbability, SinglePhoton) {
  for (double eta : {0.0, 0.1, 0.37, 0.9, 1.0})
    EXPECT_NEAR(no_click_probability(fock(1, 10), eta), 1.0 - eta, 1e-15);
}

TEST(NoClickProbability, CoherentClosedForm) {
  EXPECT_NEAR(no_click_probability(coherent(0.02, 30), 0.66), std::exp(-0.66 * 0.02), 1e-6);
  EXPECT_NEAR(no_click_probability(coherent(0.02, 30), 0.66), 0.98689, 5e-6);
}

TEST(NoClickProbability, BlindDetectorAndPerfectDetector) {
  const auto rho = thermal(3.0, 25);
  EXPECT_EQ(no_click_probability(rho, 0.0), 1.0);
  EXPECT_NEAR(no_click_probability(rho, 1.0), rho[0], 1e-15);
}

TEST(NoClickProbability, RejectsEfficiencyOutsideUnitInterval) {
  EXPECT_THROW(no_click_probability(fock(0, 1), -0.01), InvalidArgument);
  EXPECT_THROW(no_click_probability(fock(0, 1), 1.01), InvalidArgument);
}

TEST(NoClickVector, VacuumAndFock) {
  const auto grid = EfficiencyGrid::log_spaced(1e-3, 0.66, 15);
  for (double p : no_click_vector(fock(0, 6), grid)) EXPECT_EQ(p, 1.0);
  const auto p1 = no_click_vector(fock(1, 6), grid);
  for (std::size_t v = 0; v < grid.size(); ++v) EXPECT_NEAR(p1[v], 1.0 - grid[v], 1e-15);
}

TEST(NoClickVector, ThermalClosedForm) {
  const auto grid = EfficiencyGrid::linear(0.005, 0.20, 24);
  const auto p = no_click_vector(thermal(5.33, 60), grid);
  for (std::size_t v = 0; v < grid.size(); ++v)
    EXPECT_NEAR(p[v], 1.0 / (1.0 + grid[v] * 5.33), 1e-4);
}

TEST(RenormalizedProbabilities, Examples) {
  for (double q : renormalized_probabilities(fock(0, 3), EfficiencyGrid({0.1, 0.2, 0.3, 0.4})))
    EXPECT_DOUBLE_EQ(q, 0.25);
  const auto q = renormalized_probabilities(fock(1, 3), EfficiencyGrid({0.2, 0.4}));
  EXPECT_NEAR(q[0], 0.8 / 1.4, 1e-15);
  EXPECT_NEAR(q[1], 0.6 / 1.4, 1e-15);
  double s = 0.0;
  for (double x : renormalized_probabilities(coherent(0.02, 30), EfficiencyGrid::log_spaced(1e-3, 0.66, 15)))
    s += x;
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(RenormalizedProbabilities, AllZeroIsDegenerate) {
  EXPECT_THROW(renormalized_probabilities(fock(2, 2), EfficiencyGrid({1.0})), DegenerateInput);
}

TEST(Frequencies, Examples) {
  const std::vector<OnOffRecord> r{{0.2, 1'000'000, 800'000}, {0.3, 7, 7}};
  const auto f = frequencies(r);
  EXPECT_DOUBLE_EQ(f[0], 0.8);
  EXPECT_EQ(f[1], 1.0);
  const std::vector<OnOffRecord> bad{{0.2, 0, 0}};
  EXPECT_THROW(frequencies(bad), InvalidArgument);
  EXPECT_THROW(frequencies(std::vector<OnOffRecord>{}), InvalidArgument);
}

TEST(Frequencies, HeraldedRecordsFollowOneMinusEta) {
  auto spec = preset("heralded_photon");
  spec.truth = fock(1, 2);
  spec.seed = 5;
  const auto records = simulate_counts(spec);
  const auto f = frequencies(records);
  for (std::size_t v = 0; v < records.size(); ++v)
    EXPECT_NEAR(f[v], 1.0 - records[v].eta, 3.0 / std::sqrt(static_cast<double>(records[v].n_runs)));
}

TEST(RecordValidation, RejectsInconsistentCounts) {
  EXPECT_THROW(validate(OnOffRecord{0.5, 10, 11}), InvalidArgument);
  EXPECT_THROW(validate(OnOffRecord{0.0, 10, 1}), InvalidArgument);
  EXPECT_THROW(validate(OnOffRecord{0.5, 0, 0}), InvalidArgument);
  const std::vector<OnOffRecord> dup{{0.5, 10, 1}, {0.5, 10, 2}};
  EXPECT_THROW(grid_of(dup), InvalidArgument);
}

TEST(EfficiencyFromCharge, Examples) {
  EXPECT_EQ(efficiency_from_charge(0.0, 3.0, 0.2), 0.0);
  EXPECT_DOUBLE_EQ(efficiency_from_charge(3.0, 3.0, 0.2), 0.2);
  EXPECT_DOUBLE_EQ(efficiency_from_charge(1.5, 3.0, 0.20), 0.10);
  EXPECT_THROW(efficiency_from_charge(3.1, 3.0, 0.2), InvalidArgument);
  EXPECT_THROW(efficiency_from_charge(1.0, 0.0, 0.2), InvalidArgument);
}

// Properties on random instances.

TEST(ForwardModelProperties, Linearity) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const PhotonDistribution p(oracle::random_simplex(rng, 9)), q(oracle::random_simplex(rng, 9));
    const double a = u(rng), eta = u(rng);
    const double lhs = no_click_probability(mixture(p, q, a), eta);
    const double rhs = a * no_click_probability(p, eta) + (1 - a) * no_click_probability(q, eta);
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(ForwardModelProperties, MonotoneAndBounded) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const PhotonDistribution p(oracle::random_simplex(rng, 15));
    double prev = 1.0;
    for (int k = 0; k <= 100; ++k) {
      const double pk = no_click_probability(p, k / 100.0);
      EXPECT_LE(pk, prev + 1e-15);
      EXPECT_GE(pk, p[0] - 1e-15);
      EXPECT_LE(pk, 1.0);
      prev = pk;
    }
  }
}

TEST(ForwardModelProperties, MatrixVectorConsistency) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const PhotonDistribution p(oracle::random_simplex(rng, 11));
    const EfficiencyGrid grid(oracle::random_etas(rng, 7));
    const auto direct = no_click_vector(p, grid);
    const auto via_matrix = VisibilityMatrix(grid, p.truncation()).apply(p.probs());
    const auto ref = oracle::no_click(std::vector<double>(p.probs().begin(), p.probs().end()),
                                      std::vector<double>(grid.etas().begin(), grid.etas().end()));
    for (std::size_t v = 0; v < grid.size(); ++v) {
      EXPECT_NEAR(direct[v], via_matrix[v], 1e-12);
      EXPECT_NEAR(direct[v], ref[v], 1e-12);
    }
  }
}

TEST(ForwardModelProperties, ClosedFormsAtLargeTruncation) {
  for (double m : {0.02, 0.5, 5.33}) {
    const int n_bar = static_cast<int>(std::ceil(30.0 * (1.0 + m)));
    for (double eta : {0.01, 0.2, 0.66, 1.0}) {
      EXPECT_NEAR(no_click_probability(coherent(m, n_bar), eta), std::exp(-eta * m), 1e-6);
      EXPECT_NEAR(no_click_probability(thermal(m, n_bar), eta), 1.0 / (1.0 + eta * m), 1e-6);
    }
  }
}
