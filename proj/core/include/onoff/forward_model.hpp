#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "onoff/distributions.hpp"

namespace onoff {

/// The K quantum efficiencies η_ν at which on/off statistics are taken.
/// Entries lie in (0, 1] and are pairwise distinct; order is preserved.
class EfficiencyGrid {
 public:
  explicit EfficiencyGrid(std::vector<double> etas);

  static EfficiencyGrid linear(double lo, double hi, int count);
  static EfficiencyGrid log_spaced(double lo, double hi, int count);

  std::span<const double> etas() const noexcept { return etas_; }
  double operator[](std::size_t v) const { return etas_[v]; }
  std::size_t size() const noexcept { return etas_.size(); }

 private:
  std::vector<double> etas_;
};

/// Counts collected at one efficiency: n_ν runs, n₀ν of them without a click.
struct OnOffRecord {
  double eta = 0.0;
  std::uint64_t n_runs = 0;
  std::uint64_t n_no_click = 0;

  /// f_ν = n₀ν / n_ν. Throws InvalidArgument when n_runs is zero.
  double frequency() const;

  friend bool operator==(const OnOffRecord&, const OnOffRecord&) = default;
};

/// Throws InvalidArgument unless η ∈ (0,1], n_runs > 0 and n_no_click ≤ n_runs.
void validate(const OnOffRecord& record);

/// Grid of the records' efficiencies (validates each record and rejects duplicates).
EfficiencyGrid grid_of(std::span<const OnOffRecord> records);

/// A[ν][n] = (1−η_ν)ⁿ, stored row-major, K × (n̄+1).
class VisibilityMatrix {
 public:
  VisibilityMatrix(const EfficiencyGrid& grid, int n_bar);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  int truncation() const noexcept { return static_cast<int>(cols_) - 1; }

  double operator()(std::size_t v, std::size_t n) const { return data_[v * cols_ + n]; }
  std::span<const double> row(std::size_t v) const {
    return std::span<const double>(data_).subspan(v * cols_, cols_);
  }

  /// p = A·probs, reduced in ascending n.
  std::vector<double> apply(std::span<const double> probs) const;
  void apply(std::span<const double> probs, std::span<double> out) const;

  /// Σ_ν A[ν][n] for every column, reduced in ascending ν.
  std::vector<double> column_sums() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

VisibilityMatrix visibility_matrix(const EfficiencyGrid& grid, int n_bar);

/// p₀(η) = Σₙ (1−η)ⁿ ϱₙ. η may be 0 here (blind detector, p₀ = 1).
double no_click_probability(const PhotonDistribution& rho, double eta);

std::vector<double> no_click_vector(const PhotonDistribution& rho, const EfficiencyGrid& grid);

/// q_ν = p_ν / Σ_λ p_λ. Throws DegenerateInput when every p_ν is zero.
std::vector<double> renormalized_probabilities(std::span<const double> no_click);
std::vector<double> renormalized_probabilities(const PhotonDistribution& rho,
                                               const EfficiencyGrid& grid);

/// Observed no-click frequencies, one per record.
std::vector<double> frequencies(std::span<const OnOffRecord> records);

/// Efficiency from the PMT mean anodic charge, linear through the origin:
/// η = (η_P / charge_max) · charge.
double efficiency_from_charge(double mean_charge, double max_charge, double nominal_eta);

}  // namespace onoff
