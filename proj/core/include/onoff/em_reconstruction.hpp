#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "onoff/distributions.hpp"
#include "onoff/forward_model.hpp"

namespace onoff {

enum class StopReason { max_iterations, target_error_reached };

std::string_view to_string(StopReason reason);
StopReason stop_reason_from_string(std::string_view text);

struct ReconstructionConfig {
  /// Hilbert-space cutoff n̄. Unset: default_truncation() of the records.
  std::optional<int> n_bar;
  std::int64_t max_iterations = 100000;
  /// Stop as soon as ε⁽ⁱ⁾ ≤ target; 0 runs to max_iterations.
  double target_total_error = 0.0;
  /// Diagnostics are recorded at i = 0, every stride-th iteration, and the last one.
  std::int64_t history_stride = 1;
};

/// Throws InvalidArgument on out-of-domain fields.
void validate(const ReconstructionConfig& config);

struct HistoryPoint {
  std::int64_t iteration = 0;
  double value = 0.0;

  friend bool operator==(const HistoryPoint&, const HistoryPoint&) = default;
};

struct ReconstructionResult {
  PhotonDistribution rho_hat;
  /// Per-element confidence σₙ; +∞ where the Fisher information vanishes.
  std::vector<double> sigma;
  std::vector<HistoryPoint> error_history;
  /// −∞ entries mark iterates at which 𝓛 needs log(0) (e.g. n̄ = 0 with clicks).
  std::vector<HistoryPoint> loglik_history;
  std::int64_t iterations_run = 0;
  StopReason stop_reason = StopReason::max_iterations;
};

/// One multiplicative update
///   ϱₙ ← ϱₙ Σ_ν [A_νn / Σ_λ A_λn] · [f_ν / p_ν],
/// followed by renormalization to Σϱ = 1. Zero entries stay zero.
/// Throws NumericDegeneracy when some p_ν = 0 while f_ν > 0.
PhotonDistribution em_step(const PhotonDistribution& rho, const VisibilityMatrix& A,
                           std::span<const double> f);

/// Runs em_step from the uniform distribution until a stop condition holds,
/// then attaches Fisher confidences for 𝒩 = Σ_ν n_ν.
ReconstructionResult reconstruct(std::span<const OnOffRecord> records,
                                 const ReconstructionConfig& config);

/// ε = Σ_ν |f_ν − p_ν|.
double total_error(const PhotonDistribution& rho, const VisibilityMatrix& A,
                   std::span<const double> f);

/// 𝓛 = Σ_ν [n₀ν ln p_ν + (n_ν − n₀ν) ln(1 − p_ν)]; logarithms with a zero
/// count are skipped. Throws NumericDegeneracy when a needed logarithm is of 0.
double log_likelihood(const PhotonDistribution& rho, std::span<const OnOffRecord> records);
double log_likelihood(std::span<const double> no_click, std::span<const OnOffRecord> records);

/// ∂q_ν/∂ϱₙ at `rho`, K × (n̄+1) row-major, treating every ϱₙ as free:
///   [A_νn Σ_λ p_λ − p_ν Σ_λ A_λn] / (Σ_λ p_λ)².
std::vector<double> renormalized_gradient(const PhotonDistribution& rho, const EfficiencyGrid& grid);

/// Fₙ = Σ_ν (1/q_ν)(∂q_ν/∂ϱₙ)². Throws DegenerateInput when some q_ν = 0.
std::vector<double> fisher_information(const PhotonDistribution& rho, const EfficiencyGrid& grid);

/// σₙ = (𝒩 Fₙ)^{−1/2}; +∞ where Fₙ = 0.
std::vector<double> fisher_confidence(const PhotonDistribution& rho, const EfficiencyGrid& grid,
                                      double total_measurements);

/// n̄ = ⌈4(1 + m̂)⌉ with m̂ the mean of (1/f − 1)/η over the two largest-η
/// records. Falls back to kFallbackTruncation when either frequency is zero
/// and never exceeds kMaxDefaultTruncation.
int default_truncation(std::span<const OnOffRecord> records);

inline constexpr int kFallbackTruncation = 60;
inline constexpr int kMaxDefaultTruncation = 400;

}  // namespace onoff
