#pragma once

#include <span>
#include <vector>

#include "onoff/distributions.hpp"

namespace onoff {

struct FitOptions {
  int max_modes = 50;     // multithermal μ is searched over 1..max_modes
  double rel_tol = 1e-6;  // golden-section stopping width, relative to the parameter
};

struct FitResult {
  Family family;
  ParamMap params;
  double fidelity;  // fidelity(rho_hat, make_distribution(family, params, n̄))
  double residual;  // Σₙ (ϱ̂ₙ − modelₙ)²
  bool boundary;    // a parameter ended on the edge of its search domain
};

/// Least-squares fit of `family` to `rho_hat` on the same truncation.
/// Degenerate inputs yield a boundary fit rather than an exception.
FitResult fit(const PhotonDistribution& rho_hat, Family family, const FitOptions& options = {});

/// Fits every family in `families` and orders the results by descending
/// fidelity. Fidelities within 1e-9 of each other are ordered by parameter count.
std::vector<FitResult> rank_models(const PhotonDistribution& rho_hat,
                                   std::span<const Family> families = kAllFamilies,
                                   const FitOptions& options = {});

/// σ²/N, the relative excess noise over Poissonian statistics.
double poisson_deviation(double mean, double excess_variance);

}  // namespace onoff
