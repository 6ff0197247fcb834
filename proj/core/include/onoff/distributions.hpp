#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace onoff {

/// Photon-number distribution truncated at n̄: probs()[n] is the probability
/// of n photons for n = 0..n̄.
///
/// Every construction path validates (finite, non-negative, positive total)
/// and renormalizes over the truncated support, so an instance always sums
/// to one up to rounding. Immutable after construction.
class PhotonDistribution {
 public:
  /// Builds from unnormalized non-negative weights; throws InvalidArgument on
  /// an empty vector, negative/non-finite entries, or an all-zero vector.
  explicit PhotonDistribution(std::vector<double> weights);

  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t n) const { return probs_[n]; }
  std::size_t size() const noexcept { return probs_.size(); }
  int truncation() const noexcept { return static_cast<int>(probs_.size()) - 1; }

  friend bool operator==(const PhotonDistribution&, const PhotonDistribution&) = default;

 private:
  std::vector<double> probs_;
};

// Untruncated closed-form probability mass functions, evaluated in log space.
namespace pmf {

double log_coherent(int n, double mean);
double log_thermal(int n, double mean);
double log_multithermal(int n, double mean, int modes);

double coherent(int n, double mean);
double thermal(int n, double mean);
double multithermal(int n, double mean, int modes);

}  // namespace pmf

/// |m⟩⟨m| on 0..n̄.
PhotonDistribution fock(int m, int n_bar);

/// Poissonian statistics with mean |α|².
PhotonDistribution coherent(double mean, int n_bar);

/// Laser pulse with excess noise: weights exp[−(n−N)²/(2(N+σ²))] at integer n.
PhotonDistribution gaussian_pulsed(double mean, double excess_variance, int n_bar);

/// Single-mode thermal (Bose-Einstein) light, Nⁿ/(N+1)ⁿ⁺¹.
PhotonDistribution thermal(double mean, int n_bar);

/// μ equally populated thermal modes (negative binomial with mean N).
PhotonDistribution multithermal(double mean, int modes, int n_bar);

/// Convex combination w·p + (1−w)·q of two distributions with equal truncation.
PhotonDistribution mixture(const PhotonDistribution& p, const PhotonDistribution& q,
                           double weight);

/// Re-expresses `p` on 0..n_bar: zero-pads when growing, drops the tail and
/// renormalizes when shrinking.
PhotonDistribution truncate_to(const PhotonDistribution& p, int n_bar);

/// Bhattacharyya overlap Σ√(pₙqₙ), in [0, 1].
double fidelity(const PhotonDistribution& p, const PhotonDistribution& q);

double mean_photon(const PhotonDistribution& p);
double photon_variance(const PhotonDistribution& p);

/// Parametric families. Parameter names per family:
///   fock_mixture  w0, w1, w2   (weights of |0>, |1>, |2>)
///   coherent      alpha2       (|α|²)
///   gaussian      N, sigma2
///   thermal       N
///   multithermal  N, mu        (mu is an integer mode count)
enum class Family { fock_mixture, coherent, gaussian, thermal, multithermal };

using ParamMap = std::map<std::string, double, std::less<>>;

inline constexpr Family kAllFamilies[] = {Family::fock_mixture, Family::coherent, Family::gaussian,
                                          Family::thermal, Family::multithermal};

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

/// Number of free parameters (fock_mixture has two: the weights sum to one).
int parameter_count(Family family);

/// Evaluates `family` at `params` on 0..n_bar. Missing parameters throw
/// InvalidArgument; mu is rounded to the nearest integer.
PhotonDistribution make_distribution(Family family, const ParamMap& params, int n_bar);

}  // namespace onoff
