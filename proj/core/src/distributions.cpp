#include "onoff/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "onoff/error.hpp"

namespace onoff {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_truncation(int n_bar) {
  if (n_bar < 0) throw InvalidArgument("truncation n_bar must be >= 0, got " + std::to_string(n_bar));
}

// Exponentiates log-weights after shifting by their maximum so that large n̄
// or large means do not underflow the whole vector.
PhotonDistribution from_log_weights(std::vector<double> log_w) {
  const double peak = *std::max_element(log_w.begin(), log_w.end());
  for (double& v : log_w) v = (v == kNegInf) ? 0.0 : std::exp(v - peak);
  return PhotonDistribution(std::move(log_w));
}

}  // namespace

PhotonDistribution::PhotonDistribution(std::vector<double> weights) : probs_(std::move(weights)) {
  if (probs_.empty()) throw InvalidArgument("photon distribution needs at least one entry");
  double total = 0.0;
  for (std::size_t n = 0; n < probs_.size(); ++n) {
    const double w = probs_[n];
    if (!std::isfinite(w) || w < 0.0)
      throw InvalidArgument("photon distribution entry " + std::to_string(n) +
                            " is negative or not finite");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("photon distribution has zero total weight");
  for (double& w : probs_) w /= total;
}

namespace pmf {

double log_coherent(int n, double mean) {
  if (mean == 0.0) return n == 0 ? 0.0 : kNegInf;
  return -mean + n * std::log(mean) - std::lgamma(n + 1.0);
}

double log_thermal(int n, double mean) {
  if (mean == 0.0) return n == 0 ? 0.0 : kNegInf;
  // Nⁿ/(N+1)ⁿ⁺¹ = (1 + 1/N)⁻ⁿ (1 + N)⁻¹
  return -n * std::log1p(1.0 / mean) - std::log1p(mean);
}

double log_multithermal(int n, double mean, int modes) {
  const double mu = modes;
  return std::lgamma(n + mu) - std::lgamma(n + 1.0) - std::lgamma(mu) -
         n * std::log1p(mu / mean) - mu * std::log1p(mean / mu);
}

double coherent(int n, double mean) { return std::exp(log_coherent(n, mean)); }
double thermal(int n, double mean) { return std::exp(log_thermal(n, mean)); }
double multithermal(int n, double mean, int modes) {
  return std::exp(log_multithermal(n, mean, modes));
}

}  // namespace pmf

PhotonDistribution fock(int m, int n_bar) {
  require_truncation(n_bar);
  if (m < 0 || m > n_bar)
    throw InvalidArgument("Fock index " + std::to_string(m) + " outside 0.." + std::to_string(n_bar));
  std::vector<double> w(n_bar + 1, 0.0);
  w[m] = 1.0;
  return PhotonDistribution(std::move(w));
}

PhotonDistribution coherent(double mean, int n_bar) {
  require_truncation(n_bar);
  if (!std::isfinite(mean) || mean < 0.0) throw InvalidArgument("coherent mean must be >= 0");
  std::vector<double> lw(n_bar + 1);
  for (int n = 0; n <= n_bar; ++n) lw[n] = pmf::log_coherent(n, mean);
  return from_log_weights(std::move(lw));
}

PhotonDistribution gaussian_pulsed(double mean, double excess_variance, int n_bar) {
  require_truncation(n_bar);
  if (!std::isfinite(mean) || mean <= 0.0) throw InvalidArgument("gaussian mean N must be > 0");
  if (!std::isfinite(excess_variance) || excess_variance < 0.0)
    throw InvalidArgument("gaussian excess variance must be >= 0");
  const double two_var = 2.0 * (mean + excess_variance);
  std::vector<double> lw(n_bar + 1);
  for (int n = 0; n <= n_bar; ++n) {
    const double d = n - mean;
    lw[n] = -d * d / two_var;
  }
  return from_log_weights(std::move(lw));
}

PhotonDistribution thermal(double mean, int n_bar) {
  require_truncation(n_bar);
  if (!std::isfinite(mean) || mean < 0.0) throw InvalidArgument("thermal mean must be >= 0");
  std::vector<double> lw(n_bar + 1);
  for (int n = 0; n <= n_bar; ++n) lw[n] = pmf::log_thermal(n, mean);
  return from_log_weights(std::move(lw));
}

PhotonDistribution multithermal(double mean, int modes, int n_bar) {
  require_truncation(n_bar);
  if (!std::isfinite(mean) || mean <= 0.0) throw InvalidArgument("multithermal mean must be > 0");
  if (modes < 1) throw InvalidArgument("multithermal mode count must be >= 1");
  std::vector<double> lw(n_bar + 1);
  for (int n = 0; n <= n_bar; ++n) lw[n] = pmf::log_multithermal(n, mean, modes);
  return from_log_weights(std::move(lw));
}

PhotonDistribution mixture(const PhotonDistribution& p, const PhotonDistribution& q,
                           double weight) {
  if (p.size() != q.size()) throw InvalidArgument("mixture of distributions with different truncation");
  if (!(weight >= 0.0 && weight <= 1.0)) throw InvalidArgument("mixture weight must lie in [0, 1]");
  std::vector<double> w(p.size());
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = weight * p[n] + (1.0 - weight) * q[n];
  return PhotonDistribution(std::move(w));
}

PhotonDistribution truncate_to(const PhotonDistribution& p, int n_bar) {
  require_truncation(n_bar);
  std::vector<double> w(n_bar + 1, 0.0);
  const std::size_t keep = std::min(w.size(), p.size());
  std::copy_n(p.probs().begin(), keep, w.begin());
  return PhotonDistribution(std::move(w));
}

double fidelity(const PhotonDistribution& p, const PhotonDistribution& q) {
  if (p.size() != q.size())
    throw InvalidArgument("fidelity needs equal truncation (" + std::to_string(p.truncation()) +
                          " vs " + std::to_string(q.truncation()) + ")");
  if (p == q) return 1.0;
  double g = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) g += std::sqrt(p[n]) * std::sqrt(q[n]);
  return std::clamp(g, 0.0, 1.0);
}

double mean_photon(const PhotonDistribution& p) {
  double m = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[n];
  return m;
}

double photon_variance(const PhotonDistribution& p) {
  const double m = mean_photon(p);
  double v = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double d = static_cast<double>(n) - m;
    v += d * d * p[n];
  }
  return v;
}

std::string_view to_string(Family family) {
  switch (family) {
    case Family::fock_mixture: return "fock_mixture";
    case Family::coherent: return "coherent";
    case Family::gaussian: return "gaussian";
    case Family::thermal: return "thermal";
    case Family::multithermal: return "multithermal";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (Family f : kAllFamilies)
    if (to_string(f) == name) return f;
  throw InvalidArgument("unknown distribution family '" + std::string(name) + "'");
}

int parameter_count(Family family) {
  switch (family) {
    case Family::coherent:
    case Family::thermal: return 1;
    case Family::fock_mixture:
    case Family::gaussian:
    case Family::multithermal: return 2;
  }
  return 0;
}

namespace {

double param(const ParamMap& params, std::string_view name, Family family) {
  const auto it = params.find(name);
  if (it == params.end())
    throw InvalidArgument("family " + std::string(to_string(family)) + " needs parameter '" +
                          std::string(name) + "'");
  return it->second;
}

}  // namespace

PhotonDistribution make_distribution(Family family, const ParamMap& params, int n_bar) {
  switch (family) {
    case Family::fock_mixture: {
      require_truncation(n_bar);
      std::vector<double> w(n_bar + 1, 0.0);
      const double weights[] = {param(params, "w0", family), param(params, "w1", family),
                                param(params, "w2", family)};
      for (int n = 0; n < 3 && n <= n_bar; ++n) w[n] = weights[n];
      return PhotonDistribution(std::move(w));
    }
    case Family::coherent: return coherent(param(params, "alpha2", family), n_bar);
    case Family::gaussian:
      return gaussian_pulsed(param(params, "N", family), param(params, "sigma2", family), n_bar);
    case Family::thermal: return thermal(param(params, "N", family), n_bar);
    case Family::multithermal:
      return multithermal(param(params, "N", family),
                          static_cast<int>(std::lround(param(params, "mu", family))), n_bar);
  }
  throw InvalidArgument("unknown distribution family");
}

}  // namespace onoff
