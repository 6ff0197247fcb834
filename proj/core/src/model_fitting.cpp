#include "onoff/model_fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "onoff/error.hpp"

namespace onoff {
namespace {

constexpr int kScanPoints = 200;
constexpr double kMinPositive = 1e-6;
constexpr double kInvPhi = 0.6180339887498949;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Objective = std::function<double(double)>;

struct Minimum {
  double x;
  double value;
  bool at_edge;  // x coincides with lo or hi of the search domain
};

double residual_of(const PhotonDistribution& rho, const PhotonDistribution& model) {
  double r = 0.0;
  for (std::size_t n = 0; n < rho.size(); ++n) {
    const double d = rho[n] - model[n];
    r += d * d;
  }
  return r;
}

// Objective that treats an invalid parameter point as infinitely bad.
double safe(const Objective& f, double x) {
  try {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  } catch (const InvalidArgument&) {
    return kInf;
  }
}

// Golden-section search on [a, b]; the end points are evaluated too so that a
// minimum on the edge is reported exactly.
Minimum golden(const Objective& f, double a, double b, double rel_tol) {
  const double lo = a, hi = b;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = safe(f, c), fd = safe(f, d);
  for (int it = 0; it < 300 && b - a > rel_tol * std::max(std::abs(c), kMinPositive * rel_tol);
       ++it) {
    if (fc <= fd) {
      b = d, d = c, fd = fc;
      c = b - kInvPhi * (b - a);
      fc = safe(f, c);
    } else {
      a = c, c = d, fc = fd;
      d = a + kInvPhi * (b - a);
      fd = safe(f, d);
    }
  }
  Minimum best{c, fc, false};
  if (fd < best.value) best = {d, fd, false};
  const double f_lo = safe(f, lo), f_hi = safe(f, hi);
  if (f_lo <= best.value) best = {lo, f_lo, true};
  if (f_hi < best.value) best = {hi, f_hi, true};
  return best;
}

// Log-spaced scan over [lo, hi] (plus 0 when lo is 0) and golden refinement
// between the neighbours of the best scan point.
Minimum scan_and_refine(const Objective& f, double lo, double hi, double rel_tol) {
  std::vector<double> xs;
  if (lo == 0.0) xs.push_back(0.0);
  const double start = std::max(lo, kMinPositive);
  const double ratio = std::log(hi / start) / (kScanPoints - 1);
  for (int k = 0; k < kScanPoints; ++k) xs.push_back(start * std::exp(ratio * k));
  xs.back() = hi;

  std::size_t best = 0;
  double best_value = kInf;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double v = safe(f, xs[k]);
    if (v < best_value) best_value = v, best = k;
  }
  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[std::min(best + 1, xs.size() - 1)];
  Minimum m = golden(f, a, b, rel_tol);
  m.at_edge = m.x == lo || m.x == hi;
  return m;
}

double upper_mean(const PhotonDistribution& rho) { return 10.0 * (rho.truncation() + 1.0); }

FitResult finish(const PhotonDistribution& rho, Family family, ParamMap params, bool boundary) {
  const auto model = make_distribution(family, params, rho.truncation());
  return {family, std::move(params), fidelity(rho, model), residual_of(rho, model), boundary};
}

// Euclidean projection of v onto the probability simplex.
std::vector<double> project_to_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
  return v;
}

FitResult fit_fock_mixture(const PhotonDistribution& rho) {
  const std::size_t kept = std::min<std::size_t>(3, rho.size());
  std::vector<double> head(rho.probs().begin(), rho.probs().begin() + kept);
  auto w = project_to_simplex(std::move(head));
  w.resize(3, 0.0);
  const bool boundary = std::any_of(w.begin(), w.end(), [](double x) { return x == 0.0; });
  return finish(rho, Family::fock_mixture, {{"w0", w[0]}, {"w1", w[1]}, {"w2", w[2]}}, boundary);
}

FitResult fit_one_parameter(const PhotonDistribution& rho, Family family, const char* name,
                            double rel_tol) {
  const int n_bar = rho.truncation();
  const Objective f = [&](double x) {
    return residual_of(rho, make_distribution(family, {{name, x}}, n_bar));
  };
  const Minimum m = scan_and_refine(f, 0.0, upper_mean(rho), rel_tol);
  return finish(rho, family, {{name, m.x}}, m.at_edge);
}

FitResult fit_gaussian(const PhotonDistribution& rho, double rel_tol) {
  const int n_bar = rho.truncation();
  const double n_hi = upper_mean(rho);
  const double s_hi = n_hi * n_hi;
  const auto objective = [&](double N, double s2) {
    return safe([&](double) { return residual_of(rho, gaussian_pulsed(N, s2, n_bar)); }, 0.0);
  };

  constexpr int kGridN = 80, kGridS = 60;
  const double n_step = std::log(n_hi / kMinPositive) / (kGridN - 1);
  const double s_step = std::log(s_hi / kMinPositive) / (kGridS - 2);
  double N = kMinPositive, s2 = 0.0, best = kInf;
  for (int i = 0; i < kGridN; ++i) {
    const double n_try = kMinPositive * std::exp(n_step * i);
    for (int j = 0; j < kGridS; ++j) {
      const double s_try = j == 0 ? 0.0 : kMinPositive * std::exp(s_step * (j - 1));
      const double v = objective(n_try, s_try);
      if (v < best) best = v, N = n_try, s2 = s_try;
    }
  }

  // Coordinate descent; each bracket is a multiple of the last move and
  // doubles whenever the minimum lands on it.
  double dN = N * (std::exp(n_step) - 1.0);
  double dS = std::max(s2, kMinPositive) * (std::exp(s_step) - 1.0);
  for (int round = 0; round < 500; ++round) {
    const double n_lo = std::max(kMinPositive, N - dN), n_up = std::min(n_hi, N + dN);
    const Minimum mn = golden([&](double x) { return objective(x, s2); }, n_lo, n_up, rel_tol);
    const double s_lo = std::max(0.0, s2 - dS), s_up = std::min(s_hi, s2 + dS);
    const Minimum ms = golden([&](double x) { return objective(mn.x, x); }, s_lo, s_up, rel_tol);

    const double moveN = std::abs(mn.x - N), moveS = std::abs(ms.x - s2);
    const bool edgeN = mn.at_edge && mn.x != kMinPositive && mn.x != n_hi;
    const bool edgeS = ms.at_edge && ms.x != 0.0 && ms.x != s_hi;
    N = mn.x, s2 = ms.x;
    dN = edgeN ? 2.0 * dN : std::max(4.0 * moveN, 10.0 * rel_tol * N);
    dS = edgeS ? 2.0 * dS : std::max(4.0 * moveS, 10.0 * rel_tol * std::max(s2, kMinPositive));
    if (!edgeN && !edgeS && moveN <= rel_tol * N && moveS <= rel_tol * std::max(s2, kMinPositive))
      break;
  }
  const bool boundary = N == kMinPositive || N == n_hi || s2 == 0.0 || s2 == s_hi;
  return finish(rho, Family::gaussian, {{"N", N}, {"sigma2", s2}}, boundary);
}

FitResult fit_multithermal(const PhotonDistribution& rho, const FitOptions& options) {
  if (options.max_modes < 1) throw InvalidArgument("max_modes must be >= 1");
  const int n_bar = rho.truncation();
  const double n_hi = upper_mean(rho);
  Minimum best{0.0, kInf, false};
  int best_mu = 1;
  for (int mu = 1; mu <= options.max_modes; ++mu) {
    const Objective f = [&](double N) { return residual_of(rho, multithermal(N, mu, n_bar)); };
    const Minimum m = scan_and_refine(f, kMinPositive, n_hi, options.rel_tol);
    if (m.value < best.value) best = m, best_mu = mu;
  }
  const bool boundary = best.at_edge || best_mu == options.max_modes;
  return finish(rho, Family::multithermal, {{"N", best.x}, {"mu", static_cast<double>(best_mu)}},
                boundary);
}

}  // namespace

FitResult fit(const PhotonDistribution& rho_hat, Family family, const FitOptions& options) {
  if (!(options.rel_tol > 0.0 && options.rel_tol < 1.0))
    throw InvalidArgument("rel_tol must lie in (0, 1)");
  switch (family) {
    case Family::fock_mixture: return fit_fock_mixture(rho_hat);
    case Family::coherent: return fit_one_parameter(rho_hat, family, "alpha2", options.rel_tol);
    case Family::thermal: return fit_one_parameter(rho_hat, family, "N", options.rel_tol);
    case Family::gaussian: return fit_gaussian(rho_hat, options.rel_tol);
    case Family::multithermal: return fit_multithermal(rho_hat, options);
  }
  throw InvalidArgument("unknown distribution family");
}

std::vector<FitResult> rank_models(const PhotonDistribution& rho_hat,
                                   std::span<const Family> families, const FitOptions& options) {
  std::vector<FitResult> ranked;
  for (Family f : families) ranked.push_back(fit(rho_hat, f, options));
  const auto before = [](const FitResult& a, const FitResult& b) {
    if (std::abs(a.fidelity - b.fidelity) > 1e-9) return a.fidelity > b.fidelity;
    return parameter_count(a.family) < parameter_count(b.family);
  };
  // Insertion sort: the tie tolerance is not transitive, so std::sort's
  // strict-weak-ordering requirement would not hold.
  for (std::size_t i = 1; i < ranked.size(); ++i)
    for (std::size_t j = i; j > 0 && before(ranked[j], ranked[j - 1]); --j)
      std::swap(ranked[j], ranked[j - 1]);
  return ranked;
}

double poisson_deviation(double mean, double excess_variance) {
  if (!(mean > 0.0)) throw InvalidArgument("poisson_deviation needs N > 0");
  return excess_variance / mean;
}

}  // namespace onoff
