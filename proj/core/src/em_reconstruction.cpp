#include "onoff/em_reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "onoff/error.hpp"

namespace onoff {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Precomputed update weights A_νn / Σ_λ A_λn plus scratch space, so the
// iteration loop does no allocation. All reductions run in ascending index
// order; results do not depend on anything but the inputs.
class EmKernel {
 public:
  EmKernel(const VisibilityMatrix& A, std::span<const double> f)
      : A_(A), f_(f.begin(), f.end()), weights_(A.rows() * A.cols()), factor_(A.cols()),
        has_sensitivity_(A.cols()), ratio_(A.rows()) {
    if (f_.size() != A.rows())
      throw InvalidArgument("frequency vector length does not match the efficiency grid");
    const auto col = A.column_sums();
    for (std::size_t n = 0; n < A.cols(); ++n) has_sensitivity_[n] = col[n] > 0.0;
    for (std::size_t v = 0; v < A.rows(); ++v)
      for (std::size_t n = 0; n < A.cols(); ++n)
        weights_[v * A.cols() + n] = has_sensitivity_[n] ? A(v, n) / col[n] : 0.0;
  }

  // `p` must hold A·rho. Writes the renormalized update into `out`.
  void step(std::span<const double> rho, std::span<const double> p, std::span<double> out) {
    const std::size_t K = A_.rows();
    const std::size_t M = A_.cols();
    for (std::size_t v = 0; v < K; ++v) {
      if (p[v] > 0.0) {
        ratio_[v] = f_[v] / p[v];
      } else if (f_[v] == 0.0) {
        ratio_[v] = 0.0;
      } else {
        throw NumericDegeneracy("model predicts zero no-click probability at eta index " +
                                std::to_string(v) + " but the observed frequency is positive");
      }
    }
    std::fill(factor_.begin(), factor_.end(), 0.0);
    for (std::size_t v = 0; v < K; ++v) {
      const double* w = weights_.data() + v * M;
      const double r = ratio_[v];
      for (std::size_t n = 0; n < M; ++n) factor_[n] += w[n] * r;
    }
    double total = 0.0;
    for (std::size_t n = 0; n < M; ++n) {
      // A column without data sensitivity (only when every η = 1) keeps its value.
      out[n] = rho[n] * (has_sensitivity_[n] ? factor_[n] : 1.0);
      total += out[n];
    }
    if (!(total > 0.0) || !std::isfinite(total))
      throw NumericDegeneracy("EM update annihilated the distribution");
    for (std::size_t n = 0; n < M; ++n) out[n] /= total;
  }

  double total_error(std::span<const double> p) const {
    double eps = 0.0;
    for (std::size_t v = 0; v < f_.size(); ++v) eps += std::abs(f_[v] - p[v]);
    return eps;
  }

 private:
  const VisibilityMatrix& A_;
  std::vector<double> f_;
  std::vector<double> weights_;
  std::vector<double> factor_;
  std::vector<unsigned char> has_sensitivity_;
  std::vector<double> ratio_;
};

void require_frequencies(std::span<const double> f) {
  for (double x : f)
    if (!std::isfinite(x) || x < 0.0 || x > 1.0)
      throw InvalidArgument("frequencies must lie in [0, 1]");
}

double checked_loglik(std::span<const double> p, std::span<const OnOffRecord> records) {
  try {
    return log_likelihood(p, records);
  } catch (const NumericDegeneracy&) {
    return -kInf;
  }
}

}  // namespace

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::target_error_reached: return "target_error_reached";
  }
  return "max_iterations";
}

StopReason stop_reason_from_string(std::string_view text) {
  if (text == "max_iterations") return StopReason::max_iterations;
  if (text == "target_error_reached") return StopReason::target_error_reached;
  throw InvalidArgument("unknown stop reason '" + std::string(text) + "'");
}

void validate(const ReconstructionConfig& config) {
  if (config.n_bar && *config.n_bar < 0) throw InvalidArgument("n_bar must be >= 0");
  if (config.max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  if (!std::isfinite(config.target_total_error) || config.target_total_error < 0.0)
    throw InvalidArgument("target_total_error must be finite and >= 0");
  if (config.history_stride < 1) throw InvalidArgument("history_stride must be >= 1");
}

PhotonDistribution em_step(const PhotonDistribution& rho, const VisibilityMatrix& A,
                           std::span<const double> f) {
  if (rho.size() != A.cols())
    throw InvalidArgument("distribution truncation does not match the visibility matrix");
  require_frequencies(f);
  EmKernel kernel(A, f);
  const auto p = A.apply(rho.probs());
  std::vector<double> out(rho.size());
  kernel.step(rho.probs(), p, out);
  return PhotonDistribution(std::move(out));
}

ReconstructionResult reconstruct(std::span<const OnOffRecord> records,
                                 const ReconstructionConfig& config) {
  if (records.empty()) throw InvalidArgument("reconstruction needs at least one record");
  validate(config);
  const EfficiencyGrid grid = grid_of(records);
  const int n_bar = config.n_bar ? *config.n_bar : default_truncation(records);
  const VisibilityMatrix A(grid, n_bar);
  const auto f = frequencies(records);
  EmKernel kernel(A, f);

  const std::size_t M = A.cols();
  std::vector<double> rho(M, 1.0 / static_cast<double>(M));
  std::vector<double> next(M);
  std::vector<double> p(A.rows());

  ReconstructionResult result{PhotonDistribution(rho), {}, {}, {}, 0, StopReason::max_iterations};
  const auto record_history = [&](std::int64_t i, double eps) {
    result.error_history.push_back({i, eps});
    result.loglik_history.push_back({i, checked_loglik(p, records)});
  };

  for (std::int64_t i = 0;; ++i) {
    A.apply(rho, p);
    const double eps = kernel.total_error(p);
    const bool target_hit = config.target_total_error > 0.0 && eps <= config.target_total_error;
    const bool last = target_hit || i == config.max_iterations;
    if (i % config.history_stride == 0 || last) record_history(i, eps);
    if (last) {
      result.iterations_run = i;
      result.stop_reason = target_hit ? StopReason::target_error_reached : StopReason::max_iterations;
      break;
    }
    kernel.step(rho, p, next);
    rho.swap(next);
  }

  result.rho_hat = PhotonDistribution(rho);
  double total_runs = 0.0;
  for (const auto& r : records) total_runs += static_cast<double>(r.n_runs);
  result.sigma = fisher_confidence(result.rho_hat, grid, total_runs);
  return result;
}

double total_error(const PhotonDistribution& rho, const VisibilityMatrix& A,
                   std::span<const double> f) {
  if (rho.size() != A.cols() || f.size() != A.rows())
    throw InvalidArgument("total_error: shapes do not agree");
  const auto p = A.apply(rho.probs());
  double eps = 0.0;
  for (std::size_t v = 0; v < p.size(); ++v) eps += std::abs(f[v] - p[v]);
  return eps;
}

double log_likelihood(std::span<const double> no_click, std::span<const OnOffRecord> records) {
  if (no_click.size() != records.size())
    throw InvalidArgument("log_likelihood: one probability per record required");
  double ll = 0.0;
  for (std::size_t v = 0; v < records.size(); ++v) {
    const auto& r = records[v];
    const double p = std::clamp(no_click[v], 0.0, 1.0);
    const double n0 = static_cast<double>(r.n_no_click);
    const double n1 = static_cast<double>(r.n_runs - r.n_no_click);
    if (r.n_no_click > 0) {
      if (p == 0.0) throw NumericDegeneracy("log-likelihood needs ln(0): p = 0 with no-click events");
      ll += n0 * std::log(p);
    }
    if (r.n_runs > r.n_no_click) {
      if (p == 1.0) throw NumericDegeneracy("log-likelihood needs ln(0): p = 1 with click events");
      ll += n1 * std::log1p(-p);
    }
  }
  return ll;
}

double log_likelihood(const PhotonDistribution& rho, std::span<const OnOffRecord> records) {
  const EfficiencyGrid grid = grid_of(records);
  return log_likelihood(no_click_vector(rho, grid), records);
}

std::vector<double> renormalized_gradient(const PhotonDistribution& rho, const EfficiencyGrid& grid) {
  const VisibilityMatrix A(grid, rho.truncation());
  const auto p = A.apply(rho.probs());
  const auto col = A.column_sums();
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(total > 0.0)) throw DegenerateInput("all no-click probabilities are zero");
  const double denom = total * total;
  std::vector<double> grad(A.rows() * A.cols());
  for (std::size_t v = 0; v < A.rows(); ++v)
    for (std::size_t n = 0; n < A.cols(); ++n)
      grad[v * A.cols() + n] = (A(v, n) * total - p[v] * col[n]) / denom;
  return grad;
}

std::vector<double> fisher_information(const PhotonDistribution& rho, const EfficiencyGrid& grid) {
  const auto q = renormalized_probabilities(rho, grid);
  for (double x : q)
    if (!(x > 0.0)) throw DegenerateInput("Fisher information needs every q_nu > 0");
  const auto grad = renormalized_gradient(rho, grid);
  const std::size_t M = rho.size();
  std::vector<double> F(M, 0.0);
  for (std::size_t v = 0; v < q.size(); ++v)
    for (std::size_t n = 0; n < M; ++n) {
      const double d = grad[v * M + n];
      F[n] += d * d / q[v];
    }
  return F;
}

std::vector<double> fisher_confidence(const PhotonDistribution& rho, const EfficiencyGrid& grid,
                                      double total_measurements) {
  if (!(total_measurements > 0.0) || !std::isfinite(total_measurements))
    throw InvalidArgument("total number of measurements must be > 0");
  auto F = fisher_information(rho, grid);
  for (double& x : F) x = x > 0.0 ? 1.0 / std::sqrt(total_measurements * x) : kInf;
  return F;
}

int default_truncation(std::span<const OnOffRecord> records) {
  if (records.empty()) throw InvalidArgument("default truncation needs at least one record");
  std::vector<const OnOffRecord*> order;
  for (const auto& r : records) {
    validate(r);
    order.push_back(&r);
  }
  std::sort(order.begin(), order.end(),
            [](const OnOffRecord* a, const OnOffRecord* b) { return a->eta > b->eta; });
  const std::size_t used = std::min<std::size_t>(2, order.size());
  double mean_estimate = 0.0;
  for (std::size_t k = 0; k < used; ++k) {
    const double f = order[k]->frequency();
    if (f == 0.0) return kFallbackTruncation;
    // 1/f − 1 ≈ η m̂ to first order; exact for thermal light.
    mean_estimate += (1.0 / f - 1.0) / order[k]->eta;
  }
  mean_estimate /= static_cast<double>(used);
  const double n_bar = std::ceil(4.0 * (1.0 + mean_estimate));
  return static_cast<int>(std::min<double>(n_bar, kMaxDefaultTruncation));
}

}  // namespace onoff
