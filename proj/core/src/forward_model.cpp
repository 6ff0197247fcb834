#include "onoff/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "onoff/error.hpp"

namespace onoff {
namespace {

void require_grid_bounds(double lo, double hi, int count) {
  if (count < 1) throw InvalidArgument("efficiency grid needs at least one point");
  if (!(lo > 0.0 && hi <= 1.0 && lo <= hi))
    throw InvalidArgument("efficiency grid bounds must satisfy 0 < lo <= hi <= 1");
}

}  // namespace

EfficiencyGrid::EfficiencyGrid(std::vector<double> etas) : etas_(std::move(etas)) {
  if (etas_.empty()) throw InvalidArgument("efficiency grid is empty");
  for (double eta : etas_) {
    if (!std::isfinite(eta) || eta <= 0.0 || eta > 1.0)
      throw InvalidArgument("efficiency " + std::to_string(eta) + " outside (0, 1]");
  }
  std::vector<double> sorted = etas_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidArgument("efficiency grid contains duplicate values");
}

EfficiencyGrid EfficiencyGrid::linear(double lo, double hi, int count) {
  require_grid_bounds(lo, hi, count);
  if (count == 1) return EfficiencyGrid({hi});
  std::vector<double> etas(count);
  for (int k = 0; k < count; ++k) etas[k] = lo + (hi - lo) * k / (count - 1);
  etas.back() = hi;
  return EfficiencyGrid(std::move(etas));
}

EfficiencyGrid EfficiencyGrid::log_spaced(double lo, double hi, int count) {
  require_grid_bounds(lo, hi, count);
  if (count == 1) return EfficiencyGrid({hi});
  const double a = std::log(lo);
  const double b = std::log(hi);
  std::vector<double> etas(count);
  for (int k = 0; k < count; ++k) etas[k] = std::exp(a + (b - a) * k / (count - 1));
  etas.front() = lo;
  etas.back() = hi;
  return EfficiencyGrid(std::move(etas));
}

double OnOffRecord::frequency() const {
  if (n_runs == 0) throw InvalidArgument("record at eta=" + std::to_string(eta) + " has zero runs");
  return static_cast<double>(n_no_click) / static_cast<double>(n_runs);
}

void validate(const OnOffRecord& record) {
  if (!std::isfinite(record.eta) || record.eta <= 0.0 || record.eta > 1.0)
    throw InvalidArgument("record efficiency " + std::to_string(record.eta) + " outside (0, 1]");
  if (record.n_runs == 0)
    throw InvalidArgument("record at eta=" + std::to_string(record.eta) + " has zero runs");
  if (record.n_no_click > record.n_runs)
    throw InvalidArgument("record at eta=" + std::to_string(record.eta) +
                          " has more no-click events than runs");
}

EfficiencyGrid grid_of(std::span<const OnOffRecord> records) {
  std::vector<double> etas;
  etas.reserve(records.size());
  for (const auto& r : records) {
    validate(r);
    etas.push_back(r.eta);
  }
  return EfficiencyGrid(std::move(etas));
}

VisibilityMatrix::VisibilityMatrix(const EfficiencyGrid& grid, int n_bar)
    : rows_(grid.size()), cols_(0) {
  if (n_bar < 0) throw InvalidArgument("truncation n_bar must be >= 0");
  cols_ = static_cast<std::size_t>(n_bar) + 1;
  data_.resize(rows_ * cols_);
  for (std::size_t v = 0; v < rows_; ++v) {
    const double base = 1.0 - grid[v];
    for (std::size_t n = 0; n < cols_; ++n)
      data_[v * cols_ + n] = std::pow(base, static_cast<double>(n));
  }
}

std::vector<double> VisibilityMatrix::apply(std::span<const double> probs) const {
  std::vector<double> out(rows_);
  apply(probs, out);
  return out;
}

void VisibilityMatrix::apply(std::span<const double> probs, std::span<double> out) const {
  if (probs.size() != cols_ || out.size() != rows_)
    throw InvalidArgument("visibility matrix shape does not match the distribution");
  for (std::size_t v = 0; v < rows_; ++v) {
    const double* a = data_.data() + v * cols_;
    double s = 0.0;
    for (std::size_t n = 0; n < cols_; ++n) s += a[n] * probs[n];
    out[v] = s;
  }
}

std::vector<double> VisibilityMatrix::column_sums() const {
  std::vector<double> sums(cols_, 0.0);
  for (std::size_t v = 0; v < rows_; ++v)
    for (std::size_t n = 0; n < cols_; ++n) sums[n] += data_[v * cols_ + n];
  return sums;
}

VisibilityMatrix visibility_matrix(const EfficiencyGrid& grid, int n_bar) {
  return VisibilityMatrix(grid, n_bar);
}

double no_click_probability(const PhotonDistribution& rho, double eta) {
  if (!std::isfinite(eta) || eta < 0.0 || eta > 1.0)
    throw InvalidArgument("efficiency " + std::to_string(eta) + " outside [0, 1]");
  const double base = 1.0 - eta;
  double p = 0.0;
  for (std::size_t n = 0; n < rho.size(); ++n) p += std::pow(base, static_cast<double>(n)) * rho[n];
  return std::clamp(p, 0.0, 1.0);
}

std::vector<double> no_click_vector(const PhotonDistribution& rho, const EfficiencyGrid& grid) {
  std::vector<double> p(grid.size());
  for (std::size_t v = 0; v < grid.size(); ++v) p[v] = no_click_probability(rho, grid[v]);
  return p;
}

std::vector<double> renormalized_probabilities(std::span<const double> no_click) {
  double total = 0.0;
  for (double p : no_click) total += p;
  if (!(total > 0.0)) throw DegenerateInput("all no-click probabilities are zero");
  std::vector<double> q(no_click.begin(), no_click.end());
  for (double& x : q) x /= total;
  return q;
}

std::vector<double> renormalized_probabilities(const PhotonDistribution& rho,
                                               const EfficiencyGrid& grid) {
  return renormalized_probabilities(no_click_vector(rho, grid));
}

std::vector<double> frequencies(std::span<const OnOffRecord> records) {
  if (records.empty()) throw InvalidArgument("no records");
  std::vector<double> f;
  f.reserve(records.size());
  for (const auto& r : records) f.push_back(r.frequency());
  return f;
}

double efficiency_from_charge(double mean_charge, double max_charge, double nominal_eta) {
  if (!(max_charge > 0.0)) throw InvalidArgument("maximum anodic charge must be > 0");
  if (!(nominal_eta > 0.0 && nominal_eta <= 1.0))
    throw InvalidArgument("nominal efficiency must lie in (0, 1]");
  if (!(mean_charge >= 0.0)) throw InvalidArgument("mean anodic charge must be >= 0");
  if (mean_charge > max_charge)
    throw InvalidArgument("mean anodic charge exceeds the calibration maximum");
  return nominal_eta / max_charge * mean_charge;
}

}  // namespace onoff
