#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "onoff/distributions.hpp"
#include "onoff/em_reconstruction.hpp"
#include "onoff/experiment_sim.hpp"
#include "onoff/forward_model.hpp"
#include "onoff/model_fitting.hpp"

// Readers and writers for the on-disk formats. CSV numbers are written with
// 17 significant digits so every value round-trips exactly. Malformed input
// throws ParseError naming the 1-based line; well-formed input outside a
// domain throws InvalidArgument (prefixed with the line for CSV).
namespace onoff::io {

/// printf "%.17g"; infinities as "inf"/"-inf".
std::string format_number(double x);

// Count records: CSV header `eta,n_runs,n_no_click`, or a JSON array of
// {"eta", "n_runs", "n_no_click"} objects.
std::vector<OnOffRecord> read_records_csv(std::istream& in);
std::vector<OnOffRecord> read_records_json(std::istream& in);
/// Dispatches on the extension (.json, anything else is CSV).
std::vector<OnOffRecord> read_records(const std::filesystem::path& path);
void write_records_csv(std::ostream& out, std::span<const OnOffRecord> records);
void write_records_json(std::ostream& out, std::span<const OnOffRecord> records);

/// A distribution file: rho plus, when present, the per-entry σ column.
struct DistributionTable {
  PhotonDistribution rho;
  std::vector<double> sigma;  // empty when the file has no sigma column
};

/// CSV header `n,prob` or `n,rho,sigma`; n must run 0, 1, 2, ... in order.
DistributionTable read_distribution_csv(std::istream& in);
/// JSON array of probabilities, or an object with a "rho" array.
DistributionTable read_distribution_json(std::istream& in);
DistributionTable read_distribution(const std::filesystem::path& path);
/// Header `n,rho,sigma` when sigma is non-empty, `n,prob` otherwise.
void write_distribution_csv(std::ostream& out, const PhotonDistribution& rho,
                            std::span<const double> sigma = {});

/// sigma entries that are infinite are written as null.
void write_result_json(std::ostream& out, const ReconstructionResult& result);
ReconstructionResult read_result_json(std::istream& in);
/// Header `iteration,total_error,log_likelihood`, one row per history point.
void write_convergence_csv(std::ostream& out, const ReconstructionResult& result);

void write_fit_json(std::ostream& out, const FitResult& fit);
FitResult read_fit_json(std::istream& in);
/// Header `family,params,G,residual,boundary`; params as `name=value;...`.
void write_fits_csv(std::ostream& out, std::span<const FitResult> fits);
std::vector<FitResult> read_fits_csv(std::istream& in);

/// Editable scenario file. The truth is either {"family", "params", "n_bar"}
/// or {"probs": [...]}; efficiencies are either an "etas" array or a
/// "grid" object {"spacing": "linear"|"log", "lo", "hi", "count"}.
void write_scenario_json(std::ostream& out, const ScenarioSpec& spec);
ScenarioSpec read_scenario_json(std::istream& in);
ScenarioSpec read_scenario(const std::filesystem::path& path);

/// Opens `path` for writing (truncating), throwing IoError on failure.
std::ofstream open_output(const std::filesystem::path& path);
/// Opens `path` for reading, throwing IoError on failure.
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace onoff::io
