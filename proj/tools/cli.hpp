#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "onoff/distributions.hpp"
#include "onoff/em_reconstruction.hpp"
#include "onoff/experiment_sim.hpp"
#include "onoff/model_fitting.hpp"

namespace onoff::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseError = 2,
  kDomainError = 3,
  kNumericDegeneracy = 4,
  kIoError = 5,
};

/// Maps the library's exception types onto process exit codes.
int exit_code_for(const std::exception& e) noexcept;

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "ONOFF_OUTPUT_ROOT";

/// `$ONOFF_OUTPUT_ROOT/<leaf>`, or `onoff-out/<leaf>` when the variable is unset.
fs::path default_output_dir(std::string_view leaf);

/// Iteration count used by `pipeline` when --max-iter is absent.
std::int64_t default_iterations(std::string_view preset_name);

/// Keeps at most about 10⁴ history points for long runs.
std::int64_t history_stride_for(std::int64_t max_iterations);

struct ScenarioSource {
  std::optional<std::string> preset;
  std::optional<fs::path> scenario;
  std::optional<std::uint64_t> seed;  // overrides the preset/scenario seed
};

/// Resolves the preset or scenario file; exactly one of the two must be set.
ScenarioSpec load_scenario(const ScenarioSource& source);

struct SimulateOutput {
  ScenarioSpec spec;
  std::vector<OnOffRecord> records;
};

/// Writes counts.csv, scenario.json and manifest.json into `out`.
SimulateOutput cmd_simulate(const ScenarioSource& source, const fs::path& out);

struct ReconstructOptions {
  fs::path counts;
  std::optional<int> n_bar;
  std::optional<std::int64_t> max_iterations;
  double target_error = 0.0;
};

/// Writes result.json, rho.csv, convergence.csv and manifest.json into `out`.
ReconstructionResult cmd_reconstruct(const ReconstructOptions& options, const fs::path& out);

struct FitCommandOptions {
  fs::path rho;
  std::vector<Family> families{std::begin(kAllFamilies), std::end(kAllFamilies)};
};

/// Writes fits.csv (ranked), best_fit.json and manifest.json into `out`.
std::vector<FitResult> cmd_fit(const FitCommandOptions& options, const fs::path& out);

struct PipelineOptions {
  ScenarioSource source;
  std::optional<int> n_bar;
  std::optional<std::int64_t> max_iterations;
  double target_error = 0.0;
  std::vector<Family> families{std::begin(kAllFamilies), std::end(kAllFamilies)};
};

struct PipelineOutput {
  SimulateOutput simulation;
  ReconstructionResult reconstruction;
  std::vector<FitResult> fits;
};

/// simulate → reconstruct → fit into one directory with a single manifest.
PipelineOutput cmd_pipeline(const PipelineOptions& options, const fs::path& out);

/// Parses a comma-separated family list ("thermal,gaussian").
std::vector<Family> parse_families(std::string_view list);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

}  // namespace onoff::cli
