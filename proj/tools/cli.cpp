#include "cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

#include "onoff/error.hpp"
#include "onoff/io.hpp"

#ifndef ONOFF_VERSION
#define ONOFF_VERSION "unknown"
#endif

namespace onoff::cli {
namespace {

using nlohmann::json;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

class Manifest {
 public:
  explicit Manifest(std::string command) : started_(utc_now()) {
    j_["command"] = std::move(command);
    j_["inputs"] = json::object();
    j_["config"] = json::object();
    j_["input_digests"] = json::object();
    j_["outputs"] = json::array();
  }

  json& inputs() { return j_["inputs"]; }
  json& config() { return j_["config"]; }
  void seed(std::uint64_t s) { j_["seed"] = s; }
  void digest(const fs::path& input) {
    j_["input_digests"][input.string()] = "sha256:" + sha256_file(input);
  }
  void output(const std::string& name) { j_["outputs"].push_back(name); }

  void write(const fs::path& dir) {
    j_["versions"] = {{"onoff", ONOFF_VERSION},
                      {"rng", std::string(SplitMix64::kAlgorithm)},
                      {"compiler", __VERSION__}};
    j_["timestamps"] = {{"started", started_}, {"finished", utc_now()}};
    auto out = io::open_output(dir / "manifest.json");
    out << j_.dump(2) << '\n';
    if (!out.flush()) throw IoError("write to '" + (dir / "manifest.json").string() + "' failed");
  }

 private:
  json j_;
  std::string started_;
};

template <class Body>
void write_file(const fs::path& dir, const std::string& name, Manifest& manifest, Body&& body) {
  auto out = io::open_output(dir / name);
  body(out);
  if (!out.flush()) throw IoError("write to '" + (dir / name).string() + "' failed");
  manifest.output(name);
}

json families_json(const std::vector<Family>& families) {
  json j = json::array();
  for (Family f : families) j.push_back(std::string(to_string(f)));
  return j;
}

void echo_source(Manifest& m, const ScenarioSource& source, const ScenarioSpec& spec) {
  if (source.preset) m.inputs()["preset"] = *source.preset;
  if (source.scenario) {
    m.inputs()["scenario"] = source.scenario->string();
    m.digest(*source.scenario);
  }
  m.seed(spec.seed);
}

void write_simulation(const fs::path& out, Manifest& m, const SimulateOutput& sim) {
  write_file(out, "counts.csv", m, [&](std::ostream& os) { io::write_records_csv(os, sim.records); });
  write_file(out, "scenario.json", m,
             [&](std::ostream& os) { io::write_scenario_json(os, sim.spec); });
}

ReconstructionConfig reconstruction_config(std::optional<int> n_bar, std::int64_t max_iterations,
                                           double target_error) {
  ReconstructionConfig config;
  config.n_bar = n_bar;
  config.max_iterations = max_iterations;
  config.target_total_error = target_error;
  config.history_stride = history_stride_for(max_iterations);
  return config;
}

void echo_config(Manifest& m, const ReconstructionConfig& config, int n_bar_used) {
  m.config()["n_bar"] = n_bar_used;
  m.config()["n_bar_source"] = config.n_bar ? "flag" : "default_truncation";
  m.config()["max_iterations"] = config.max_iterations;
  m.config()["target_error"] = config.target_total_error;
  m.config()["history_stride"] = config.history_stride;
}

void write_reconstruction(const fs::path& out, Manifest& m, const ReconstructionResult& r) {
  write_file(out, "result.json", m, [&](std::ostream& os) { io::write_result_json(os, r); });
  write_file(out, "rho.csv", m,
             [&](std::ostream& os) { io::write_distribution_csv(os, r.rho_hat, r.sigma); });
  write_file(out, "convergence.csv", m,
             [&](std::ostream& os) { io::write_convergence_csv(os, r); });
}

void write_fits(const fs::path& out, Manifest& m, const std::vector<FitResult>& fits) {
  write_file(out, "fits.csv", m, [&](std::ostream& os) { io::write_fits_csv(os, fits); });
  write_file(out, "best_fit.json", m,
             [&](std::ostream& os) { io::write_fit_json(os, fits.front()); });
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ParseError*>(&e)) return kParseError;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e))
    return kIoError;
  if (dynamic_cast<const NumericDegeneracy*>(&e)) return kNumericDegeneracy;
  if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const DegenerateInput*>(&e))
    return kDomainError;
  return kFailure;
}

fs::path default_output_dir(std::string_view leaf) {
  const char* root = std::getenv(kOutputRootEnv);
  return fs::path(root && *root ? root : "onoff-out") / std::string(leaf);
}

std::int64_t default_iterations(std::string_view preset_name) {
  if (preset_name == "heralded_photon") return 30'000'000;
  if (preset_name == "pulsed_gaussian") return 50'000;
  if (preset_name == "pulsed_thermal") return 400;
  if (preset_name == "pulsed_multithermal") return 1'500;
  return 100'000;
}

std::int64_t history_stride_for(std::int64_t max_iterations) {
  return std::max<std::int64_t>(1, max_iterations / 10'000);
}

ScenarioSpec load_scenario(const ScenarioSource& source) {
  if (source.preset.has_value() == source.scenario.has_value())
    throw InvalidArgument("exactly one of --preset and --scenario is required");
  ScenarioSpec spec = source.preset ? preset(*source.preset) : io::read_scenario(*source.scenario);
  if (source.seed) spec.seed = *source.seed;
  return spec;
}

SimulateOutput cmd_simulate(const ScenarioSource& source, const fs::path& out) {
  Manifest manifest("simulate");
  SimulateOutput sim{load_scenario(source), {}};
  echo_source(manifest, source, sim.spec);
  sim.records = simulate_counts(sim.spec);
  ensure_directory(out);
  write_simulation(out, manifest, sim);
  manifest.write(out);
  return sim;
}

ReconstructionResult cmd_reconstruct(const ReconstructOptions& options, const fs::path& out) {
  Manifest manifest("reconstruct");
  const auto records = io::read_records(options.counts);
  manifest.inputs()["counts"] = options.counts.string();
  manifest.digest(options.counts);
  const auto config = reconstruction_config(
      options.n_bar, options.max_iterations.value_or(ReconstructionConfig{}.max_iterations),
      options.target_error);
  auto result = reconstruct(records, config);
  echo_config(manifest, config, result.rho_hat.truncation());
  ensure_directory(out);
  write_reconstruction(out, manifest, result);
  manifest.write(out);
  return result;
}

std::vector<FitResult> cmd_fit(const FitCommandOptions& options, const fs::path& out) {
  if (options.families.empty()) throw InvalidArgument("no model families selected");
  Manifest manifest("fit");
  const auto table = io::read_distribution(options.rho);
  manifest.inputs()["rho"] = options.rho.string();
  manifest.digest(options.rho);
  manifest.config()["families"] = families_json(options.families);
  auto fits = rank_models(table.rho, options.families);
  ensure_directory(out);
  write_fits(out, manifest, fits);
  manifest.write(out);
  return fits;
}

PipelineOutput cmd_pipeline(const PipelineOptions& options, const fs::path& out) {
  if (options.families.empty()) throw InvalidArgument("no model families selected");
  Manifest manifest("pipeline");
  SimulateOutput sim{load_scenario(options.source), {}};
  echo_source(manifest, options.source, sim.spec);
  sim.records = simulate_counts(sim.spec);

  const auto config = reconstruction_config(
      options.n_bar, options.max_iterations.value_or(default_iterations(sim.spec.label)),
      options.target_error);
  auto recon = reconstruct(sim.records, config);
  echo_config(manifest, config, recon.rho_hat.truncation());
  manifest.config()["families"] = families_json(options.families);
  auto fits = rank_models(recon.rho_hat, options.families);
  PipelineOutput result{std::move(sim), std::move(recon), std::move(fits)};

  ensure_directory(out);
  write_simulation(out, manifest, result.simulation);
  write_reconstruction(out, manifest, result.reconstruction);
  write_fits(out, manifest, result.fits);
  manifest.write(out);
  return result;
}

std::vector<Family> parse_families(std::string_view list) {
  std::vector<Family> families;
  while (!list.empty()) {
    const auto comma = list.find(',');
    std::string_view item = list.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) families.push_back(family_from_string(item));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (families.empty()) throw InvalidArgument("family list is empty");
  return families;
}

std::string sha256_file(const fs::path& path) {
  auto in = io::open_input(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 initialisation failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0)
      EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

}  // namespace onoff::cli
