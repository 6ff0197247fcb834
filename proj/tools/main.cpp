#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli.hpp"
#include "onoff/experiment_sim.hpp"

namespace {

using namespace onoff;
using namespace onoff::cli;

struct Flags {
  std::optional<std::string> preset;
  std::optional<std::string> scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_bar;
  std::optional<std::int64_t> max_iter;
  double target_error = 0.0;
  std::string families;
  std::string out;
  std::string input;
};

void add_source_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--preset", f.preset, "Named experiment preset");
  cmd->add_option("--scenario", f.scenario, "Scenario JSON file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "RNG seed (overrides the scenario's)");
}

void add_reconstruction_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--n-bar", f.n_bar, "Photon-number truncation (default: from the data)");
  cmd->add_option("--max-iter", f.max_iter, "Maximum EM iterations");
  cmd->add_option("--target-error", f.target_error, "Stop once the total error drops to this value");
}

ScenarioSource source_of(const Flags& f) {
  ScenarioSource s;
  s.preset = f.preset;
  if (f.scenario) s.scenario = *f.scenario;
  s.seed = f.seed;
  return s;
}

std::string source_leaf(const std::string& command, const Flags& f) {
  std::string leaf = command + "-" +
                     (f.preset ? *f.preset : f.scenario ? fs::path(*f.scenario).stem().string() : "run");
  if (f.seed) leaf += "-seed" + std::to_string(*f.seed);
  return leaf;
}

fs::path out_dir(const Flags& f, const std::string& leaf) {
  return f.out.empty() ? default_output_dir(leaf) : fs::path(f.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-number distributions from on/off detector statistics"};
  app.require_subcommand(1);
  Flags f;

  auto* simulate = app.add_subcommand("simulate", "Simulate on/off counts for a preset or scenario");
  add_source_flags(simulate, f);

  auto* recon = app.add_subcommand("reconstruct", "Reconstruct rho from a counts file");
  recon->add_option("counts", f.input, "counts.csv or counts JSON")->required();
  add_reconstruction_flags(recon, f);

  auto* fit = app.add_subcommand("fit", "Fit and rank model families against a distribution file");
  fit->add_option("rho", f.input, "rho.csv, n,prob CSV or JSON array")->required();

  auto* pipeline = app.add_subcommand("pipeline", "simulate, reconstruct and fit in one run");
  add_source_flags(pipeline, f);
  add_reconstruction_flags(pipeline, f);

  auto* presets = app.add_subcommand("presets", "List preset names");

  for (auto* cmd : {simulate, recon, fit, pipeline})
    cmd->add_option("--out", f.out, std::string("Output directory (default: $") + kOutputRootEnv + "/...)");
  for (auto* cmd : {fit, pipeline})
    cmd->add_option("--families", f.families, "Comma-separated families (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParseError;
  }

  try {
    if (simulate->parsed()) {
      const auto sim = cmd_simulate(source_of(f), out_dir(f, source_leaf("simulate", f)));
      std::cout << sim.records.size() << " records\n";
    } else if (recon->parsed()) {
      ReconstructOptions o{f.input, f.n_bar, f.max_iter, f.target_error};
      const auto r = cmd_reconstruct(o, out_dir(f, "reconstruct-" + fs::path(f.input).stem().string()));
      std::cout << "n_bar " << r.rho_hat.truncation() << ", " << r.iterations_run << " iterations ("
                << to_string(r.stop_reason) << ")\n";
    } else if (fit->parsed()) {
      FitCommandOptions o{f.input};
      if (!f.families.empty()) o.families = parse_families(f.families);
      const auto fits = cmd_fit(o, out_dir(f, "fit-" + fs::path(f.input).stem().string()));
      std::cout << "best: " << to_string(fits.front().family) << " G=" << fits.front().fidelity << '\n';
    } else if (pipeline->parsed()) {
      PipelineOptions o;
      o.source = source_of(f);
      o.n_bar = f.n_bar;
      o.max_iterations = f.max_iter;
      o.target_error = f.target_error;
      if (!f.families.empty()) o.families = parse_families(f.families);
      const auto r = cmd_pipeline(o, out_dir(f, source_leaf("pipeline", f)));
      std::cout << "best: " << to_string(r.fits.front().family) << " G=" << r.fits.front().fidelity
                << '\n';
    } else if (presets->parsed()) {
      for (auto name : preset_names()) std::cout << name << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "onoff: error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kOk;
}
