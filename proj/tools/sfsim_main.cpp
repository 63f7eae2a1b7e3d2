// Copyright 2026 The sfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver. Subcommands:
//   run           <config-file>  disorder-averaged survival sweep
//   compare       <config-file>  paired connected vs disconnected sweep
//   oracle-check  <config-file>  sweep with a mandatory full-register check
//   show-manifest <result-dir>   print the manifest of a result directory
// Every config field can be overridden with a flag of the same name;
// SFSIM_WORKERS overrides the worker count (flags still win).

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sfsim/harness.hpp"

namespace {

struct Overrides {
  std::optional<int> L1, L2, Np, T, workers;
  std::optional<double> alpha1, alpha2, fraction;
  std::optional<std::string> gate_kind, mode, output_path, custom_gate;
  std::optional<std::uint64_t> realizations, master_seed, trajectory_budget;
  std::optional<bool> oracle_check;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--L1", o.L1, "qubits in subsystem 1");
  cmd->add_option("--L2", o.L2, "qubits in subsystem 2");
  cmd->add_option("--alpha1", o.alpha1, "interaction scale of subsystem 1");
  cmd->add_option("--alpha2", o.alpha2, "interaction scale of subsystem 2");
  cmd->add_option("--Np", o.Np, "Floquet periods per side per time step");
  cmd->add_option("--T", o.T, "number of time steps");
  cmd->add_option("--gate_kind", o.gate_kind,
                  "connecting gate: cz, iswap, none, custom");
  cmd->add_option("--custom_gate", o.custom_gate,
                  "4x4 gate as JSON rows of [re, im] pairs");
  cmd->add_option("--realizations", o.realizations,
                  "disorder realizations to average");
  cmd->add_option("--master_seed", o.master_seed, "master RNG seed");
  cmd->add_option("--mode", o.mode, "trajectory mode: exact or sampled");
  cmd->add_option("--fraction", o.fraction,
                  "sampled fraction of trajectories, in (0, 1]");
  cmd->add_option("--trajectory_budget", o.trajectory_budget,
                  "refuse runs needing more trajectories than this");
  cmd->add_option("--workers", o.workers, "worker thread count");
  cmd->add_option("--oracle_check", o.oracle_check,
                  "compare against the full-register oracle (true/false)");
  cmd->add_option("--output_path", o.output_path, "result directory");
}

void apply_overrides(sfsim::RunConfig& config, const Overrides& o) {
  if (o.L1) config.L1 = *o.L1;
  if (o.L2) config.L2 = *o.L2;
  if (o.alpha1) config.alpha1 = *o.alpha1;
  if (o.alpha2) config.alpha2 = *o.alpha2;
  if (o.Np) config.Np = *o.Np;
  if (o.T) config.T = *o.T;
  if (o.gate_kind) config.gate_kind = *o.gate_kind;
  if (o.custom_gate) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(*o.custom_gate);
    } catch (const nlohmann::json::exception& error) {
      throw sfsim::ConfigError(std::string("--custom_gate is not valid JSON: ") +
                               error.what());
    }
    config.custom_gate = sfsim::gate_matrix_from_json(doc);
  }
  if (o.realizations) config.realizations = *o.realizations;
  if (o.master_seed) config.master_seed = *o.master_seed;
  if (o.mode) config.mode = *o.mode;
  if (o.fraction) config.fraction = *o.fraction;
  if (o.trajectory_budget) config.trajectory_budget = *o.trajectory_budget;
  if (o.workers) config.workers = *o.workers;
  if (o.oracle_check) config.oracle_check = *o.oracle_check;
  if (o.output_path) config.output_path = *o.output_path;
}

void print_oracle_note(const sfsim::SweepOutcome& outcome) {
  if (outcome.oracle_checked) {
    std::cout << "oracle max deviation: "
              << sfsim::detail::format_double(outcome.oracle_max_deviation)
              << "\n";
  } else if (!outcome.oracle_skip_reason.empty()) {
    std::cout << "oracle check skipped: " << outcome.oracle_skip_reason
              << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Trajectory-based survival-probability simulator for two weakly "
      "connected Floquet subsystems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string manifest_path;
  Overrides overrides;

  CLI::App* run = app.add_subcommand(
      "run", "run a disorder-averaged survival sweep");
  run->add_option("config", config_path, "JSON config file")->required();
  add_override_flags(run, overrides);

  CLI::App* compare = app.add_subcommand(
      "compare", "paired sweep: configured gate vs no gate");
  compare->add_option("config", config_path, "JSON config file")->required();
  add_override_flags(compare, overrides);

  CLI::App* oracle_check = app.add_subcommand(
      "oracle-check", "sweep with a mandatory full-register oracle check");
  oracle_check->add_option("config", config_path, "JSON config file")
      ->required();
  add_override_flags(oracle_check, overrides);

  CLI::App* show_manifest = app.add_subcommand(
      "show-manifest", "print the manifest of a result directory");
  show_manifest->add_option("result-dir", manifest_path,
                            "result directory or manifest file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (show_manifest->parsed()) {
      std::cout << sfsim::read_manifest(manifest_path).dump(2) << "\n";
      return 0;
    }

    sfsim::RunConfig config = sfsim::load_config_file(config_path);
    sfsim::apply_env_overrides(config);
    apply_overrides(config, overrides);
    sfsim::validate_config(config);

    if (run->parsed()) {
      const sfsim::SweepOutcome outcome = sfsim::run_sweep(config);
      std::cout << "wrote per_realization.csv, aggregate.csv, manifest.json"
                << " to " << config.output_path << " (R="
                << config.realizations << ", T=" << config.T << ")\n";
      print_oracle_note(outcome);
    } else if (compare->parsed()) {
      sfsim::compare_connected_disconnected(config);
      std::cout << "wrote compare.csv, per-realization tables, manifest.json"
                << " to " << config.output_path << " (R="
                << config.realizations << ", T=" << config.T << ")\n";
    } else if (oracle_check->parsed()) {
      config.oracle_check = true;
      const sfsim::SweepOutcome outcome = sfsim::run_sweep(
          config, sfsim::OracleMode::kRequired, "oracle-check");
      print_oracle_note(outcome);
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
