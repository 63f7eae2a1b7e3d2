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

// Batch experiment driver: configuration files, realization sweeps, worker
// orchestration, disorder averaging, and CSV/manifest output. Only the
// coordinator (the calling thread) touches files; workers are stateless
// executors of realizations.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "sfsim/engine.hpp"
#include "sfsim/errors.hpp"
#include "sfsim/oracle.hpp"
#include "sfsim/philox.hpp"
#include "sfsim/random_model.hpp"
#include "sfsim/version.hpp"

namespace sfsim {

/// Full description of one experiment: the physical model, the averaging
/// protocol, the execution mode, and where results go. A default-constructed
/// config is valid and describes a trivial T = 0 run.
struct RunConfig {
  int L1 = 2;
  int L2 = 2;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  int Np = 10;
  int T = 0;
  /// One of "cz", "iswap", "none", "custom".
  std::string gate_kind = "cz";
  /// The connecting gate when gate_kind is "custom"; ignored otherwise.
  OperatorTwoQubit custom_gate = identity_two_qubit();
  /// Number of disorder realizations R to average over.
  std::uint64_t realizations = 1;
  std::uint64_t master_seed = 0;
  /// One of "exact", "sampled".
  std::string mode = "exact";
  /// Fraction of trajectories to sample in sampled mode, in (0, 1].
  double fraction = 1.0;
  std::uint64_t trajectory_budget = kDefaultTrajectoryBudget;
  int workers = 1;
  /// Compare each realization against the full-register oracle when it fits.
  bool oracle_check = false;
  std::string output_path = "results";
};

/// Environment variable that overrides the worker count (CLI flags still
/// win over the environment).
inline constexpr const char* kWorkersEnvVar = "SFSIM_WORKERS";

inline GateKind parse_gate_kind(const std::string& name) {
  if (name == "cz") return GateKind::kCz;
  if (name == "iswap") return GateKind::kIswap;
  if (name == "custom") return GateKind::kCustom;
  if (name == "none") return GateKind::kNone;
  throw ConfigError("gate_kind must be one of cz, iswap, none, custom (got '" +
                    name + "')");
}

inline RunMode parse_run_mode(const std::string& name) {
  if (name == "exact") return RunMode::kExact;
  if (name == "sampled") return RunMode::kSampled;
  throw ConfigError("mode must be 'exact' or 'sampled' (got '" + name + "')");
}

/// The model parameters described by a config, validated.
inline RealizationParams params_from(const RunConfig& config) {
  RealizationParams params;
  params.L1 = config.L1;
  params.L2 = config.L2;
  params.alpha1 = config.alpha1;
  params.alpha2 = config.alpha2;
  params.Np = config.Np;
  params.T = config.T;
  params.gate_kind = parse_gate_kind(config.gate_kind);
  params.custom_gate = config.custom_gate;
  validate(params);
  return params;
}

inline void validate_config(const RunConfig& config) {
  params_from(config);  // physical-model field checks
  if (config.realizations < 1) {
    throw ConfigError("realizations must be >= 1");
  }
  if (config.workers < 1) {
    throw ConfigError("workers must be >= 1");
  }
  if (config.trajectory_budget < 1) {
    throw ConfigError("trajectory_budget must be >= 1");
  }
  parse_run_mode(config.mode);
  if (!(config.fraction > 0.0) || config.fraction > 1.0) {
    throw ConfigError("fraction must be in (0, 1]");
  }
  if (config.output_path.empty()) {
    throw ConfigError("output_path must not be empty");
  }
}

namespace detail {

inline std::int64_t json_int(const nlohmann::json& value,
                             const std::string& key) {
  if (!value.is_number_integer() && !value.is_number_unsigned()) {
    throw ConfigError("config key '" + key + "' must be an integer");
  }
  return value.get<std::int64_t>();
}

inline std::uint64_t json_uint(const nlohmann::json& value,
                               const std::string& key) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer()) {
    const std::int64_t raw = value.get<std::int64_t>();
    if (raw < 0) {
      throw ConfigError("config key '" + key + "' must be non-negative");
    }
    return static_cast<std::uint64_t>(raw);
  }
  throw ConfigError("config key '" + key + "' must be an integer");
}

inline double json_double(const nlohmann::json& value,
                          const std::string& key) {
  if (!value.is_number()) {
    throw ConfigError("config key '" + key + "' must be a number");
  }
  return value.get<double>();
}

inline std::string json_string(const nlohmann::json& value,
                               const std::string& key) {
  if (!value.is_string()) {
    throw ConfigError("config key '" + key + "' must be a string");
  }
  return value.get<std::string>();
}

inline bool json_bool(const nlohmann::json& value, const std::string& key) {
  if (!value.is_boolean()) {
    throw ConfigError("config key '" + key + "' must be a boolean");
  }
  return value.get<bool>();
}

}  // namespace detail

/// Parses a 4x4 complex matrix encoded as four rows of four [re, im] pairs.
inline OperatorTwoQubit gate_matrix_from_json(const nlohmann::json& doc) {
  if (!doc.is_array() || doc.size() != 4) {
    throw ConfigError("custom_gate must be a 4x4 array of [re, im] pairs");
  }
  OperatorTwoQubit gate;
  for (int row = 0; row < 4; ++row) {
    const nlohmann::json& cells = doc[row];
    if (!cells.is_array() || cells.size() != 4) {
      throw ConfigError("custom_gate must be a 4x4 array of [re, im] pairs");
    }
    for (int col = 0; col < 4; ++col) {
      const nlohmann::json& cell = cells[col];
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
          !cell[1].is_number()) {
        throw ConfigError("custom_gate must be a 4x4 array of [re, im] pairs");
      }
      gate(row, col) = Complex(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return gate;
}

inline nlohmann::json gate_matrix_to_json(const OperatorTwoQubit& gate) {
  nlohmann::json rows = nlohmann::json::array();
  for (int row = 0; row < 4; ++row) {
    nlohmann::json cells = nlohmann::json::array();
    for (int col = 0; col < 4; ++col) {
      cells.push_back({gate(row, col).real(), gate(row, col).imag()});
    }
    rows.push_back(cells);
  }
  return rows;
}

/// Strict config deserialization: every key must be known (no silent
/// typos), every value must have the right type, and the result is
/// validated. Missing keys keep their defaults.
inline RunConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("config document must be a JSON object");
  }
  RunConfig config;
  auto as_int = [](const nlohmann::json& value, const std::string& key,
                   std::int64_t lo, std::int64_t hi) {
    const std::int64_t raw = detail::json_int(value, key);
    if (raw < lo || raw > hi) {
      throw ConfigError("config key '" + key + "' out of range");
    }
    return static_cast<int>(raw);
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "L1") {
      config.L1 = as_int(value, key, 0, 64);
    } else if (key == "L2") {
      config.L2 = as_int(value, key, 0, 64);
    } else if (key == "alpha1") {
      config.alpha1 = detail::json_double(value, key);
    } else if (key == "alpha2") {
      config.alpha2 = detail::json_double(value, key);
    } else if (key == "Np") {
      config.Np = as_int(value, key, 0, 1 << 20);
    } else if (key == "T") {
      config.T = as_int(value, key, 0, 1 << 20);
    } else if (key == "gate_kind") {
      config.gate_kind = detail::json_string(value, key);
    } else if (key == "custom_gate") {
      config.custom_gate = gate_matrix_from_json(value);
    } else if (key == "realizations") {
      config.realizations = detail::json_uint(value, key);
    } else if (key == "master_seed") {
      config.master_seed = detail::json_uint(value, key);
    } else if (key == "mode") {
      config.mode = detail::json_string(value, key);
    } else if (key == "fraction") {
      config.fraction = detail::json_double(value, key);
    } else if (key == "trajectory_budget") {
      config.trajectory_budget = detail::json_uint(value, key);
    } else if (key == "workers") {
      config.workers = as_int(value, key, 0, 1 << 20);
    } else if (key == "oracle_check") {
      config.oracle_check = detail::json_bool(value, key);
    } else if (key == "output_path") {
      config.output_path = detail::json_string(value, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  validate_config(config);
  return config;
}

/// Full round-trip serialization; config_from_json(config_to_json(c))
/// reproduces c. custom_gate is emitted only when it is in use.
inline nlohmann::json config_to_json(const RunConfig& config) {
  nlohmann::json doc;
  doc["L1"] = config.L1;
  doc["L2"] = config.L2;
  doc["alpha1"] = config.alpha1;
  doc["alpha2"] = config.alpha2;
  doc["Np"] = config.Np;
  doc["T"] = config.T;
  doc["gate_kind"] = config.gate_kind;
  if (config.gate_kind == "custom") {
    doc["custom_gate"] = gate_matrix_to_json(config.custom_gate);
  }
  doc["realizations"] = config.realizations;
  doc["master_seed"] = config.master_seed;
  doc["mode"] = config.mode;
  doc["fraction"] = config.fraction;
  doc["trajectory_budget"] = config.trajectory_budget;
  doc["workers"] = config.workers;
  doc["oracle_check"] = config.oracle_check;
  doc["output_path"] = config.output_path;
  return doc;
}

/// Loads a config from a JSON file. A result manifest is accepted too (its
/// embedded config is extracted), so a result directory alone is enough to
/// reproduce itself.
inline RunConfig load_config_file(const std::string& path) {
  std::ifstream input(path, std::ios::binary);
  if (!input) {
    throw ConfigError("cannot read config file '" + path + "'");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(input, nullptr, true,
                                /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& error) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " +
                      error.what());
  }
  if (doc.is_object() && doc.contains("format") &&
      doc["format"] == "sfsim-result-manifest") {
    if (!doc.contains("config")) {
      throw ConfigError("manifest '" + path + "' has no config section");
    }
    return config_from_json(doc["config"]);
  }
  return config_from_json(doc);
}

/// Applies the environment override for the worker count. CLI flags are
/// applied after this, so the precedence is flag > environment > file.
inline void apply_env_overrides(RunConfig& config) {
  const char* raw = std::getenv(kWorkersEnvVar);
  if (raw == nullptr || raw[0] == '\0') return;
  char* end = nullptr;
  const long value = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || value < 1) {
    throw ConfigError(std::string(kWorkersEnvVar) +
                      " must be a positive integer (got '" + raw + "')");
  }
  config.workers = static_cast<int>(value);
}

/// One aggregate table row: disorder mean of L(t) and its standard error
/// over R realizations.
struct AggregateRow {
  int t = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t realizations = 0;
};

/// Sequential mean and standard error of the mean, accumulated in
/// realization order so the result does not depend on scheduling.
inline std::vector<AggregateRow> aggregate_rows(
    const std::vector<SurvivalSeries>& series) {
  std::vector<AggregateRow> rows;
  if (series.empty()) return rows;
  const std::size_t count = series.size();
  const std::size_t steps = series[0].values.size();
  rows.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    double sum = 0.0;
    for (const SurvivalSeries& one : series) sum += one.values[t];
    const double mean = sum / static_cast<double>(count);
    double squares = 0.0;
    for (const SurvivalSeries& one : series) {
      const double d = one.values[t] - mean;
      squares += d * d;
    }
    const double variance =
        count > 1 ? squares / static_cast<double>(count - 1) : 0.0;
    rows[t].t = static_cast<int>(t);
    rows[t].mean = mean;
    rows[t].standard_error =
        std::sqrt(variance / static_cast<double>(count));
    rows[t].realizations = count;
  }
  return rows;
}

enum class OracleMode {
  kOff,
  /// Check against the oracle when the joint register fits under the cap,
  /// otherwise record why it was skipped.
  kIfFeasible,
  /// Check unconditionally; an oversized register is an error.
  kRequired,
};

/// In-memory result of one disorder sweep. `series[i]` is realization i.
struct SweepOutcome {
  std::vector<SurvivalSeries> series;
  std::vector<AggregateRow> aggregate;
  bool oracle_checked = false;
  double oracle_max_deviation = 0.0;
  std::string oracle_skip_reason;
};

namespace detail {

/// Realizations first, subtrees second: R independent realizations soak up
/// the workers; only when R < workers does the engine split trajectory
/// subtrees inside each realization.
struct WorkerPlan {
  int realization_threads = 1;
  int subtree_workers = 1;
};

inline WorkerPlan plan_workers(std::uint64_t realizations, int workers) {
  WorkerPlan plan;
  plan.realization_threads = static_cast<int>(std::min<std::uint64_t>(
      realizations, static_cast<std::uint64_t>(std::max(workers, 1))));
  if (realizations < static_cast<std::uint64_t>(workers)) {
    plan.subtree_workers = static_cast<int>(
        (static_cast<std::uint64_t>(workers) + realizations - 1) /
        realizations);
  }
  return plan;
}

/// Runs fn(0..count-1) on `threads` workers; rethrows the first failure.
/// Callers index into preallocated slots, so the output order is fixed
/// regardless of scheduling.
template <typename Fn>
void parallel_realizations(std::uint64_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::exception_ptr> failures(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&fn, &next, &failures, count, w] {
      try {
        for (;;) {
          const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
          if (i >= count) break;
          fn(i);
        }
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (std::thread& worker : pool) worker.join();
  for (const std::exception_ptr& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

/// Round-trip-exact decimal rendering for doubles.
inline std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

inline void write_per_realization_csv(
    const std::filesystem::path& path,
    const std::vector<SurvivalSeries>& series) {
  std::ofstream out = open_output(path);
  out << "realization_id,t,L_value,amplitude_re,amplitude_im\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    for (std::size_t t = 0; t < series[i].values.size(); ++t) {
      out << i << ',' << t << ',' << format_double(series[i].values[t])
          << ',' << format_double(series[i].amplitudes[t].real()) << ','
          << format_double(series[i].amplitudes[t].imag()) << '\n';
    }
  }
}

inline void write_aggregate_csv(const std::filesystem::path& path,
                                const std::vector<AggregateRow>& rows) {
  std::ofstream out = open_output(path);
  out << "t,mean_L,standard_error,realizations\n";
  for (const AggregateRow& row : rows) {
    out << row.t << ',' << format_double(row.mean) << ','
        << format_double(row.standard_error) << ',' << row.realizations
        << '\n';
  }
}

inline void write_compare_csv(const std::filesystem::path& path,
                              const std::vector<AggregateRow>& connected,
                              const std::vector<AggregateRow>& disconnected) {
  std::ofstream out = open_output(path);
  out << "t,mean_L_connected,standard_error_connected,mean_L_disconnected,"
         "standard_error_disconnected,realizations\n";
  for (std::size_t t = 0; t < connected.size(); ++t) {
    out << connected[t].t << ',' << format_double(connected[t].mean) << ','
        << format_double(connected[t].standard_error) << ','
        << format_double(disconnected[t].mean) << ','
        << format_double(disconnected[t].standard_error) << ','
        << connected[t].realizations << '\n';
  }
}

inline void write_manifest(const std::filesystem::path& directory,
                           const RunConfig& config,
                           const std::string& subcommand,
                           const std::string& status,
                           const std::vector<std::string>& files,
                           const SweepOutcome* outcome) {
  nlohmann::json doc;
  doc["format"] = "sfsim-result-manifest";
  doc["status"] = status;
  doc["subcommand"] = subcommand;
  doc["config"] = config_to_json(config);
  doc["provenance"] = {{"code_version", kVersion},
                       {"rng_algorithm", RandomStream::algorithm_name()}};
  doc["files"] = files;
  if (outcome != nullptr && (outcome->oracle_checked ||
                             !outcome->oracle_skip_reason.empty())) {
    nlohmann::json oracle;
    oracle["checked"] = outcome->oracle_checked;
    if (outcome->oracle_checked) {
      oracle["max_deviation"] = outcome->oracle_max_deviation;
    } else {
      oracle["skipped"] = outcome->oracle_skip_reason;
    }
    doc["oracle"] = oracle;
  }
  std::ofstream out = open_output(directory / "manifest.json");
  out << doc.dump(2) << '\n';
}

}  // namespace detail

inline OracleMode default_oracle_mode(const RunConfig& config) {
  return config.oracle_check ? OracleMode::kIfFeasible : OracleMode::kOff;
}

/// Runs the R-realization sweep in memory: realization i is built from
/// (config, master_seed, i), simulated by the trajectory engine, and
/// optionally checked against the full-register oracle.
inline SweepOutcome compute_sweep(const RunConfig& config,
                                  OracleMode oracle_mode) {
  validate_config(config);
  const RealizationParams params = params_from(config);
  const detail::WorkerPlan plan =
      detail::plan_workers(config.realizations, config.workers);

  EngineOptions engine;
  engine.mode = parse_run_mode(config.mode);
  engine.fraction = config.fraction;
  engine.trajectory_budget = config.trajectory_budget;
  engine.workers = plan.subtree_workers;

  SweepOutcome outcome;
  bool check_oracle = false;
  if (oracle_mode != OracleMode::kOff) {
    const int total_qubits = config.L1 + config.L2;
    if (total_qubits <= kDefaultOracleQubitCap ||
        oracle_mode == OracleMode::kRequired) {
      check_oracle = true;  // oversized + required: oracle_run reports it
    } else {
      outcome.oracle_skip_reason =
          "oracle register of " + std::to_string(total_qubits) +
          " qubits exceeds the cap of " +
          std::to_string(kDefaultOracleQubitCap);
    }
  }

  outcome.series.resize(config.realizations);
  std::vector<double> deviations(check_oracle ? config.realizations : 0, 0.0);
  detail::parallel_realizations(
      config.realizations, plan.realization_threads,
      [&](std::uint64_t i) {
        const CircuitRealization real =
            build_realization(params, config.master_seed, i);
        outcome.series[i] = run_survival(real, engine).series;
        if (check_oracle) {
          const OracleResult reference = oracle_run(real);
          double worst = 0.0;
          for (std::size_t t = 0; t < outcome.series[i].values.size(); ++t) {
            worst = std::max(worst,
                             std::abs(outcome.series[i].values[t] -
                                      reference.series.values[t]));
          }
          deviations[i] = worst;
        }
      });

  outcome.aggregate = aggregate_rows(outcome.series);
  if (check_oracle) {
    outcome.oracle_checked = true;
    for (double deviation : deviations) {
      outcome.oracle_max_deviation =
          std::max(outcome.oracle_max_deviation, deviation);
    }
  }
  return outcome;
}

/// Runs the sweep and writes per_realization.csv, aggregate.csv, and
/// manifest.json under config.output_path. The manifest is written up
/// front with status "incomplete" and flipped to "complete" at the end, so
/// an aborted run leaves its partial output marked.
inline SweepOutcome run_sweep(const RunConfig& config, OracleMode oracle_mode,
                              const std::string& subcommand = "run") {
  validate_config(config);
  const std::filesystem::path directory(config.output_path);
  std::filesystem::create_directories(directory);
  const std::vector<std::string> files = {"aggregate.csv",
                                          "per_realization.csv"};
  detail::write_manifest(directory, config, subcommand, "incomplete", files,
                         nullptr);
  const SweepOutcome outcome = compute_sweep(config, oracle_mode);
  detail::write_per_realization_csv(directory / "per_realization.csv",
                                    outcome.series);
  detail::write_aggregate_csv(directory / "aggregate.csv",
                              outcome.aggregate);
  detail::write_manifest(directory, config, subcommand, "complete", files,
                         &outcome);
  return outcome;
}

inline SweepOutcome run_sweep(const RunConfig& config) {
  return run_sweep(config, default_oracle_mode(config));
}

struct CompareOutcome {
  SweepOutcome connected;
  SweepOutcome disconnected;
};

/// Paired sweep: the same realizations (identical seeds, layers, schedules,
/// and initial states) once with the configured connecting gate and once
/// with no gate at all. Writes compare.csv plus both per-realization
/// tables and a manifest.
inline CompareOutcome compare_connected_disconnected(const RunConfig& config) {
  validate_config(config);
  RunConfig disconnected_config = config;
  disconnected_config.gate_kind = "none";

  const std::filesystem::path directory(config.output_path);
  std::filesystem::create_directories(directory);
  const std::vector<std::string> files = {"compare.csv",
                                          "per_realization_connected.csv",
                                          "per_realization_disconnected.csv"};
  detail::write_manifest(directory, config, "compare", "incomplete", files,
                         nullptr);

  CompareOutcome outcome;
  outcome.connected = compute_sweep(config, default_oracle_mode(config));
  outcome.disconnected =
      compute_sweep(disconnected_config, default_oracle_mode(config));

  detail::write_per_realization_csv(
      directory / "per_realization_connected.csv", outcome.connected.series);
  detail::write_per_realization_csv(
      directory / "per_realization_disconnected.csv",
      outcome.disconnected.series);
  detail::write_compare_csv(directory / "compare.csv",
                            outcome.connected.aggregate,
                            outcome.disconnected.aggregate);

  SweepOutcome merged;
  merged.oracle_checked =
      outcome.connected.oracle_checked && outcome.disconnected.oracle_checked;
  merged.oracle_max_deviation =
      std::max(outcome.connected.oracle_max_deviation,
               outcome.disconnected.oracle_max_deviation);
  merged.oracle_skip_reason = outcome.connected.oracle_skip_reason;
  detail::write_manifest(directory, config, "compare", "complete", files,
                         &merged);
  return outcome;
}

/// Reads the manifest of a result directory (or a direct path to a
/// manifest file) back as a JSON document.
inline nlohmann::json read_manifest(const std::string& path) {
  namespace fs = std::filesystem;
  fs::path manifest_path(path);
  if (fs::is_directory(manifest_path)) {
    manifest_path /= "manifest.json";
  }
  std::ifstream input(manifest_path, std::ios::binary);
  if (!input) {
    throw ConfigError("cannot read manifest '" + manifest_path.string() +
                      "'");
  }
  try {
    return nlohmann::json::parse(input);
  } catch (const nlohmann::json::exception& error) {
    throw ConfigError("manifest '" + manifest_path.string() +
                      "' is not valid JSON: " + error.what());
  }
}

}  // namespace sfsim
