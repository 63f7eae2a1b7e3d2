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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfsim/engine.hpp"
#include "sfsim/errors.hpp"
#include "sfsim/random_model.hpp"
#include "sfsim/state_vector.hpp"

namespace sfsim {

inline constexpr int kDefaultOracleQubitCap = 16;

/// Brute-force reference results: the survival series from evolving the
/// full 2^(L1+L2) state with no trajectory cutting, plus (optionally) a
/// snapshot of the full state after every step.
struct OracleResult {
  SurvivalSeries series;
  /// states[t] = full state after t steps (present when requested).
  /// Global index layout: subsystem-1 qubits are bits 0..L1-1, subsystem-2
  /// qubits are bits L1..L1+L2-1, so |k>|l> sits at index k + 2^{L1} l.
  std::vector<StateVector> states;
  /// Joint basis index k + 2^{L1} l whose amplitude the series tracks.
  std::uint64_t initial_index = 0;
};

/// Evolves the joint register directly: per step, N_p Floquet periods of
/// each subsystem's layer on its qubit window, then the connecting gate on
/// (q1, L1 + q2) as a plain 4x4 two-qubit gate (no decomposition). All
/// operations here are unitary, so the norm stays 1.
inline OracleResult oracle_run(const CircuitRealization& real,
                               bool keep_states = false,
                               int qubit_cap = kDefaultOracleQubitCap) {
  detail::validate_run_inputs(real);
  const int total_qubits = real.params.L1 + real.params.L2;
  if (total_qubits > qubit_cap) {
    throw ResourceError("oracle register of " + std::to_string(total_qubits) +
                        " qubits exceeds the cap of " +
                        std::to_string(qubit_cap));
  }

  const std::uint64_t initial_index =
      real.k + (real.l << real.params.L1);
  StateVector state = StateVector::product_state(total_qubits, initial_index);
  const bool connected = real.params.gate_kind != GateKind::kNone;
  const OperatorTwoQubit gate = connecting_gate(real.params);

  OracleResult result;
  result.initial_index = initial_index;
  result.series.amplitudes.reserve(real.params.T + 1);
  result.series.values.reserve(real.params.T + 1);
  auto record = [&](const StateVector& current) {
    const Complex a = current.amplitude(initial_index);
    result.series.amplitudes.push_back(a);
    result.series.values.push_back(a.real() * a.real() +
                                   a.imag() * a.imag());
    if (keep_states) result.states.push_back(current);
  };

  record(state);
  for (int t = 1; t <= real.params.T; ++t) {
    for (int p = 0; p < real.params.Np; ++p) {
      apply_floquet_period_at(state, real.layer1, 0);
    }
    for (int p = 0; p < real.params.Np; ++p) {
      apply_floquet_period_at(state, real.layer2, real.params.L1);
    }
    if (connected) {
      const GatePosition& pos = real.schedule[t - 1];
      state.apply_two_qubit(gate, pos.q1, real.params.L1 + pos.q2);
    }
    record(state);
  }
  return result;
}

}  // namespace sfsim
