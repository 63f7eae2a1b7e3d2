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

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sfsim/errors.hpp"
#include "sfsim/gates.hpp"
#include "sfsim/philox.hpp"
#include "sfsim/state_vector.hpp"

namespace sfsim {

/// One disordered Floquet layer of a subsystem: per-site diagonal phases
/// (the d_l), one bond gate per nearest-neighbor pair of the open chain,
/// and the order in which the bond gates are applied within a period.
struct FloquetLayer {
  int n = 0;
  double alpha = 1.0;
  /// site_phases[s][b] multiplies amplitudes whose site-s bit equals b.
  std::vector<std::array<Complex, 2>> site_phases;
  /// bond_gates[l] acts on sites (l, l+1).
  std::vector<OperatorTwoQubit> bond_gates;
  /// Application order: bond bond_order[0] is applied first.
  std::vector<int> bond_order;
};

/// Haar-distributed 2x2 unitary: QR of a complex Ginibre matrix with the
/// R-diagonal phases folded back into Q (without the phase correction the
/// distribution would not be Haar). Entries are drawn row-major, real part
/// before imaginary part; this order is part of the reproducibility
/// contract.
inline OperatorOneQubit sample_haar_2x2(RandomStream& rng) {
  Eigen::Matrix2cd ginibre;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      ginibre(r, c) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<Eigen::Matrix2cd> qr(ginibre);
  Eigen::Matrix2cd q = qr.householderQ();
  const Eigen::Matrix2cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < 2; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
  }
  return q;
}

/// The two eigenvalues of a Haar 2x2 draw, ordered by ascending phase in
/// [0, 2pi). Only the unordered spectrum matters physically; the fixed
/// order makes runs reproducible.
inline std::array<Complex, 2> cue_site_phases(RandomStream& rng) {
  const OperatorOneQubit u = sample_haar_2x2(rng);
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(u, false);
  std::array<Complex, 2> phases = {solver.eigenvalues()(0),
                                   solver.eigenvalues()(1)};
  auto phase_of = [](const Complex& z) {
    const double a = std::arg(z);
    return a < 0.0 ? a + 2.0 * 3.14159265358979323846 : a;
  };
  if (phase_of(phases[1]) < phase_of(phases[0])) {
    std::swap(phases[0], phases[1]);
  }
  return phases;
}

/// GUE draw: M = (X + X^dagger)/2 with X an i.i.d. complex Gaussian matrix
/// whose real and imaginary parts each have unit variance, so the diagonal
/// of M has variance 1 and each off-diagonal component variance 1/2.
/// Hermiticity holds exactly by construction. X is drawn row-major, real
/// part before imaginary part.
inline Eigen::Matrix4cd sample_gue_4x4(RandomStream& rng) {
  Eigen::Matrix4cd x;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      x(r, c) = Complex(re, im);
    }
  }
  Eigen::Matrix4cd m;
  for (int r = 0; r < 4; ++r) {
    m(r, r) = Complex(x(r, r).real(), 0.0);
    for (int c = r + 1; c < 4; ++c) {
      const Complex upper = 0.5 * (x(r, c) + std::conj(x(c, r)));
      m(r, c) = upper;
      m(c, r) = std::conj(upper);
    }
  }
  return m;
}

/// u = exp(i M / alpha) via Hermitian eigendecomposition. Larger alpha means
/// weaker bonds, i.e. stronger disorder relative to the hopping.
inline OperatorTwoQubit bond_gate(const Eigen::Matrix4cd& m, double alpha) {
  if (!(alpha > 0.0)) {
    throw ArgumentError("bond_gate needs alpha > 0");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(m);
  Eigen::Vector4cd exp_eigs;
  for (int i = 0; i < 4; ++i) {
    const double theta = solver.eigenvalues()(i) / alpha;
    exp_eigs(i) = Complex(std::cos(theta), std::sin(theta));
  }
  return solver.eigenvectors() * exp_eigs.asDiagonal() *
         solver.eigenvectors().adjoint();
}

/// Draws a full disordered layer: n site-phase pairs, n-1 bond gates on the
/// open chain, and a uniform random application order. Draw order (site
/// phases ascending site, bond gates ascending bond, then the shuffle) is
/// part of the reproducibility contract.
inline FloquetLayer build_layer(int n, double alpha, RandomStream& rng) {
  if (n < 2) {
    throw ArgumentError("build_layer needs n >= 2");
  }
  if (!(alpha > 0.0)) {
    throw ArgumentError("build_layer needs alpha > 0");
  }
  FloquetLayer layer;
  layer.n = n;
  layer.alpha = alpha;
  layer.site_phases.reserve(n);
  for (int s = 0; s < n; ++s) {
    layer.site_phases.push_back(cue_site_phases(rng));
  }
  layer.bond_gates.reserve(n - 1);
  for (int l = 0; l < n - 1; ++l) {
    layer.bond_gates.push_back(bond_gate(sample_gue_4x4(rng), alpha));
  }
  layer.bond_order.resize(n - 1);
  std::iota(layer.bond_order.begin(), layer.bond_order.end(), 0);
  for (int i = n - 2; i > 0; --i) {
    const int j = static_cast<int>(
        rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(layer.bond_order[i], layer.bond_order[j]);
  }
  return layer;
}

/// Multiplies every amplitude by the product of its per-site phases in one
/// memory pass. The product is accumulated in ascending site order, which
/// fixes the floating-point result exactly.
inline void apply_site_phases(StateVector& state, const FloquetLayer& layer,
                              int site_offset) {
  Complex* amps = state.data();
  const std::uint64_t size = state.size();
  for (std::uint64_t i = 0; i < size; ++i) {
    double fr = 1.0, fi = 0.0;
    for (int s = 0; s < layer.n; ++s) {
      const Complex& p = layer.site_phases[s][(i >> (site_offset + s)) & 1];
      const double pr = p.real(), pi = p.imag();
      const double nr = fr * pr - fi * pi;
      fi = fr * pi + fi * pr;
      fr = nr;
    }
    const double ar = amps[i].real(), ai = amps[i].imag();
    amps[i] = Complex(ar * fr - ai * fi, ar * fi + ai * fr);
  }
}

/// One Floquet period U = U_u U_d embedded in a larger register: the
/// layer's sites s act on qubits s + site_offset. All site phases first,
/// then the bond gates in the layer's application order.
inline void apply_floquet_period_at(StateVector& state,
                                    const FloquetLayer& layer,
                                    int site_offset) {
  if (site_offset < 0 || state.num_qubits() < layer.n + site_offset) {
    throw ArgumentError("layer window does not fit the register");
  }
  apply_site_phases(state, layer, site_offset);
  for (int position = 0; position < layer.n - 1; ++position) {
    const int l = layer.bond_order[position];
    state.apply_two_qubit(layer.bond_gates[l], site_offset + l,
                          site_offset + l + 1);
  }
}

/// One Floquet period on a register of exactly the layer's size.
inline void apply_floquet_period(StateVector& state,
                                 const FloquetLayer& layer) {
  if (state.num_qubits() != layer.n) {
    throw ArgumentError("state size does not match layer size");
  }
  apply_floquet_period_at(state, layer, 0);
}

/// Connecting-gate flavor. kNone runs the two subsystems without any
/// coupling (the schedule is built but never acts).
enum class GateKind { kCz, kIswap, kCustom, kNone };

inline const char* gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::kCz: return "cz";
    case GateKind::kIswap: return "iswap";
    case GateKind::kCustom: return "custom";
    case GateKind::kNone: return "none";
  }
  throw ArgumentError("unknown gate kind");
}

/// Where the connecting gate acts at one time step: qubit q1 of subsystem 1
/// and qubit q2 of subsystem 2.
struct GatePosition {
  int q1 = 0;
  int q2 = 0;
};

struct RealizationParams {
  int L1 = 2;
  int L2 = 2;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  int Np = 10;
  int T = 0;
  GateKind gate_kind = GateKind::kCz;
  /// Used only when gate_kind == kCustom.
  OperatorTwoQubit custom_gate = OperatorTwoQubit::Identity();
};

/// 4x4 matrix of the connecting gate; first tensor factor = subsystem-1
/// qubit. kNone has no gate, represented as the identity.
inline OperatorTwoQubit connecting_gate(const RealizationParams& params) {
  switch (params.gate_kind) {
    case GateKind::kCz: return cz_gate();
    case GateKind::kIswap: return iswap_gate();
    case GateKind::kCustom: return params.custom_gate;
    case GateKind::kNone: return identity_two_qubit();
  }
  throw ArgumentError("unknown gate kind");
}

/// Everything needed to re-run one disorder realization: the two layers,
/// the connecting-gate schedule, the initial product state |k>|l>, and the
/// seed bookkeeping that produced them.
struct CircuitRealization {
  RealizationParams params;
  std::uint64_t seed = 0;
  std::uint32_t realization_index = 0;
  FloquetLayer layer1;
  FloquetLayer layer2;
  std::vector<GatePosition> schedule;
  std::uint64_t k = 0;
  std::uint64_t l = 0;
};

inline void validate(const RealizationParams& params) {
  if (params.L1 < 2 || params.L2 < 2) {
    throw ArgumentError("subsystem sizes must be >= 2");
  }
  if (params.L1 > 40 || params.L2 > 40) {
    throw ArgumentError("subsystem sizes above 40 qubits are not supported");
  }
  if (!(params.alpha1 > 0.0) || !(params.alpha2 > 0.0)) {
    throw ArgumentError("disorder strengths must be > 0");
  }
  if (params.Np < 1) {
    throw ArgumentError("periods per step must be >= 1");
  }
  if (params.T < 0) {
    throw ArgumentError("number of time steps must be >= 0");
  }
}

/// Deterministic function of (params, seed, realization_index). Each piece
/// comes from its own counter-based substream, so e.g. changing how many
/// schedule positions are drawn can never shift the layer matrices.
inline CircuitRealization build_realization(const RealizationParams& params,
                                            std::uint64_t seed,
                                            std::uint32_t realization_index =
                                                0) {
  validate(params);
  CircuitRealization real;
  real.params = params;
  real.seed = seed;
  real.realization_index = realization_index;

  RandomStream layer1_rng(seed, StreamPurpose::kLayer1, realization_index);
  real.layer1 = build_layer(params.L1, params.alpha1, layer1_rng);
  RandomStream layer2_rng(seed, StreamPurpose::kLayer2, realization_index);
  real.layer2 = build_layer(params.L2, params.alpha2, layer2_rng);

  RandomStream schedule_rng(seed, StreamPurpose::kSchedule,
                            realization_index);
  real.schedule.reserve(params.T);
  for (int t = 0; t < params.T; ++t) {
    GatePosition pos;
    pos.q1 = static_cast<int>(
        schedule_rng.uniform_below(static_cast<std::uint64_t>(params.L1)));
    pos.q2 = static_cast<int>(
        schedule_rng.uniform_below(static_cast<std::uint64_t>(params.L2)));
    real.schedule.push_back(pos);
  }

  RandomStream init_rng(seed, StreamPurpose::kInitialState,
                        realization_index);
  real.k = init_rng.uniform_below(std::uint64_t{1} << params.L1);
  real.l = init_rng.uniform_below(std::uint64_t{1} << params.L2);
  return real;
}

}  // namespace sfsim
