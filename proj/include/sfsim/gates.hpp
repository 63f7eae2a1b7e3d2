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
#include <complex>

namespace sfsim {

using Complex = std::complex<double>;

/// 2x2 operator on a single qubit. Not required to be unitary: projectors
/// and ladder operators are first-class citizens here.
using OperatorOneQubit = Eigen::Matrix2cd;

/// 4x4 operator on an ordered qubit pair (first tensor factor = high matrix
/// bit, i.e. basis order |00>, |01>, |10>, |11> with the first factor's bit
/// written first).
using OperatorTwoQubit = Eigen::Matrix4cd;

inline OperatorOneQubit identity_one_qubit() {
  return OperatorOneQubit::Identity();
}

inline OperatorOneQubit pauli_z() {
  OperatorOneQubit z;
  z << 1, 0, 0, -1;
  return z;
}

/// |0><0|
inline OperatorOneQubit projector_zero() {
  OperatorOneQubit p;
  p << 1, 0, 0, 0;
  return p;
}

/// |1><1|
inline OperatorOneQubit projector_one() {
  OperatorOneQubit p;
  p << 0, 0, 0, 1;
  return p;
}

/// |0><1| (maps |1> to |0>)
inline OperatorOneQubit ket0_bra1() {
  OperatorOneQubit m;
  m << 0, 1, 0, 0;
  return m;
}

/// |1><0| (maps |0> to |1>)
inline OperatorOneQubit ket1_bra0() {
  OperatorOneQubit m;
  m << 0, 0, 1, 0;
  return m;
}

inline OperatorTwoQubit identity_two_qubit() {
  return OperatorTwoQubit::Identity();
}

/// Controlled-Z: diag(1, 1, 1, -1).
inline OperatorTwoQubit cz_gate() {
  OperatorTwoQubit g = OperatorTwoQubit::Identity();
  g(3, 3) = -1.0;
  return g;
}

/// iSWAP: swaps the pair and multiplies the swapped amplitudes by i.
inline OperatorTwoQubit iswap_gate() {
  const Complex i(0.0, 1.0);
  OperatorTwoQubit g = OperatorTwoQubit::Zero();
  g(0, 0) = 1.0;
  g(1, 2) = i;
  g(2, 1) = i;
  g(3, 3) = 1.0;
  return g;
}

}  // namespace sfsim
