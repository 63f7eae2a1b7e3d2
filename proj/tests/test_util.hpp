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

// Dense-matrix reference implementations used as independent oracles for the
// strided kernels, plus small generators for random test inputs. Everything
// here is deliberately written the slow, obvious way.

#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "sfsim/philox.hpp"
#include "sfsim/random_model.hpp"
#include "sfsim/state_vector.hpp"

namespace sfsim::testing {

inline Eigen::VectorXcd to_eigen(const StateVector& state) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(state.size()));
  for (std::uint64_t i = 0; i < state.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = state.amplitude(i);
  }
  return v;
}

/// Kronecker product with `a` as the first tensor factor (most significant
/// block index), matching the two-qubit operator convention.
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Full 2^n x 2^n embedding of a one-qubit operator at site q, built from
/// the definition of the bit convention (qubit q = bit q of the index).
inline Eigen::MatrixXcd embed_one_qubit(int n, const Eigen::Matrix2cd& op,
                                        int q) {
  const std::uint64_t dim = std::uint64_t{1} << n;
  const std::uint64_t mask = std::uint64_t{1} << q;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint64_t col = 0; col < dim; ++col) {
    const int col_bit = (col & mask) ? 1 : 0;
    for (int row_bit = 0; row_bit < 2; ++row_bit) {
      const std::uint64_t row =
          (col & ~mask) | (static_cast<std::uint64_t>(row_bit) << q);
      out(row, col) += op(row_bit, col_bit);
    }
  }
  return out;
}

/// Full 2^n x 2^n embedding of a two-qubit operator on the ordered pair
/// (qa, qb); matrix index s = 2 * (bit qa) + (bit qb).
inline Eigen::MatrixXcd embed_two_qubit(int n, const Eigen::Matrix4cd& op,
                                        int qa, int qb) {
  const std::uint64_t dim = std::uint64_t{1} << n;
  const std::uint64_t ma = std::uint64_t{1} << qa;
  const std::uint64_t mb = std::uint64_t{1} << qb;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint64_t col = 0; col < dim; ++col) {
    const int col_s = 2 * ((col & ma) ? 1 : 0) + ((col & mb) ? 1 : 0);
    for (int row_s = 0; row_s < 4; ++row_s) {
      std::uint64_t row = col & ~ma & ~mb;
      if (row_s & 2) row |= ma;
      if (row_s & 1) row |= mb;
      out(row, col) += op(row_s, col_s);
    }
  }
  return out;
}

/// Haar-ish random unitary for generating test inputs: QR of a complex
/// Ginibre matrix with the R-diagonal phases folded back in.
inline Eigen::MatrixXcd random_unitary(RandomStream& stream, int dim) {
  Eigen::MatrixXcd ginibre(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      ginibre(i, j) = Complex(stream.gaussian(), stream.gaussian());
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
  }
  return q;
}

/// Random (generally unnormalized) state with i.i.d. Gaussian amplitudes.
inline StateVector random_state(RandomStream& stream, int n) {
  StateVector state = StateVector::product_state(n, 0);
  Complex* amps = state.data();
  for (std::uint64_t i = 0; i < state.size(); ++i) {
    amps[i] = Complex(stream.gaussian(), stream.gaussian());
  }
  return state;
}

/// Dense 2^total x 2^total matrix of one Floquet period (site phases first,
/// then bond gates in application order), with the layer's sites embedded at
/// qubits [offset, offset + n). Brute-force reference for the strided
/// implementation.
inline Eigen::MatrixXcd dense_layer_matrix(const FloquetLayer& layer,
                                           int total, int offset) {
  const std::uint64_t dim = std::uint64_t{1} << total;
  Eigen::VectorXcd diag(static_cast<Eigen::Index>(dim));
  for (std::uint64_t i = 0; i < dim; ++i) {
    Complex factor(1.0, 0.0);
    for (int s = 0; s < layer.n; ++s) {
      factor *= layer.site_phases[s][(i >> (offset + s)) & 1];
    }
    diag(static_cast<Eigen::Index>(i)) = factor;
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd(diag.asDiagonal());
  for (int position = 0; position < layer.n - 1; ++position) {
    const int l = layer.bond_order[position];
    m = embed_two_qubit(total, layer.bond_gates[l], offset + l,
                        offset + l + 1) *
        m;
  }
  return m;
}

inline double max_abs_diff(const StateVector& a, const StateVector& b) {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a.amplitude(i) - b.amplitude(i));
    if (d > worst) worst = d;
  }
  return worst;
}

inline double max_abs_diff(const Eigen::VectorXcd& a,
                           const Eigen::VectorXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace sfsim::testing
