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

#include <atomic>
#include <cstdint>
#include <utility>
#include <vector>

#include "sfsim/errors.hpp"
#include "sfsim/gates.hpp"

namespace sfsim {

/// Dense state vector of an n-qubit register.
///
/// Bit convention: basis index I encodes qubit q as bit q of I, so qubit 0
/// is the least significant bit. Every kernel, oracle and tensor-product
/// identity in this library assumes this layout.
///
/// Gates are applied in place over strided index pairs/quadruples; there is
/// no full 2^n x 2^n matrix product anywhere. Operators need not be unitary
/// (projectors and ladder operators shrink the norm, which is legal), so the
/// squared norm may be anywhere in [0, 1].
///
/// Instances are single-owner: operations mutate in place and must not be
/// called concurrently on the same object. The static amplitude counters are
/// atomic and account for every live instance process-wide, which is how the
/// engine's memory ceiling is audited in tests.
class StateVector {
 public:
  /// Basis state |basis_index> on num_qubits qubits.
  static StateVector product_state(int num_qubits, std::uint64_t basis_index) {
    if (num_qubits < 1 || num_qubits > 63) {
      throw ArgumentError("num_qubits must be in [1, 63]");
    }
    if (basis_index >= (std::uint64_t{1} << num_qubits)) {
      throw ArgumentError("basis_index out of range");
    }
    StateVector state(num_qubits);
    state.amplitudes_[basis_index] = Complex(1.0, 0.0);
    return state;
  }

  StateVector(const StateVector& other)
      : num_qubits_(other.num_qubits_), amplitudes_(other.amplitudes_) {
    account_alloc(amplitudes_.size());
  }

  StateVector(StateVector&& other) noexcept
      : num_qubits_(other.num_qubits_),
        amplitudes_(std::move(other.amplitudes_)) {
    other.amplitudes_.clear();
    other.amplitudes_.shrink_to_fit();
  }

  StateVector& operator=(const StateVector& other) {
    if (this != &other) {
      account_free(amplitudes_.size());
      num_qubits_ = other.num_qubits_;
      amplitudes_ = other.amplitudes_;
      account_alloc(amplitudes_.size());
    }
    return *this;
  }

  StateVector& operator=(StateVector&& other) noexcept {
    if (this != &other) {
      account_free(amplitudes_.size());
      num_qubits_ = other.num_qubits_;
      amplitudes_ = std::move(other.amplitudes_);
      other.amplitudes_.clear();
      other.amplitudes_.shrink_to_fit();
    }
    return *this;
  }

  ~StateVector() { account_free(amplitudes_.size()); }

  int num_qubits() const { return num_qubits_; }
  std::uint64_t size() const { return amplitudes_.size(); }

  Complex amplitude(std::uint64_t idx) const {
    if (idx >= amplitudes_.size()) {
      throw ArgumentError("amplitude index out of range");
    }
    return amplitudes_[idx];
  }

  double norm_squared() const {
    double total = 0.0;
    for (const Complex& a : amplitudes_) {
      total += a.real() * a.real() + a.imag() * a.imag();
    }
    return total;
  }

  Complex* data() { return amplitudes_.data(); }
  const Complex* data() const { return amplitudes_.data(); }

  /// In-place action of a 2x2 operator on qubit q.
  void apply_one_qubit(const OperatorOneQubit& op, int q) {
    if (q < 0 || q >= num_qubits_) {
      throw ArgumentError("one-qubit gate site out of range");
    }
    const double m00r = op(0, 0).real(), m00i = op(0, 0).imag();
    const double m01r = op(0, 1).real(), m01i = op(0, 1).imag();
    const double m10r = op(1, 0).real(), m10i = op(1, 0).imag();
    const double m11r = op(1, 1).real(), m11i = op(1, 1).imag();

    Complex* amps = amplitudes_.data();
    const std::uint64_t mask = std::uint64_t{1} << q;
    const std::uint64_t low = mask - 1;
    const std::uint64_t half = amplitudes_.size() >> 1;
    for (std::uint64_t h = 0; h < half; ++h) {
      const std::uint64_t i0 = ((h & ~low) << 1) | (h & low);
      const std::uint64_t i1 = i0 | mask;
      const double v0r = amps[i0].real(), v0i = amps[i0].imag();
      const double v1r = amps[i1].real(), v1i = amps[i1].imag();
      amps[i0] = Complex(m00r * v0r - m00i * v0i + m01r * v1r - m01i * v1i,
                         m00r * v0i + m00i * v0r + m01r * v1i + m01i * v1r);
      amps[i1] = Complex(m10r * v0r - m10i * v0i + m11r * v1r - m11i * v1i,
                         m10r * v0i + m10i * v0r + m11r * v1i + m11i * v1r);
    }
  }

  /// In-place action of a 4x4 operator on the ordered pair (qa, qb), where
  /// qa selects the first tensor factor (high bit of the matrix index). The
  /// pair may be non-adjacent and in either order.
  void apply_two_qubit(const OperatorTwoQubit& op, int qa, int qb) {
    if (qa < 0 || qa >= num_qubits_ || qb < 0 || qb >= num_qubits_) {
      throw ArgumentError("two-qubit gate site out of range");
    }
    if (qa == qb) {
      throw ArgumentError("two-qubit gate needs distinct sites");
    }
    double mr[4][4];
    double mi[4][4];
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        mr[r][c] = op(r, c).real();
        mi[r][c] = op(r, c).imag();
      }
    }

    const std::uint64_t ma = std::uint64_t{1} << qa;
    const std::uint64_t mb = std::uint64_t{1} << qb;
    const int qmin = qa < qb ? qa : qb;
    const int qmax = qa < qb ? qb : qa;
    // Masks over the compact counter h: bits [0,qmin) keep their place,
    // bits [qmin,qmax-1) shift up by one, the rest shift up by two, leaving
    // bits qmin and qmax of the expanded index clear.
    const std::uint64_t lo = (std::uint64_t{1} << qmin) - 1;
    const std::uint64_t mid = ((std::uint64_t{1} << (qmax - 1)) - 1) & ~lo;
    const std::uint64_t hi = ~(lo | mid);

    Complex* amps = amplitudes_.data();
    const std::uint64_t quarter = amplitudes_.size() >> 2;
    for (std::uint64_t h = 0; h < quarter; ++h) {
      const std::uint64_t i00 =
          ((h & hi) << 2) | ((h & mid) << 1) | (h & lo);
      // Matrix index s = 2 * (bit qa) + (bit qb).
      const std::uint64_t idx[4] = {i00, i00 | mb, i00 | ma, i00 | ma | mb};
      double vr[4], vi[4];
      for (int s = 0; s < 4; ++s) {
        vr[s] = amps[idx[s]].real();
        vi[s] = amps[idx[s]].imag();
      }
      for (int s = 0; s < 4; ++s) {
        double outr = 0.0, outi = 0.0;
        for (int t = 0; t < 4; ++t) {
          outr += mr[s][t] * vr[t] - mi[s][t] * vi[t];
          outi += mr[s][t] * vi[t] + mi[s][t] * vr[t];
        }
        amps[idx[s]] = Complex(outr, outi);
      }
    }
  }

  /// Number of complex amplitudes currently alive across all instances.
  static std::uint64_t live_amplitude_count() {
    return live_amplitudes().load(std::memory_order_relaxed);
  }

  /// High-water mark of live_amplitude_count since the last reset.
  static std::uint64_t peak_amplitude_count() {
    return peak_amplitudes().load(std::memory_order_relaxed);
  }

  /// Restarts the high-water mark at the current live count.
  static void reset_peak_amplitude_count() {
    peak_amplitudes().store(live_amplitudes().load(std::memory_order_relaxed),
                            std::memory_order_relaxed);
  }

 private:
  explicit StateVector(int num_qubits)
      : num_qubits_(num_qubits),
        amplitudes_(std::uint64_t{1} << num_qubits, Complex(0.0, 0.0)) {
    account_alloc(amplitudes_.size());
  }

  static std::atomic<std::uint64_t>& live_amplitudes() {
    static std::atomic<std::uint64_t> count{0};
    return count;
  }

  static std::atomic<std::uint64_t>& peak_amplitudes() {
    static std::atomic<std::uint64_t> peak{0};
    return peak;
  }

  static void account_alloc(std::uint64_t n) {
    const std::uint64_t live =
        live_amplitudes().fetch_add(n, std::memory_order_relaxed) + n;
    std::uint64_t peak = peak_amplitudes().load(std::memory_order_relaxed);
    while (live > peak &&
           !peak_amplitudes().compare_exchange_weak(
               peak, live, std::memory_order_relaxed)) {
    }
  }

  static void account_free(std::uint64_t n) {
    live_amplitudes().fetch_sub(n, std::memory_order_relaxed);
  }

  int num_qubits_;
  std::vector<Complex> amplitudes_;
};

/// <a|b> with conjugation on a.
inline Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw ArgumentError("inner_product needs equal register sizes");
  }
  const Complex* pa = a.data();
  const Complex* pb = b.data();
  const std::uint64_t n = a.size();
  double acc_r = 0.0, acc_i = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double ar = pa[i].real(), ai = pa[i].imag();
    const double br = pb[i].real(), bi = pb[i].imag();
    acc_r += ar * br + ai * bi;
    acc_i += ar * bi - ai * br;
  }
  return Complex(acc_r, acc_i);
}

}  // namespace sfsim
