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
#include <vector>

#include "sfsim/errors.hpp"
#include "sfsim/gates.hpp"

namespace sfsim {

/// One term of a product decomposition of a two-qubit gate. `left` acts on
/// the first tensor factor (the subsystem-1 qubit of a connecting gate),
/// `right` on the second. Neither factor needs to be unitary.
struct BranchTerm {
  OperatorOneQubit left;
  OperatorOneQubit right;
};

/// A two-qubit gate written as a sum of at most four one-qubit products:
///
///   G = P0 (x) A00  +  P1 (x) A11  +  |0><1| (x) A01  +  |1><0| (x) A10
///
/// where A_ij is the 2x2 block of G coupling first-factor states |i><j|.
/// Terms whose A block is exactly zero are dropped, so r = 2 for CZ-like
/// block-diagonal gates and r = 4 generically. The sum of the kept terms
/// reproduces G exactly (block bookkeeping, no arithmetic).
class BranchSet {
 public:
  static BranchSet decompose(const OperatorTwoQubit& gate) {
    BranchSet set;
    // Left factors in the fixed order P0, P1, |0><1|, |1><0|; the paired
    // right factor is the corresponding block of the gate.
    const std::pair<int, int> block_of_left[4] = {
        {0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const OperatorOneQubit lefts[4] = {projector_zero(), projector_one(),
                                       ket0_bra1(), ket1_bra0()};
    for (int term = 0; term < 4; ++term) {
      const auto [bi, bj] = block_of_left[term];
      const OperatorOneQubit block = gate.block<2, 2>(2 * bi, 2 * bj);
      if (block.cwiseAbs().maxCoeff() == 0.0) continue;
      set.terms_.push_back({lefts[term], block});
    }
    return set;
  }

  /// Single identity term: the branch set of dynamics with no connecting
  /// gate. Exactly one trajectory, and applying the term is a no-op up to
  /// floating-point identity multiplication.
  static BranchSet disconnected() {
    BranchSet set;
    set.terms_.push_back({identity_one_qubit(), identity_one_qubit()});
    return set;
  }

  int branch_count() const { return static_cast<int>(terms_.size()); }
  const BranchTerm& term(int s) const { return terms_.at(s); }
  const std::vector<BranchTerm>& terms() const { return terms_; }

  /// Sum of left (x) right over all terms; equals the decomposed gate.
  OperatorTwoQubit reconstruct() const {
    OperatorTwoQubit sum = OperatorTwoQubit::Zero();
    for (const BranchTerm& term : terms_) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          sum.block<2, 2>(2 * a, 2 * b) += term.left(a, b) * term.right;
        }
      }
    }
    return sum;
  }

 private:
  std::vector<BranchTerm> terms_;
};

/// r^T with an overflow refusal. Anything beyond 2^63 cannot be enumerated
/// anyway, so the computation errors out instead of wrapping.
inline std::uint64_t trajectory_count(int branch_count, int num_steps) {
  if (branch_count < 1 || num_steps < 0) {
    throw ArgumentError("trajectory_count needs r >= 1 and T >= 0");
  }
  const std::uint64_t limit = std::uint64_t{1} << 63;
  std::uint64_t count = 1;
  for (int t = 0; t < num_steps; ++t) {
    if (count > limit / static_cast<std::uint64_t>(branch_count)) {
      throw ResourceError("trajectory count r^T exceeds 2^63");
    }
    count *= static_cast<std::uint64_t>(branch_count);
  }
  return count;
}

/// Identifies one path through the branch tree: a base-r integer whose most
/// significant digit is the branch chosen at step 1. With this encoding the
/// trajectories sharing a step-t prefix form one contiguous index range,
/// and the canonical representative of a prefix (all later digits zero) is
/// the smallest index in its range.
class TrajectoryId {
 public:
  TrajectoryId(std::uint64_t index, int branch_count, int num_steps)
      : index_(index), branch_count_(branch_count), num_steps_(num_steps) {
    if (index >= trajectory_count(branch_count, num_steps)) {
      throw ArgumentError("trajectory index out of range");
    }
  }

  /// digits[0] is the step-1 digit (most significant).
  static TrajectoryId from_digits(const std::vector<int>& digits,
                                  int branch_count) {
    std::uint64_t index = 0;
    for (int digit : digits) {
      if (digit < 0 || digit >= branch_count) {
        throw ArgumentError("trajectory digit out of range");
      }
      index = index * static_cast<std::uint64_t>(branch_count) +
              static_cast<std::uint64_t>(digit);
    }
    return TrajectoryId(index, branch_count,
                        static_cast<int>(digits.size()));
  }

  std::uint64_t index() const { return index_; }
  int branch_count() const { return branch_count_; }
  int num_steps() const { return num_steps_; }

  /// Branch chosen at step t, t in [1, num_steps].
  int digit(int step) const {
    if (step < 1 || step > num_steps_) {
      throw ArgumentError("trajectory step out of range");
    }
    std::uint64_t rest = index_;
    for (int s = num_steps_; s > step; --s) {
      rest /= static_cast<std::uint64_t>(branch_count_);
    }
    return static_cast<int>(rest % static_cast<std::uint64_t>(branch_count_));
  }

  std::vector<int> digits() const {
    std::vector<int> out(num_steps_);
    std::uint64_t rest = index_;
    for (int s = num_steps_; s >= 1; --s) {
      out[s - 1] =
          static_cast<int>(rest % static_cast<std::uint64_t>(branch_count_));
      rest /= static_cast<std::uint64_t>(branch_count_);
    }
    return out;
  }

  /// True when every digit after step t is zero, i.e. this trajectory is
  /// the canonical owner of its step-t prefix contribution.
  bool is_canonical_at(int step) const {
    std::uint64_t stride = 1;
    for (int s = num_steps_; s > step; --s) {
      stride *= static_cast<std::uint64_t>(branch_count_);
    }
    return index_ % stride == 0;
  }

 private:
  std::uint64_t index_;
  int branch_count_;
  int num_steps_;
};

}  // namespace sfsim
