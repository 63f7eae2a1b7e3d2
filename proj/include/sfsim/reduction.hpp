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

/// Deterministic pairwise summation over a fixed-position leaf space.
///
/// Conceptually the sum is a perfect binary tree over 2^ceil(log2(N))
/// leaves; leaf i holds the i-th addend and every unoccupied leaf holds
/// +0.0. Because floating-point addition is not associative, the tree shape
/// (not the arrival order) defines the result: any process that adds the
/// same (position, value) pairs in ascending position order gets the exact
/// same bits, no matter how the position space was partitioned across
/// workers.
///
/// The implementation keeps a binary-counter stack of subtree roots (levels
/// strictly decreasing from bottom to top) and merges equal-level neighbors
/// eagerly, so memory is O(log N). Runs of absent leaves are folded in as
/// aligned all-zero subtrees, whose roots are +0.0 exactly, bit-identical
/// to adding each zero leaf individually.
class PairwiseForest {
 public:
  /// Adds the leaf at `position` (strictly ascending across calls); the gap
  /// since the previous leaf is zero-filled.
  void add_leaf(std::uint64_t position, Complex value) {
    if (position < next_) {
      throw ArgumentError("forest leaves must be added in ascending order");
    }
    fill_zeros(position);
    push_merge(0, value);
    ++next_;
  }

  /// Leaf positions consumed so far (next accepted position).
  std::uint64_t next_position() const { return next_; }

  /// Total over a leaf space of `leaf_space` positions (>= next_position());
  /// the space is padded with zero leaves up to the next power of two and
  /// folded to a single root.
  Complex root(std::uint64_t leaf_space) const {
    if (leaf_space < next_ || leaf_space == 0) {
      throw ArgumentError("leaf space smaller than the leaves already added");
    }
    std::uint64_t padded = 1;
    while (padded < leaf_space) padded <<= 1;
    PairwiseForest folded = *this;
    folded.fill_zeros(padded);
    if (folded.nodes_.size() != 1) {
      throw IntegrityError("pairwise fold did not reduce to a single root");
    }
    return folded.nodes_.front().value;
  }

 private:
  struct Node {
    int level;
    Complex value;
  };

  void push_merge(int level, Complex value) {
    while (!nodes_.empty() && nodes_.back().level == level) {
      value = nodes_.back().value + value;  // older sibling on the left
      ++level;
      nodes_.pop_back();
    }
    nodes_.push_back({level, value});
  }

  void fill_zeros(std::uint64_t target) {
    while (next_ < target) {
      // Largest aligned zero block that fits in the gap.
      int level = 0;
      while ((next_ & ((std::uint64_t{1} << (level + 1)) - 1)) == 0 &&
             next_ + (std::uint64_t{1} << (level + 1)) <= target) {
        ++level;
      }
      push_merge(level, Complex(0.0, 0.0));
      next_ += std::uint64_t{1} << level;
    }
  }

  std::vector<Node> nodes_;
  std::uint64_t next_ = 0;
};

}  // namespace sfsim
