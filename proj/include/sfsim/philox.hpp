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

#include <array>
#include <cmath>
#include <cstdint>

namespace sfsim {

/// Philox4x32-10 counter-based block cipher (Salmon et al., "Parallel random
/// numbers: as easy as 1, 2, 3"). Every 128-bit output block is a pure
/// function of (counter, key), which is what makes substreams trivially
/// parallel and bit-exact across machines. Verified against the published
/// known-answer vectors in the test suite.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMultiplier0 = 0xD2511F53u;
  static constexpr std::uint32_t kMultiplier1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeylStep0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeylStep1 = 0xBB67AE85u;
  static constexpr int kRounds = 10;

  static Counter generate(Counter counter, Key key) {
    for (int round = 0; round < kRounds; ++round) {
      if (round > 0) {
        key[0] += kWeylStep0;
        key[1] += kWeylStep1;
      }
      const std::uint64_t product0 =
          static_cast<std::uint64_t>(kMultiplier0) * counter[0];
      const std::uint64_t product1 =
          static_cast<std::uint64_t>(kMultiplier1) * counter[2];
      const auto hi0 = static_cast<std::uint32_t>(product0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(product0);
      const auto hi1 = static_cast<std::uint32_t>(product1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(product1);
      counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1],
                 lo0};
    }
    return counter;
  }
};

/// Purpose tag baked into the counter so that the draws for one part of a
/// realization can never alias the draws for another.
enum class StreamPurpose : std::uint32_t {
  kLayer1 = 1,
  kLayer2 = 2,
  kSchedule = 3,
  kInitialState = 4,
  kTrajectorySample = 5,
};

/// One deterministic substream of the master seed. The Philox key holds the
/// 64-bit master seed; the counter is laid out as
/// [block_lo, block_hi, purpose, realization_index], so substreams for
/// different purposes or realizations are disjoint by construction and may
/// be consumed in any order across workers.
///
/// All derived distributions (53-bit uniform doubles, Box-Muller normals,
/// rejection-sampled bounded integers) are implemented here rather than via
/// std::<distribution> types, whose output is implementation-defined.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, StreamPurpose purpose,
               std::uint32_t realization_index = 0)
      : key_{static_cast<std::uint32_t>(master_seed),
             static_cast<std::uint32_t>(master_seed >> 32)},
        purpose_(static_cast<std::uint32_t>(purpose)),
        realization_(realization_index) {}

  std::uint32_t next_u32() {
    if (buffer_pos_ == 4) refill();
    return buffer_[buffer_pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double gaussian() {
    if (has_cached_gaussian_) {
      has_cached_gaussian_ = false;
      return cached_gaussian_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    cached_gaussian_ = radius * std::sin(angle);
    has_cached_gaussian_ = true;
    return radius * std::cos(angle);
  }

  /// Unbiased uniform integer in [0, n) by rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t draw = next_u64();
      if (draw >= threshold) return draw % n;
    }
  }

  static constexpr const char* algorithm_name() { return "philox4x32-10"; }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  void refill() {
    buffer_ = Philox4x32::generate(
        {static_cast<std::uint32_t>(block_),
         static_cast<std::uint32_t>(block_ >> 32), purpose_, realization_},
        key_);
    ++block_;
    buffer_pos_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t purpose_;
  std::uint32_t realization_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace sfsim
