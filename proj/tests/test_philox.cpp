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

#include "sfsim/philox.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

namespace sfsim {
namespace {

using Counter = Philox4x32::Counter;
using Key = Philox4x32::Key;

// Known-answer vectors published with the reference Random123 implementation.
TEST(Philox4x32, KnownAnswerZeros) {
  const Counter out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox4x32, KnownAnswerAllOnes) {
  const Counter out = Philox4x32::generate(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
      {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox4x32, KnownAnswerPiDigits) {
  const Counter out = Philox4x32::generate(
      {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
      {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

// The stream must consume blocks in counter order with the documented layout:
// counter = [block_lo, block_hi, purpose, realization], key = seed.
TEST(RandomStream, MatchesRawBlockLayout) {
  const std::uint64_t seed = 0x0123456789abcdefull;
  RandomStream stream(seed, StreamPurpose::kLayer2, 7);

  const Key key = {static_cast<std::uint32_t>(seed),
                   static_cast<std::uint32_t>(seed >> 32)};
  const Counter block0 = Philox4x32::generate({0, 0, 2, 7}, key);
  const Counter block1 = Philox4x32::generate({1, 0, 2, 7}, key);

  for (std::uint32_t word : block0) EXPECT_EQ(stream.next_u32(), word);
  for (std::uint32_t word : block1) EXPECT_EQ(stream.next_u32(), word);
}

TEST(RandomStream, DeterministicPerSeed) {
  RandomStream a(42, StreamPurpose::kLayer1, 3);
  RandomStream b(42, StreamPurpose::kLayer1, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, PurposeAndRealizationGiveDistinctStreams) {
  RandomStream base(42, StreamPurpose::kLayer1, 0);
  RandomStream other_purpose(42, StreamPurpose::kLayer2, 0);
  RandomStream other_realization(42, StreamPurpose::kLayer1, 1);
  RandomStream other_seed(43, StreamPurpose::kLayer1, 0);

  std::vector<std::uint64_t> reference(16);
  for (auto& word : reference) word = base.next_u64();

  auto differs = [&reference](RandomStream& stream) {
    for (std::uint64_t expected : reference) {
      if (stream.next_u64() != expected) return true;
    }
    return false;
  };
  EXPECT_TRUE(differs(other_purpose));
  EXPECT_TRUE(differs(other_realization));
  EXPECT_TRUE(differs(other_seed));
}

TEST(RandomStream, Uniform01Range) {
  RandomStream stream(7, StreamPurpose::kSchedule);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = stream.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.01);
}

TEST(RandomStream, GaussianMoments) {
  RandomStream stream(1234, StreamPurpose::kLayer1);
  const int n = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = stream.gaussian();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double variance = sum_sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(variance, 1.0, 0.03);
}

TEST(RandomStream, UniformBelowBoundsAndCoverage) {
  RandomStream stream(99, StreamPurpose::kInitialState);
  std::set<std::uint64_t> seen;
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t v = stream.uniform_below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
    ++counts[static_cast<int>(v)];
  }
  EXPECT_EQ(seen.size(), 7u);
  for (int count : counts) {
    EXPECT_NEAR(static_cast<double>(count) / n, 1.0 / 7.0, 0.01);
  }
}

TEST(RandomStream, UniformBelowOneIsAlwaysZero) {
  RandomStream stream(5, StreamPurpose::kSchedule);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(stream.uniform_below(1), 0u);
}

TEST(RandomStream, AlgorithmNameIsRecordedIdentifier) {
  EXPECT_STREQ(RandomStream::algorithm_name(), "philox4x32-10");
}

}  // namespace
}  // namespace sfsim
