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
#include <bit>
#include <cstdint>
#include <cstring>

#include "sfsim/errors.hpp"
#include "sfsim/gates.hpp"

namespace sfsim {

/// One per-trajectory contribution, the cross-process wire unit: worker
/// processes emit these, the coordinator reduces them. Fixed-width
/// little-endian encoding, 34 bytes per record:
///   bytes  0..7   realization_id   (u64)
///   bytes  8..15  trajectory_index (u64)
///   bytes 16..17  t                (u16)
///   bytes 18..25  real part        (f64, IEEE-754 bits)
///   bytes 26..33  imaginary part   (f64, IEEE-754 bits)
struct ContributionRecord {
  std::uint64_t realization_id = 0;
  std::uint64_t trajectory_index = 0;
  std::uint16_t t = 0;
  double real = 0.0;
  double imag = 0.0;

  friend bool operator==(const ContributionRecord&,
                         const ContributionRecord&) = default;
};

inline constexpr std::size_t kContributionRecordSize = 34;

namespace detail {

inline void store_le64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out[i] = static_cast<std::uint8_t>(v >> (8 * i));
  }
}

inline std::uint64_t load_le64(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  }
  return v;
}

}  // namespace detail

inline std::array<std::uint8_t, kContributionRecordSize> encode_record(
    const ContributionRecord& record) {
  std::array<std::uint8_t, kContributionRecordSize> out{};
  detail::store_le64(out.data(), record.realization_id);
  detail::store_le64(out.data() + 8, record.trajectory_index);
  out[16] = static_cast<std::uint8_t>(record.t);
  out[17] = static_cast<std::uint8_t>(record.t >> 8);
  detail::store_le64(out.data() + 18, std::bit_cast<std::uint64_t>(record.real));
  detail::store_le64(out.data() + 26, std::bit_cast<std::uint64_t>(record.imag));
  return out;
}

inline ContributionRecord decode_record(const std::uint8_t* bytes) {
  ContributionRecord record;
  record.realization_id = detail::load_le64(bytes);
  record.trajectory_index = detail::load_le64(bytes + 8);
  record.t = static_cast<std::uint16_t>(
      static_cast<std::uint16_t>(bytes[16]) |
      (static_cast<std::uint16_t>(bytes[17]) << 8));
  record.real = std::bit_cast<double>(detail::load_le64(bytes + 18));
  record.imag = std::bit_cast<double>(detail::load_le64(bytes + 26));
  return record;
}

inline Complex record_value(const ContributionRecord& record) {
  return Complex(record.real, record.imag);
}

}  // namespace sfsim
