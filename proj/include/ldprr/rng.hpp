// Copyright 2026 The ldprr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPRR_RNG_HPP_
#define LDPRR_RNG_HPP_

#include <array>
#include <cstdint>
#include <limits>

namespace ldprr {

// Philox4x32-10 (Salmon et al., SC'11) used as a counter-based stream.
//
// A stream is keyed by (seed, stream_id); the i-th 64-bit draw is a pure
// function of (seed, stream_id, i). Trial t of an experiment uses
// stream_id = t, so results never depend on which worker ran the trial.
// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream_id)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream_id) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform in [0, 1) with 53 random bits.
  double Uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t draws() const { return draw_index_; }

  // Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> Block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  std::uint64_t draw_index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;  // 64-bit words left in buffer_
};

// Mixes a user seed with a sub-purpose tag so independent consumers of the
// same master seed get unrelated keys.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t tag);

}  // namespace ldprr

#endif  // LDPRR_RNG_HPP_
