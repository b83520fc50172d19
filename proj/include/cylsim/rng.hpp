// Copyright 2026 The cylsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based random streams.
//
// Philox4x64-10 (Salmon et al., SC 2011) maps a 256-bit counter and a 128-bit
// key to 256 random bits. A stream is identified by (seed, experiment,
// setting, repetition); the three indices occupy counter words 1..3 and the
// seed is the key, so any two streams draw from disjoint counter ranges and
// a stream's draws never depend on which thread runs it or when.

#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "cylsim/angles.hpp"

namespace cylsim {

using Philox4x64Counter = std::array<std::uint64_t, 4>;
using Philox4x64Key = std::array<std::uint64_t, 2>;

namespace detail {

inline constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
inline constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
inline constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

inline Philox4x64Counter philox_round(const Philox4x64Counter& c, const Philox4x64Key& k) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo64(kPhiloxM0, c[0], hi0, lo0);
    mulhilo64(kPhiloxM1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace detail

/// Philox4x64 with 10 rounds.
inline Philox4x64Counter philox4x64_10(Philox4x64Counter ctr, Philox4x64Key key) {
    ctr = detail::philox_round(ctr, key);
    for (int round = 1; round < 10; ++round) {
        key[0] += detail::kPhiloxW0;
        key[1] += detail::kPhiloxW1;
        ctr = detail::philox_round(ctr, key);
    }
    return ctr;
}

/// Identifies one independent stream under a seed.
struct StreamKey {
    std::uint64_t experiment = 0;
    std::uint64_t setting = 0;
    std::uint64_t repetition = 0;

    friend constexpr bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Experiment identifiers used as the top counter word.
namespace experiment_id {
inline constexpr std::uint64_t kBipartite = 1;
inline constexpr std::uint64_t kChsh = 2;
inline constexpr std::uint64_t kPbwz = 3;
inline constexpr std::uint64_t kGhz = 4;
inline constexpr std::uint64_t kSourceCheck = 5;
}  // namespace experiment_id

/// Deterministic random stream. Satisfies UniformRandomBitGenerator.
class RngStream {
   public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, StreamKey key) : key_{seed, 0}, stream_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64() {
        if (pos_ == 4) refill();
        return buffer_[pos_++];
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on [0, 2*pi).
    double uniform_angle() {
        const double t = kTwoPi * uniform01();
        return t < kTwoPi ? t : 0.0;
    }

    std::uint64_t seed() const { return key_[0]; }
    const StreamKey& key() const { return stream_; }
    /// Number of 256-bit blocks consumed so far.
    std::uint64_t blocks() const { return block_; }

   private:
    void refill() {
        buffer_ = philox4x64_10({block_, stream_.setting, stream_.repetition, stream_.experiment}, key_);
        ++block_;
        pos_ = 0;
    }

    Philox4x64Key key_;
    StreamKey stream_;
    std::uint64_t block_ = 0;
    Philox4x64Counter buffer_{};
    int pos_ = 4;
};

}  // namespace cylsim
