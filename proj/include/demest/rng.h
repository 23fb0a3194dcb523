// Copyright 2026 Demest Contributors
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

#ifndef DEMEST_RNG_H
#define DEMEST_RNG_H

#include <array>
#include <cstdint>

namespace demest {

/// One invocation of the Philox4x32-10 block cipher (Salmon et al.,
/// "Parallel random numbers: as easy as 1, 2, 3", SC'11). Exposed so tests
/// can check the published vectors.
std::array<uint32_t, 4> philox4x32_10(std::array<uint32_t, 4> counter, std::array<uint32_t, 2> key);

/// Deterministically derives an independent sub-seed from (seed, salt).
/// Work items (shots, draws, resamples) each get their own stream keyed this
/// way, so results never depend on scheduling or thread count.
uint64_t mix_seed(uint64_t seed, uint64_t salt);

/// A counter-based random stream: the sequence is a pure function of
/// (seed, stream_id), with no shared state between streams. Satisfies
/// std::uniform_random_bit_generator.
class RngStream {
   public:
    using result_type = uint64_t;

    RngStream(uint64_t seed, uint64_t stream_id);

    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return ~result_type{0};
    }
    result_type operator()();

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform_double();
    bool bernoulli(double probability);
    /// Number of failures before the first success in Bernoulli(p) trials.
    /// Requires p in (0, 1].
    uint64_t geometric(double probability);

   private:
    void refill();

    std::array<uint32_t, 2> key_;
    std::array<uint32_t, 2> stream_;
    uint64_t counter_ = 0;
    std::array<uint32_t, 4> block_{};
    uint32_t block_pos_ = 4;
};

}  // namespace demest

#endif
