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

#include "demest/rng.h"

#include <cmath>
#include <stdexcept>

namespace demest {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4> &ctr, const std::array<uint32_t, 2> &key) {
    uint64_t p0 = (uint64_t)kPhiloxM0 * ctr[0];
    uint64_t p1 = (uint64_t)kPhiloxM1 * ctr[2];
    uint32_t hi0 = (uint32_t)(p0 >> 32), lo0 = (uint32_t)p0;
    uint32_t hi1 = (uint32_t)(p1 >> 32), lo1 = (uint32_t)p1;
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32_10(std::array<uint32_t, 4> counter, std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; round++) {
        philox_round(counter, key);
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return counter;
}

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    // splitmix64 finalizer applied to a golden-ratio combination.
    uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ull + 0xd1b54a32d192ed03ull);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

RngStream::RngStream(uint64_t seed, uint64_t stream_id)
    : key_{(uint32_t)seed, (uint32_t)(seed >> 32)}, stream_{(uint32_t)stream_id, (uint32_t)(stream_id >> 32)} {
}

void RngStream::refill() {
    block_ = philox4x32_10({(uint32_t)counter_, (uint32_t)(counter_ >> 32), stream_[0], stream_[1]}, key_);
    counter_++;
    block_pos_ = 0;
}

RngStream::result_type RngStream::operator()() {
    if (block_pos_ >= 3) {
        // Don't split a u64 across blocks; drop a trailing odd lane.
        refill();
    }
    uint64_t lo = block_[block_pos_];
    uint64_t hi = block_[block_pos_ + 1];
    block_pos_ += 2;
    return lo | (hi << 32);
}

double RngStream::uniform_double() {
    return (double)((*this)() >> 11) * 0x1.0p-53;
}

bool RngStream::bernoulli(double probability) {
    return uniform_double() < probability;
}

uint64_t RngStream::geometric(double probability) {
    if (!(probability > 0.0) || probability > 1.0) {
        throw std::invalid_argument("geometric requires probability in (0, 1]");
    }
    if (probability == 1.0) {
        return 0;
    }
    double u = uniform_double();
    double skips = std::floor(std::log1p(-u) / std::log1p(-probability));
    if (skips >= 9e18) {
        return (uint64_t)9e18;
    }
    return (uint64_t)skips;
}

}  // namespace demest
