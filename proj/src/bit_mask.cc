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

#include "demest/bit_mask.h"

#include <bit>
#include <stdexcept>

namespace demest {

EventMask::EventMask(uint32_t num_bits) : num_bits_(num_bits) {
    if (num_bits > kMaxBits) {
        throw std::invalid_argument(
            "mask width " + std::to_string(num_bits) + " exceeds maximum " + std::to_string(kMaxBits));
    }
}

EventMask EventMask::from_string(std::string_view bits) {
    EventMask result((uint32_t)bits.size());
    for (uint32_t i = 0; i < bits.size(); i++) {
        if (bits[i] == '1') {
            result.words_[i >> 6] |= uint64_t{1} << (i & 63);
        } else if (bits[i] != '0') {
            throw std::invalid_argument("mask string must contain only '0' and '1', got '" + std::string(bits) + "'");
        }
    }
    return result;
}

EventMask EventMask::from_indices(uint32_t num_bits, std::span<const uint32_t> indices) {
    EventMask result(num_bits);
    for (uint32_t i : indices) {
        result.set_bit(i, true);
    }
    return result;
}

EventMask EventMask::from_integer(uint32_t num_bits, uint64_t value) {
    if (num_bits > 64) {
        throw std::invalid_argument("from_integer requires at most 64 bits");
    }
    if (num_bits < 64 && (value >> num_bits) != 0) {
        throw std::invalid_argument("integer " + std::to_string(value) + " does not fit in " + std::to_string(num_bits) + " bits");
    }
    EventMask result(num_bits);
    result.words_[0] = value;
    return result;
}

bool EventMask::bit(uint32_t index) const {
    if (index >= num_bits_) {
        throw std::out_of_range("bit index " + std::to_string(index) + " out of range for " + std::to_string(num_bits_) + "-bit mask");
    }
    return (words_[index >> 6] >> (index & 63)) & 1;
}

void EventMask::set_bit(uint32_t index, bool value) {
    if (index >= num_bits_) {
        throw std::out_of_range("bit index " + std::to_string(index) + " out of range for " + std::to_string(num_bits_) + "-bit mask");
    }
    uint64_t bit = uint64_t{1} << (index & 63);
    if (value) {
        words_[index >> 6] |= bit;
    } else {
        words_[index >> 6] &= ~bit;
    }
}

bool EventMask::is_zero() const {
    for (uint32_t w = 0; w < num_words(); w++) {
        if (words_[w]) {
            return false;
        }
    }
    return true;
}

uint32_t EventMask::weight() const {
    uint32_t total = 0;
    for (uint32_t w = 0; w < num_words(); w++) {
        total += std::popcount(words_[w]);
    }
    return total;
}

uint64_t EventMask::to_integer() const {
    if (num_bits_ > 64) {
        throw std::invalid_argument("to_integer requires at most 64 bits");
    }
    return words_[0];
}

std::vector<uint32_t> EventMask::indices() const {
    std::vector<uint32_t> result;
    for (uint32_t w = 0; w < num_words(); w++) {
        uint64_t word = words_[w];
        while (word) {
            result.push_back((w << 6) + std::countr_zero(word));
            word &= word - 1;
        }
    }
    return result;
}

std::string EventMask::str() const {
    std::string result(num_bits_, '0');
    for (uint32_t i = 0; i < num_bits_; i++) {
        if ((words_[i >> 6] >> (i & 63)) & 1) {
            result[i] = '1';
        }
    }
    return result;
}

EventMask &EventMask::operator^=(const EventMask &other) {
    if (other.num_bits_ != num_bits_) {
        throw std::invalid_argument("mask width mismatch in xor");
    }
    for (uint32_t w = 0; w < num_words(); w++) {
        words_[w] ^= other.words_[w];
    }
    return *this;
}

EventMask EventMask::operator^(const EventMask &other) const {
    EventMask result = *this;
    result ^= other;
    return result;
}

bool EventMask::operator<(const EventMask &other) const {
    if (num_bits_ != other.num_bits_) {
        return num_bits_ < other.num_bits_;
    }
    for (uint32_t w = 0; w < num_words(); w++) {
        uint64_t diff = words_[w] ^ other.words_[w];
        if (diff) {
            // The lowest differing detector decides; unset sorts first.
            return ((words_[w] >> std::countr_zero(diff)) & 1) == 0;
        }
    }
    return false;
}

bool mask_dot(const EventMask &a, const EventMask &b) {
    if (a.num_bits() != b.num_bits()) {
        throw std::invalid_argument("mask width mismatch in mask_dot");
    }
    uint64_t acc = 0;
    for (uint32_t w = 0; w < a.num_words(); w++) {
        acc ^= a.words()[w] & b.words()[w];
    }
    return std::popcount(acc) & 1;
}

size_t EventMaskHash::operator()(const EventMask &mask) const {
    // splitmix64-style combine over the used words.
    uint64_t h = mask.num_bits();
    for (uint32_t w = 0; w < mask.num_words(); w++) {
        uint64_t x = mask.words()[w] + 0x9e3779b97f4a7c15ull + h;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        h = x ^ (x >> 31);
    }
    return (size_t)h;
}

}  // namespace demest
