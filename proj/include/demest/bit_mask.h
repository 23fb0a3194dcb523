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

#ifndef DEMEST_BIT_MASK_H
#define DEMEST_BIT_MASK_H

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace demest {

/// A fixed-width bit string over detectors 0..num_bits-1, packed into 64-bit
/// words. Bit i lives in word i/64 at position i%64. Used both for error
/// event supports and for detection parities; all set-membership arithmetic
/// is XOR and popcount on the packed words.
///
/// The string rendering puts detector 0 leftmost, so "[01]" means detector 1
/// is flipped. Ordering between equal-width masks is dictionary order on that
/// rendering (the mask whose lowest differing detector is unset sorts first).
class EventMask {
   public:
    static constexpr uint32_t kMaxBits = 1024;
    static constexpr uint32_t kMaxWords = kMaxBits / 64;

    /// Zero-width mask; usable only as a placeholder.
    EventMask() = default;
    /// All-zero mask over `num_bits` detectors.
    explicit EventMask(uint32_t num_bits);

    /// Parses "0110"-style strings, detector 0 first.
    static EventMask from_string(std::string_view bits);
    static EventMask from_indices(uint32_t num_bits, std::span<const uint32_t> indices);
    /// Interprets bit i of `value` as detector i. Requires num_bits <= 64.
    static EventMask from_integer(uint32_t num_bits, uint64_t value);

    uint32_t num_bits() const {
        return num_bits_;
    }
    uint32_t num_words() const {
        return (num_bits_ + 63) >> 6;
    }
    bool bit(uint32_t index) const;
    void set_bit(uint32_t index, bool value);
    bool is_zero() const;
    /// Number of set bits.
    uint32_t weight() const;
    /// Inverse of from_integer. Requires num_bits <= 64.
    uint64_t to_integer() const;
    /// Positions of set bits, ascending.
    std::vector<uint32_t> indices() const;
    std::string str() const;

    const uint64_t *words() const {
        return words_.data();
    }
    uint64_t *words() {
        return words_.data();
    }

    EventMask &operator^=(const EventMask &other);
    EventMask operator^(const EventMask &other) const;
    bool operator==(const EventMask &other) const = default;
    bool operator!=(const EventMask &other) const = default;
    bool operator<(const EventMask &other) const;

   private:
    uint32_t num_bits_ = 0;
    std::array<uint64_t, kMaxWords> words_{};
};

/// Parity of the overlap |a AND b|; the symplectic-style pairing that decides
/// whether error event b flips detection parity a.
bool mask_dot(const EventMask &a, const EventMask &b);

struct EventMaskHash {
    size_t operator()(const EventMask &mask) const;
};

}  // namespace demest

#endif
