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

#include <algorithm>
#include <unordered_set>

#include <gtest/gtest.h>

namespace demest {
namespace {

TEST(EventMask, StringRoundTripPutsDetectorZeroLeftmost) {
    EventMask mask = EventMask::from_string("0110");
    EXPECT_EQ(mask.num_bits(), 4u);
    EXPECT_FALSE(mask.bit(0));
    EXPECT_TRUE(mask.bit(1));
    EXPECT_TRUE(mask.bit(2));
    EXPECT_FALSE(mask.bit(3));
    EXPECT_EQ(mask.str(), "0110");
    EXPECT_EQ(mask.weight(), 2u);
    EXPECT_FALSE(mask.is_zero());
    EXPECT_TRUE(EventMask::from_string("000").is_zero());
}

TEST(EventMask, FromStringRejectsOtherCharacters) {
    EXPECT_THROW(EventMask::from_string("01x"), std::invalid_argument);
    EXPECT_THROW(EventMask::from_string("0 1"), std::invalid_argument);
}

TEST(EventMask, FromIndices) {
    std::vector<uint32_t> indices{0, 3};
    EventMask mask = EventMask::from_indices(5, indices);
    EXPECT_EQ(mask.str(), "10010");
    EXPECT_EQ(mask.indices(), indices);
    EXPECT_EQ(EventMask(7).str(), "0000000");
}

TEST(EventMask, IntegerConversionUsesBitIForDetectorI) {
    EXPECT_EQ(EventMask::from_integer(4, 1).str(), "1000");
    EXPECT_EQ(EventMask::from_integer(4, 0b0110).str(), "0110");
    EXPECT_EQ(EventMask::from_integer(4, 8).str(), "0001");
    for (uint64_t v = 0; v < 16; v++) {
        EXPECT_EQ(EventMask::from_integer(4, v).to_integer(), v);
    }
    EXPECT_THROW(EventMask::from_integer(3, 8), std::invalid_argument);
    EXPECT_THROW(EventMask::from_integer(65, 0), std::invalid_argument);
    EXPECT_THROW(EventMask::from_string(std::string(70, '0')).to_integer(), std::invalid_argument);
}

TEST(EventMask, BitAccessChecksRange) {
    EventMask mask(3);
    EXPECT_THROW(mask.bit(3), std::out_of_range);
    EXPECT_THROW(mask.set_bit(3, true), std::out_of_range);
    mask.set_bit(2, true);
    EXPECT_EQ(mask.str(), "001");
    mask.set_bit(2, false);
    EXPECT_TRUE(mask.is_zero());
}

TEST(EventMask, XorIsBitwise) {
    EventMask a = EventMask::from_string("1100");
    EventMask b = EventMask::from_string("0110");
    EXPECT_EQ((a ^ b).str(), "1010");
    a ^= b;
    EXPECT_EQ(a.str(), "1010");
    EXPECT_THROW(a ^ EventMask(3), std::invalid_argument);
}

TEST(EventMask, WorksAcrossWordBoundaries) {
    EventMask mask(1024);
    mask.set_bit(0, true);
    mask.set_bit(63, true);
    mask.set_bit(64, true);
    mask.set_bit(1023, true);
    EXPECT_EQ(mask.weight(), 4u);
    EXPECT_EQ(mask.indices(), (std::vector<uint32_t>{0, 63, 64, 1023}));
    EventMask other(1024);
    other.set_bit(64, true);
    EXPECT_EQ((mask ^ other).weight(), 3u);
    EXPECT_THROW(EventMask(1025), std::invalid_argument);
}

TEST(EventMask, OrderingIsDictionaryOnTheRendering) {
    // The mask whose lowest differing detector is unset sorts first, which
    // is exactly lexicographic order on str().
    std::vector<std::string> bits{"0001", "0010", "0011", "0100", "1000", "1111", "0000"};
    std::vector<EventMask> masks;
    for (const auto &b : bits) {
        masks.push_back(EventMask::from_string(b));
    }
    std::sort(masks.begin(), masks.end());
    std::sort(bits.begin(), bits.end());
    for (size_t i = 0; i < bits.size(); i++) {
        EXPECT_EQ(masks[i].str(), bits[i]);
    }
    // Note this is NOT integer order: "01" is detector 1 (integer 2).
    EXPECT_TRUE(EventMask::from_string("01") < EventMask::from_string("10"));
    EXPECT_LT(EventMask::from_string("01").to_integer(), 3u);
    // Width breaks ties first.
    EXPECT_TRUE(EventMask::from_string("11") < EventMask::from_string("000"));
    EXPECT_FALSE(EventMask::from_string("01") < EventMask::from_string("01"));
}

TEST(EventMask, MaskDotIsOverlapParity) {
    EventMask a = EventMask::from_string("1100");
    EXPECT_FALSE(mask_dot(a, EventMask::from_string("0011")));  // no overlap
    EXPECT_TRUE(mask_dot(a, EventMask::from_string("0110")));   // overlap 1
    EXPECT_FALSE(mask_dot(a, EventMask::from_string("1100")));  // overlap 2
    EXPECT_TRUE(mask_dot(a, EventMask::from_string("1010")));
    EXPECT_THROW(mask_dot(a, EventMask(3)), std::invalid_argument);

    // Bilinearity under xor: (a^b)·c = a·c xor b·c.
    EventMask b = EventMask::from_string("0101");
    EventMask c = EventMask::from_string("1001");
    EXPECT_EQ(mask_dot(a ^ b, c), mask_dot(a, c) != mask_dot(b, c));
}

TEST(EventMask, HashSupportsUnorderedContainers) {
    std::unordered_set<EventMask, EventMaskHash> set;
    for (uint64_t v = 0; v < 64; v++) {
        set.insert(EventMask::from_integer(6, v));
    }
    EXPECT_EQ(set.size(), 64u);
    EXPECT_TRUE(set.count(EventMask::from_string("101010")));
    // Same bits, different width: distinct masks.
    set.insert(EventMask::from_string("1010100"));
    EXPECT_EQ(set.size(), 65u);
}

}  // namespace
}  // namespace demest
