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

#ifndef DEMEST_HISTORIES_H
#define DEMEST_HISTORIES_H

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "demest/bit_mask.h"

namespace demest {

/// K detector histories of N bits each, one bit-packed row per shot.
class DetectorHistories {
   public:
    DetectorHistories(uint32_t num_detectors, uint64_t num_shots);

    uint32_t num_detectors() const {
        return num_detectors_;
    }
    uint64_t num_shots() const {
        return num_shots_;
    }
    uint32_t words_per_shot() const {
        return words_per_shot_;
    }

    bool bit(uint64_t shot, uint32_t detector) const;
    void set_bit(uint64_t shot, uint32_t detector, bool value);
    std::span<uint64_t> shot_words(uint64_t shot) {
        return {words_.data() + shot * words_per_shot_, words_per_shot_};
    }
    std::span<const uint64_t> shot_words(uint64_t shot) const {
        return {words_.data() + shot * words_per_shot_, words_per_shot_};
    }
    EventMask shot_mask(uint64_t shot) const;

   private:
    uint32_t num_detectors_;
    uint64_t num_shots_;
    uint32_t words_per_shot_;
    std::vector<uint64_t> words_;
};

enum class ShotFormat { text, binary };

/// Text: one line per shot, N characters '0'/'1', detector 0 leftmost.
/// Binary: magic "DEMH", version 0x01, N as u32 LE, K as u64 LE, then K
/// records of ceil(N/8) bytes; bit j of byte b holds detector 8b+j; padding
/// bits zero (checked on read).
void write_shots(std::ostream &out, const DetectorHistories &data, ShotFormat format);
void write_shots_file(const std::string &path, const DetectorHistories &data, ShotFormat format);
/// Auto-detects the format by sniffing the magic bytes.
DetectorHistories read_shots(std::istream &in);
DetectorHistories read_shots_file(const std::string &path);

}  // namespace demest

#endif
