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

#include "demest/histories.h"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "demest/errors.h"

namespace demest {

namespace {
constexpr char kMagic[4] = {'D', 'E', 'M', 'H'};
constexpr uint8_t kVersion = 0x01;
}  // namespace

DetectorHistories::DetectorHistories(uint32_t num_detectors, uint64_t num_shots)
    : num_detectors_(num_detectors), num_shots_(num_shots), words_per_shot_((num_detectors + 63) >> 6) {
    if (num_detectors < 1 || num_detectors > EventMask::kMaxBits) {
        throw std::invalid_argument("num_detectors must be in 1.." + std::to_string(EventMask::kMaxBits));
    }
    words_.assign(num_shots * words_per_shot_, 0);
}

bool DetectorHistories::bit(uint64_t shot, uint32_t detector) const {
    if (shot >= num_shots_ || detector >= num_detectors_) {
        throw std::out_of_range("shot/detector index out of range");
    }
    return (words_[shot * words_per_shot_ + (detector >> 6)] >> (detector & 63)) & 1;
}

void DetectorHistories::set_bit(uint64_t shot, uint32_t detector, bool value) {
    if (shot >= num_shots_ || detector >= num_detectors_) {
        throw std::out_of_range("shot/detector index out of range");
    }
    uint64_t &word = words_[shot * words_per_shot_ + (detector >> 6)];
    uint64_t bit = uint64_t{1} << (detector & 63);
    word = value ? (word | bit) : (word & ~bit);
}

EventMask DetectorHistories::shot_mask(uint64_t shot) const {
    if (shot >= num_shots_) {
        throw std::out_of_range("shot index out of range");
    }
    EventMask mask(num_detectors_);
    std::memcpy(mask.words(), words_.data() + shot * words_per_shot_, words_per_shot_ * 8);
    return mask;
}

void write_shots(std::ostream &out, const DetectorHistories &data, ShotFormat format) {
    uint32_t n = data.num_detectors();
    uint64_t k = data.num_shots();
    if (format == ShotFormat::text) {
        std::string line(n, '0');
        for (uint64_t shot = 0; shot < k; shot++) {
            auto words = data.shot_words(shot);
            for (uint32_t i = 0; i < n; i++) {
                line[i] = ((words[i >> 6] >> (i & 63)) & 1) ? '1' : '0';
            }
            out << line << "\n";
        }
        return;
    }
    uint8_t header[17];
    std::memcpy(header, kMagic, 4);
    header[4] = kVersion;
    for (int b = 0; b < 4; b++) {
        header[5 + b] = (uint8_t)(n >> (8 * b));
    }
    for (int b = 0; b < 8; b++) {
        header[9 + b] = (uint8_t)(k >> (8 * b));
    }
    out.write((const char *)header, sizeof header);
    uint32_t record_bytes = (n + 7) / 8;
    for (uint64_t shot = 0; shot < k; shot++) {
        // Word layout is little-endian bit order, so the record is a prefix
        // of the row's bytes (trailing padding bits are zero by invariant).
        out.write((const char *)data.shot_words(shot).data(), record_bytes);
    }
}

void write_shots_file(const std::string &path, const DetectorHistories &data, ShotFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError("cannot open '" + path + "' for writing");
    }
    write_shots(out, data, format);
}

namespace {

DetectorHistories read_shots_binary(std::istream &in) {
    uint8_t header[17];
    in.read((char *)header, sizeof header);
    if (in.gcount() != sizeof header || std::memcmp(header, kMagic, 4) != 0) {
        throw ParseError("bad shot file header");
    }
    if (header[4] != kVersion) {
        throw ParseError("unsupported shot file version " + std::to_string(header[4]));
    }
    uint32_t n = 0;
    for (int b = 3; b >= 0; b--) {
        n = (n << 8) | header[5 + b];
    }
    uint64_t k = 0;
    for (int b = 7; b >= 0; b--) {
        k = (k << 8) | header[9 + b];
    }
    if (n < 1 || n > EventMask::kMaxBits) {
        throw ParseError("shot file detector count " + std::to_string(n) + " out of range");
    }
    DetectorHistories data(n, k);
    uint32_t record_bytes = (n + 7) / 8;
    uint64_t padding_bits = (uint64_t)record_bytes * 8 - n;
    for (uint64_t shot = 0; shot < k; shot++) {
        auto words = data.shot_words(shot);
        in.read((char *)words.data(), record_bytes);
        if ((uint32_t)in.gcount() != record_bytes) {
            throw ParseError("shot file truncated at record " + std::to_string(shot));
        }
        if (padding_bits && (words[(n - 1) >> 6] >> (((n - 1) & 63) + 1)) != 0) {
            throw ParseError("nonzero padding bits in shot record " + std::to_string(shot));
        }
    }
    return data;
}

DetectorHistories read_shots_text(std::istream &in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        lines.push_back(line);
    }
    if (lines.empty()) {
        throw ParseError("shot file has no shots");
    }
    uint32_t n = (uint32_t)lines[0].size();
    if (n < 1 || n > EventMask::kMaxBits) {
        throw ParseError("shot line length " + std::to_string(n) + " out of range");
    }
    DetectorHistories data(n, lines.size());
    for (uint64_t shot = 0; shot < lines.size(); shot++) {
        const std::string &row = lines[shot];
        if (row.size() != n) {
            throw ParseError("shot line " + std::to_string(shot + 1) + " has length " + std::to_string(row.size()) + ", expected " + std::to_string(n));
        }
        auto words = data.shot_words(shot);
        for (uint32_t i = 0; i < n; i++) {
            if (row[i] == '1') {
                words[i >> 6] |= uint64_t{1} << (i & 63);
            } else if (row[i] != '0') {
                throw ParseError("shot line " + std::to_string(shot + 1) + " has character '" + std::string(1, row[i]) + "'");
            }
        }
    }
    return data;
}

}  // namespace

DetectorHistories read_shots(std::istream &in) {
    int c = in.peek();
    if (c == kMagic[0]) {
        return read_shots_binary(in);
    }
    return read_shots_text(in);
}

DetectorHistories read_shots_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open shot file '" + path + "'");
    }
    return read_shots(in);
}

}  // namespace demest
