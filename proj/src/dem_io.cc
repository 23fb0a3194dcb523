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

#include "demest/dem_io.h"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "demest/errors.h"

namespace demest {

namespace {

std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return "";
    }
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(size_t line_no, const std::string &msg) {
    throw ParseError("model line " + std::to_string(line_no) + ": " + msg);
}

double parse_sigma_comment(const std::string &comment) {
    size_t pos = comment.find("sigma=");
    if (pos == std::string::npos) {
        return -1.0;
    }
    try {
        return std::stod(comment.substr(pos + 6));
    } catch (const std::exception &) {
        return -1.0;
    }
}

std::string format_probability(double p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", p);
    return buf;
}

}  // namespace

Dem read_dem(std::istream &in, std::unordered_map<EventMask, double, EventMaskHash> *sigmas_out) {
    std::string line;
    size_t line_no = 0;
    bool have_header = false;
    uint32_t num_detectors = 0;
    std::vector<DemEvent> events;
    while (std::getline(in, line)) {
        line_no++;
        std::string comment;
        size_t hash = line.find('#');
        if (hash != std::string::npos) {
            comment = line.substr(hash + 1);
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        std::istringstream tokens(line);
        std::string head;
        tokens >> head;
        if (!have_header) {
            if (head != "detectors") {
                fail(line_no, "expected 'detectors <N>' before any events");
            }
            long n = -1;
            if (!(tokens >> n) || n < 1 || n > (long)EventMask::kMaxBits) {
                fail(line_no, "detector count must be in 1.." + std::to_string(EventMask::kMaxBits));
            }
            std::string extra;
            if (tokens >> extra) {
                fail(line_no, "unexpected token '" + extra + "'");
            }
            num_detectors = (uint32_t)n;
            have_header = true;
            continue;
        }
        if (head.size() < 8 || head.substr(0, 6) != "error(" || head.back() != ')') {
            fail(line_no, "expected 'error(<p>) D<i> ...', got '" + head + "'");
        }
        std::string p_text = head.substr(6, head.size() - 7);
        double p;
        size_t consumed = 0;
        try {
            p = std::stod(p_text, &consumed);
        } catch (const std::exception &) {
            fail(line_no, "bad probability '" + p_text + "'");
        }
        if (consumed != p_text.size() || !(p >= 0.0 && p < 1.0)) {
            fail(line_no, "probability must be a decimal in [0, 1), got '" + p_text + "'");
        }
        EventMask mask(num_detectors);
        long prev = -1;
        std::string tok;
        while (tokens >> tok) {
            if (tok.size() < 2 || tok[0] != 'D') {
                fail(line_no, "expected detector token 'D<k>', got '" + tok + "'");
            }
            long idx;
            try {
                size_t used = 0;
                idx = std::stol(tok.substr(1), &used);
                if (used != tok.size() - 1) {
                    throw std::invalid_argument(tok);
                }
            } catch (const std::exception &) {
                fail(line_no, "bad detector token '" + tok + "'");
            }
            if (idx < 0 || idx >= (long)num_detectors) {
                fail(line_no, "detector index " + std::to_string(idx) + " out of range 0.." + std::to_string(num_detectors - 1));
            }
            if (idx <= prev) {
                fail(line_no, "detector indices must be strictly increasing");
            }
            mask.set_bit((uint32_t)idx, true);
            prev = idx;
        }
        if (mask.is_zero()) {
            fail(line_no, "event needs at least one detector");
        }
        events.push_back({mask, p});
        if (sigmas_out) {
            double sigma = parse_sigma_comment(comment);
            if (sigma >= 0.0) {
                (*sigmas_out)[mask] = sigma;
            }
        }
    }
    if (!have_header) {
        throw ParseError("model file has no 'detectors <N>' line");
    }
    return Dem(num_detectors, std::move(events));
}

Dem read_dem_file(const std::string &path, std::unordered_map<EventMask, double, EventMaskHash> *sigmas_out) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open model file '" + path + "'");
    }
    return read_dem(in, sigmas_out);
}

void write_dem(
    std::ostream &out,
    const Dem &dem,
    const std::vector<std::string> &header_comments,
    const std::unordered_map<EventMask, double, EventMaskHash> *sigmas) {
    for (const std::string &c : header_comments) {
        out << "# " << c << "\n";
    }
    out << "detectors " << dem.num_detectors() << "\n";
    for (const DemEvent &e : dem.events()) {
        out << "error(" << format_probability(e.probability) << ")";
        for (uint32_t i : e.mask.indices()) {
            out << " D" << i;
        }
        if (sigmas) {
            auto it = sigmas->find(e.mask);
            if (it != sigmas->end()) {
                out << "  # sigma=" << format_probability(it->second);
            }
        }
        out << "\n";
    }
}

void write_dem_file(
    const std::string &path,
    const Dem &dem,
    const std::vector<std::string> &header_comments,
    const std::unordered_map<EventMask, double, EventMaskHash> *sigmas) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot open '" + path + "' for writing");
    }
    write_dem(out, dem, header_comments, sigmas);
}

}  // namespace demest
