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

#ifndef DEMEST_DEM_IO_H
#define DEMEST_DEM_IO_H

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "demest/bit_mask.h"
#include "demest/dem.h"

namespace demest {

/// Text model format:
///
///     # optional comments
///     detectors <N>
///     error(<p>) D<i> D<j> ...
///
/// Detector indices are 0-based and strictly increasing within a line; <p> is
/// a decimal in [0, 1). '#' starts a comment, blank lines are ignored.
/// Estimated models may carry a trailing "# sigma=<x>" annotation per event;
/// the reader collects those into `sigmas_out` when provided.
Dem read_dem(std::istream &in, std::unordered_map<EventMask, double, EventMaskHash> *sigmas_out = nullptr);
Dem read_dem_file(const std::string &path, std::unordered_map<EventMask, double, EventMaskHash> *sigmas_out = nullptr);

/// Writes events sorted by mask. `header_comments` become leading '#' lines;
/// `sigmas` (when given) adds the per-event annotation read_dem understands.
void write_dem(
    std::ostream &out,
    const Dem &dem,
    const std::vector<std::string> &header_comments = {},
    const std::unordered_map<EventMask, double, EventMaskHash> *sigmas = nullptr);
void write_dem_file(
    const std::string &path,
    const Dem &dem,
    const std::vector<std::string> &header_comments = {},
    const std::unordered_map<EventMask, double, EventMaskHash> *sigmas = nullptr);

}  // namespace demest

#endif
