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

#ifndef DEMEST_COMPARE_H
#define DEMEST_COMPARE_H

#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "demest/dem.h"

namespace demest {

struct CompareRow {
    EventMask mask;
    double true_p = 0.0;
    double estimated_p = 0.0;
    double abs_error = 0.0;
    /// Std error of the estimate; negative when the estimate file carried
    /// no sigma annotation for this event.
    double sigma = -1.0;
    /// abs_error <= z_factor·sigma. False when sigma is unknown.
    bool within_error = false;
};

/// Event-by-event diff of two models. Every event of either input lands in
/// exactly one of rows (shared), missing (truth only), or spurious
/// (estimate only).
struct CompareReport {
    uint32_t num_detectors = 0;
    double z_factor = 0.0;
    std::vector<CompareRow> rows;
    std::vector<EventMask> missing;
    std::vector<EventMask> spurious;
    /// NaN when some probability is >= 1/2 and has no attenuation.
    double total_attenuation_true = 0.0;
    double total_attenuation_estimated = 0.0;
    /// Largest probability discrepancy anywhere, counting a missing event
    /// as estimated 0 and a spurious one as truth 0.
    double max_abs_error = 0.0;

    bool clean() const {
        return missing.empty() && spurious.empty();
    }
};

/// `sigmas` (typically from the `# sigma=` annotations of an estimate file)
/// feeds the per-row within_error flags.
CompareReport compare_dems(
    const Dem &truth,
    const Dem &estimate,
    const std::unordered_map<EventMask, double, EventMaskHash> *sigmas = nullptr,
    double z_factor = 5.0);

/// Line-oriented key=value rendering, stable for diffing.
void write_compare_report(std::ostream &out, const CompareReport &report);

}  // namespace demest

#endif
