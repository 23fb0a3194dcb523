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

#ifndef DEMEST_DEM_H
#define DEMEST_DEM_H

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "demest/bit_mask.h"

namespace demest {

/// An independent error event: with probability `probability`, flip exactly
/// the detectors in `mask` (which must be nonzero).
struct DemEvent {
    EventMask mask;
    double probability = 0.0;
};

/// A detector error model: a set of independent error events over N
/// detectors. Each shot, every event fires independently and the observed
/// detection parities are the XOR of the fired masks.
///
/// Events are kept sorted by mask with no duplicates. If the input list
/// repeats a mask, the duplicates are merged with the exclusive-OR rule for
/// indistinguishable events: the merged firing probability satisfies
/// 1 - 2p = (1 - 2p1)(1 - 2p2), i.e. "fires an odd number of times".
class Dem {
   public:
    Dem(uint32_t num_detectors, std::vector<DemEvent> events);

    uint32_t num_detectors() const {
        return num_detectors_;
    }
    const std::vector<DemEvent> &events() const {
        return events_;
    }
    size_t num_events() const {
        return events_.size();
    }
    /// Binary search by mask; nullptr when absent.
    const DemEvent *find(const EventMask &mask) const;

   private:
    uint32_t num_detectors_;
    std::vector<DemEvent> events_;
};

/// Attenuation of an event with firing probability p (requires 0 <= p < 1/2):
///     a = -ln(1 - 2p).
/// Attenuations are the additive currency of this library: merging
/// indistinguishable events adds their attenuations, while probabilities
/// combine with the clumsier exclusive-OR rule.
double prob_to_attenuation(double probability);

/// Inverse of prob_to_attenuation: p = (1 - exp(-a)) / 2 for a >= 0.
double attenuation_to_prob(double attenuation);

/// Decay factor d = 1 - 2p = exp(-a); the per-event factor by which an
/// event's firing shrinks every polarization it touches.
double prob_to_decay(double probability);

/// A subset of detectors with required mask values on them; identifies the
/// aggregate of all events whose masks agree with `values` on `indices`
/// (and are arbitrary elsewhere). The class with no fixed indices matches
/// every event.
class EventClass {
   public:
    /// `indices` must be strictly increasing; `values` has one bit per index.
    EventClass(std::vector<uint32_t> indices, EventMask values);
    /// Class fixing all of `indices` to 1.
    static EventClass all_ones(std::vector<uint32_t> indices);
    /// Class pinning every detector of an N-bit mask (matches only `mask`).
    static EventClass from_mask(const EventMask &mask);

    size_t size() const {
        return indices_.size();
    }
    const std::vector<uint32_t> &indices() const {
        return indices_;
    }
    const EventMask &values() const {
        return values_;
    }
    /// Estimating a class from data requires at least one value fixed to 1
    /// (otherwise the all-zero event, which is not an error, would match).
    bool has_one() const {
        return !values_.is_zero();
    }
    bool matches(const EventMask &event_mask) const;
    /// The N-bit parity mask selecting (as detectors) the class indices
    /// flagged by `subset`: bit indices_[t] is set iff bit t of subset is.
    EventMask parity_mask(uint32_t num_detectors, uint64_t subset) const;
    std::string str() const;

   private:
    std::vector<uint32_t> indices_;
    EventMask values_;
};

/// Sum of attenuations of all events in `dem` matching `cls`; the ground
/// truth that class estimators target. Requires all matching probabilities
/// below 1/2.
double class_attenuation_true(const Dem &dem, const EventClass &cls);

/// Sum of attenuations of every event (the empty-class aggregate).
double total_attenuation_true(const Dem &dem);

/// Marginalizes a model onto a detector subset: each event's mask is
/// restricted to `keep_indices` (strictly increasing), events that become
/// trivial disappear, and events that become indistinguishable merge under
/// the exclusive-OR rule. Sampling the reduced model is statistically
/// identical to sampling the original and discarding the other detectors.
Dem reduce_dem(const Dem &dem, std::span<const uint32_t> keep_indices);

}  // namespace demest

#endif
