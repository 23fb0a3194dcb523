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

#include "demest/dem.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace demest {

Dem::Dem(uint32_t num_detectors, std::vector<DemEvent> events) : num_detectors_(num_detectors) {
    if (num_detectors < 1 || num_detectors > EventMask::kMaxBits) {
        throw std::invalid_argument("num_detectors must be in 1.." + std::to_string(EventMask::kMaxBits));
    }
    for (const DemEvent &e : events) {
        if (e.mask.num_bits() != num_detectors) {
            throw std::invalid_argument("event mask width " + std::to_string(e.mask.num_bits()) + " does not match num_detectors " + std::to_string(num_detectors));
        }
        if (e.mask.is_zero()) {
            throw std::invalid_argument("event masks must be nonzero");
        }
        if (!(e.probability >= 0.0 && e.probability <= 1.0)) {
            throw std::invalid_argument("event probability must be in [0, 1]");
        }
    }
    std::sort(events.begin(), events.end(), [](const DemEvent &a, const DemEvent &b) {
        return a.mask < b.mask;
    });
    for (DemEvent &e : events) {
        if (!events_.empty() && events_.back().mask == e.mask) {
            // Merge indistinguishable events: decay factors multiply.
            double d = prob_to_decay(events_.back().probability) * prob_to_decay(e.probability);
            events_.back().probability = (1.0 - d) / 2.0;
        } else {
            events_.push_back(e);
        }
    }
}

const DemEvent *Dem::find(const EventMask &mask) const {
    auto it = std::lower_bound(events_.begin(), events_.end(), mask, [](const DemEvent &e, const EventMask &m) {
        return e.mask < m;
    });
    if (it != events_.end() && it->mask == mask) {
        return &*it;
    }
    return nullptr;
}

double prob_to_attenuation(double probability) {
    if (!(probability >= 0.0 && probability < 0.5)) {
        throw std::domain_error("attenuation requires probability in [0, 1/2), got " + std::to_string(probability));
    }
    return -std::log1p(-2.0 * probability);
}

double attenuation_to_prob(double attenuation) {
    if (!(attenuation >= 0.0)) {
        throw std::domain_error("attenuation must be nonnegative, got " + std::to_string(attenuation));
    }
    return -std::expm1(-attenuation) / 2.0;
}

double prob_to_decay(double probability) {
    if (!(probability >= 0.0 && probability <= 1.0)) {
        throw std::domain_error("probability must be in [0, 1]");
    }
    return 1.0 - 2.0 * probability;
}

EventClass::EventClass(std::vector<uint32_t> indices, EventMask values) : indices_(std::move(indices)), values_(values) {
    if (values_.num_bits() != indices_.size()) {
        throw std::invalid_argument("class values width must equal the number of fixed indices");
    }
    for (size_t t = 0; t + 1 < indices_.size(); t++) {
        if (indices_[t] >= indices_[t + 1]) {
            throw std::invalid_argument("class indices must be strictly increasing");
        }
    }
}

EventClass EventClass::all_ones(std::vector<uint32_t> indices) {
    EventMask values((uint32_t)indices.size());
    for (uint32_t t = 0; t < indices.size(); t++) {
        values.set_bit(t, true);
    }
    return EventClass(std::move(indices), values);
}

EventClass EventClass::from_mask(const EventMask &mask) {
    std::vector<uint32_t> indices(mask.num_bits());
    for (uint32_t i = 0; i < mask.num_bits(); i++) {
        indices[i] = i;
    }
    return EventClass(std::move(indices), mask);
}

bool EventClass::matches(const EventMask &event_mask) const {
    for (size_t t = 0; t < indices_.size(); t++) {
        if (indices_[t] >= event_mask.num_bits()) {
            throw std::invalid_argument("class index " + std::to_string(indices_[t]) + " out of range for " + std::to_string(event_mask.num_bits()) + "-bit mask");
        }
        if (event_mask.bit(indices_[t]) != values_.bit((uint32_t)t)) {
            return false;
        }
    }
    return true;
}

EventMask EventClass::parity_mask(uint32_t num_detectors, uint64_t subset) const {
    if (indices_.size() < 64 && (subset >> indices_.size()) != 0) {
        throw std::invalid_argument("subset has bits beyond the class size");
    }
    EventMask result(num_detectors);
    for (size_t t = 0; t < indices_.size(); t++) {
        if ((subset >> t) & 1) {
            result.set_bit(indices_[t], true);
        }
    }
    return result;
}

std::string EventClass::str() const {
    std::string s = "{";
    for (size_t t = 0; t < indices_.size(); t++) {
        if (t) {
            s += ",";
        }
        s += std::to_string(indices_[t]);
    }
    s += "}=[";
    s += values_.str();
    s += "]";
    return s;
}

double class_attenuation_true(const Dem &dem, const EventClass &cls) {
    double total = 0.0;
    for (const DemEvent &e : dem.events()) {
        if (cls.matches(e.mask)) {
            total += prob_to_attenuation(e.probability);
        }
    }
    return total;
}

double total_attenuation_true(const Dem &dem) {
    double total = 0.0;
    for (const DemEvent &e : dem.events()) {
        total += prob_to_attenuation(e.probability);
    }
    return total;
}

Dem reduce_dem(const Dem &dem, std::span<const uint32_t> keep_indices) {
    for (size_t t = 0; t < keep_indices.size(); t++) {
        if (keep_indices[t] >= dem.num_detectors()) {
            throw std::invalid_argument("keep index " + std::to_string(keep_indices[t]) + " out of range");
        }
        if (t + 1 < keep_indices.size() && keep_indices[t] >= keep_indices[t + 1]) {
            throw std::invalid_argument("keep indices must be strictly increasing");
        }
    }
    if (keep_indices.empty()) {
        throw std::invalid_argument("cannot reduce to zero detectors");
    }
    std::vector<DemEvent> restricted;
    for (const DemEvent &e : dem.events()) {
        EventMask mask((uint32_t)keep_indices.size());
        for (uint32_t t = 0; t < keep_indices.size(); t++) {
            mask.set_bit(t, e.mask.bit(keep_indices[t]));
        }
        if (!mask.is_zero()) {
            restricted.push_back({mask, e.probability});
        }
    }
    // The Dem constructor merges newly indistinguishable events.
    return Dem((uint32_t)keep_indices.size(), std::move(restricted));
}

}  // namespace demest
