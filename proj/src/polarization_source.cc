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

#include "demest/polarization_source.h"

#include <bit>
#include <mutex>
#include <stdexcept>

namespace demest {

EstimateWithError PolarizationSource::depolarization(const EventMask &parity) const {
    return demest::depolarization(polarization(parity));
}

double PolarizationSource::mean_covariance(const EventMask &a, const EventMask &b) const {
    auto k = num_shots();
    if (!k) {
        return 0.0;
    }
    double za = polarization(a).value;
    double zb = polarization(b).value;
    double zab = polarization(a ^ b).value;
    return (zab - za * zb) / (double)*k;
}

std::vector<double> PolarizationSource::mean_covariance_matrix(std::span<const EventMask> parities) const {
    size_t r = parities.size();
    std::vector<double> cov(r * r, 0.0);
    if (!num_shots()) {
        return cov;
    }
    for (size_t i = 0; i < r; i++) {
        for (size_t j = i; j < r; j++) {
            cov[i * r + j] = cov[j * r + i] = mean_covariance(parities[i], parities[j]);
        }
    }
    return cov;
}

EmpiricalPolarizations::EmpiricalPolarizations(const DetectorHistories &data)
    : num_detectors_(data.num_detectors()),
      num_shots_(data.num_shots()),
      column_words_((data.num_shots() + 63) >> 6) {
    if (num_shots_ == 0) {
        throw std::invalid_argument("need at least one shot");
    }
    columns_.assign((size_t)num_detectors_ * column_words_, 0);
    for (uint64_t shot = 0; shot < num_shots_; shot++) {
        auto row = data.shot_words(shot);
        uint64_t shot_word = shot >> 6;
        uint64_t shot_bit = uint64_t{1} << (shot & 63);
        for (uint32_t w = 0; w < row.size(); w++) {
            uint64_t word = row[w];
            while (word) {
                uint32_t detector = (w << 6) + std::countr_zero(word);
                word &= word - 1;
                columns_[(size_t)detector * column_words_ + shot_word] |= shot_bit;
            }
        }
    }
}

std::vector<uint64_t> EmpiricalPolarizations::parity_column(const EventMask &parity) const {
    if (parity.num_bits() != num_detectors_) {
        throw std::invalid_argument("parity mask width does not match data");
    }
    std::vector<uint64_t> column(column_words_, 0);
    for (uint32_t detector : parity.indices()) {
        const uint64_t *src = columns_.data() + (size_t)detector * column_words_;
        for (size_t w = 0; w < column_words_; w++) {
            column[w] ^= src[w];
        }
    }
    return column;
}

EstimateWithError EmpiricalPolarizations::polarization(const EventMask &parity) const {
    double z;
    bool hit;
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(parity);
        hit = it != cache_.end();
        if (hit) {
            z = it->second;
        }
    }
    if (!hit) {
        uint64_t odd = 0;
        for (uint64_t word : parity_column(parity)) {
            odd += std::popcount(word);
        }
        z = 1.0 - 2.0 * (double)odd / (double)num_shots_;
        std::lock_guard<std::mutex> lock(cache_mutex_);
        cache_.emplace(parity, z);
    }
    double var = std::max(0.0, 1.0 - z * z);
    return {z, std::sqrt(var / (double)num_shots_), false};
}

std::vector<double> EmpiricalPolarizations::mean_covariance_matrix(std::span<const EventMask> parities) const {
    size_t r = parities.size();
    double k = (double)num_shots_;
    std::vector<std::vector<uint64_t>> cols(r);
    std::vector<double> z(r);
    for (size_t i = 0; i < r; i++) {
        cols[i] = parity_column(parities[i]);
        uint64_t odd = 0;
        for (uint64_t word : cols[i]) {
            odd += std::popcount(word);
        }
        z[i] = 1.0 - 2.0 * (double)odd / k;
    }
    std::vector<double> cov(r * r);
    for (size_t i = 0; i < r; i++) {
        cov[i * r + i] = std::max(0.0, 1.0 - z[i] * z[i]) / k;
        for (size_t j = i + 1; j < r; j++) {
            uint64_t odd = 0;
            for (size_t w = 0; w < column_words_; w++) {
                odd += std::popcount(cols[i][w] ^ cols[j][w]);
            }
            double zij = 1.0 - 2.0 * (double)odd / k;
            cov[i * r + j] = cov[j * r + i] = (zij - z[i] * z[j]) / k;
        }
    }
    return cov;
}

ExactPolarizations::ExactPolarizations(Dem dem) : dem_(std::move(dem)) {
    decays_.reserve(dem_.num_events());
    for (const DemEvent &e : dem_.events()) {
        if (e.probability >= 0.5) {
            throw std::domain_error("exact polarizations require every probability < 1/2");
        }
        decays_.push_back(prob_to_decay(e.probability));
    }
}

EstimateWithError ExactPolarizations::polarization(const EventMask &parity) const {
    if (parity.num_bits() != dem_.num_detectors()) {
        throw std::invalid_argument("parity mask width does not match model");
    }
    double z = 1.0;
    const auto &events = dem_.events();
    for (size_t i = 0; i < events.size(); i++) {
        if (mask_dot(parity, events[i].mask)) {
            z *= decays_[i];
        }
    }
    return {z, 0.0, false};
}

}  // namespace demest
