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

#include "demest/statistics.h"

#include <bit>
#include <random>
#include <stdexcept>

#include "demest/rng.h"

namespace demest {

namespace {

void check_compatible(const DetectorHistories &data, const EventMask &parity) {
    if (parity.num_bits() != data.num_detectors()) {
        throw std::invalid_argument("parity mask width does not match data");
    }
    if (data.num_shots() == 0) {
        throw std::invalid_argument("need at least one shot");
    }
}

uint64_t count_odd_parities(const DetectorHistories &data, const EventMask &parity) {
    uint64_t odd = 0;
    uint32_t words = data.words_per_shot();
    const uint64_t *mask = parity.words();
    for (uint64_t shot = 0; shot < data.num_shots(); shot++) {
        auto row = data.shot_words(shot);
        uint64_t acc = 0;
        for (uint32_t w = 0; w < words; w++) {
            acc ^= row[w] & mask[w];
        }
        odd += std::popcount(acc) & 1;
    }
    return odd;
}

}  // namespace

EstimateWithError sample_polarization(const DetectorHistories &data, const EventMask &parity) {
    check_compatible(data, parity);
    double k = (double)data.num_shots();
    double z = 1.0 - 2.0 * (double)count_odd_parities(data, parity) / k;
    double var = std::max(0.0, 1.0 - z * z);
    return {z, std::sqrt(var / k), false};
}

EstimateWithError depolarization(const EstimateWithError &polarization) {
    double z = polarization.value;
    double sigma = polarization.std_error;
    if (polarization.divergent || !(z > kDivergenceFloorSigmas * sigma)) {
        return EstimateWithError::make_divergent(z > 0.0 ? -std::log(z) : std::numeric_limits<double>::quiet_NaN());
    }
    return {-std::log(z), sigma / z, false};
}

std::vector<double> polarization_covariance(const DetectorHistories &data, std::span<const EventMask> parities) {
    size_t k = parities.size();
    std::vector<double> z(k);
    for (size_t i = 0; i < k; i++) {
        z[i] = sample_polarization(data, parities[i]).value;
    }
    std::vector<double> cov(k * k);
    for (size_t i = 0; i < k; i++) {
        for (size_t j = i; j < k; j++) {
            double zij = sample_polarization(data, parities[i] ^ parities[j]).value;
            cov[i * k + j] = cov[j * k + i] = zij - z[i] * z[j];
        }
    }
    return cov;
}

double bootstrap_std_error(
    const DetectorHistories &data,
    const std::function<double(const DetectorHistories &)> &statistic,
    uint32_t n_resamples,
    uint64_t seed) {
    if (n_resamples < 2) {
        throw std::invalid_argument("need at least 2 resamples");
    }
    uint64_t k = data.num_shots();
    if (k == 0) {
        throw std::invalid_argument("need at least one shot");
    }
    uint32_t words = data.words_per_shot();
    std::vector<double> values(n_resamples);
    for (uint32_t r = 0; r < n_resamples; r++) {
        // Each resample gets its own stream so results are independent of
        // evaluation order.
        RngStream rng(mix_seed(seed, 0x626f6f74), r);
        DetectorHistories resampled(data.num_detectors(), k);
        for (uint64_t shot = 0; shot < k; shot++) {
            uint64_t pick = rng() % k;
            auto src = data.shot_words(pick);
            auto dst = resampled.shot_words(shot);
            for (uint32_t w = 0; w < words; w++) {
                dst[w] = src[w];
            }
        }
        values[r] = statistic(resampled);
    }
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= n_resamples;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return std::sqrt(ss / (n_resamples - 1));
}

bool is_significant(const EstimateWithError &est, double z_threshold) {
    if (!(z_threshold > 0.0)) {
        throw std::invalid_argument("z_threshold must be positive");
    }
    return !est.divergent && est.value > z_threshold * est.std_error;
}

std::vector<uint64_t> resample_counts(std::span<const uint64_t> counts, uint64_t total, RngStream &rng) {
    // Chained conditional binomials; the last occupied cell takes the
    // remainder so the resample always sums to `total` despite rounding.
    size_t last_nonzero = 0;
    uint64_t sum = 0;
    for (size_t i = 0; i < counts.size(); i++) {
        if (counts[i]) {
            last_nonzero = i;
        }
        sum += counts[i];
    }
    if (sum != total || total == 0) {
        throw std::invalid_argument("histogram does not sum to the stated total");
    }
    std::vector<uint64_t> out(counts.size(), 0);
    uint64_t remaining = total;
    double mass = 1.0;
    for (size_t i = 0; i < counts.size(); i++) {
        double p = (double)counts[i] / (double)total;
        uint64_t c = 0;
        if (i == last_nonzero) {
            c = remaining;
        } else if (counts[i] && remaining > 0 && mass > 0.0) {
            std::binomial_distribution<uint64_t> binom(remaining, std::min(1.0, p / mass));
            c = binom(rng);
        }
        out[i] = c;
        remaining -= c;
        mass = std::max(0.0, mass - p);
    }
    return out;
}

}  // namespace demest
