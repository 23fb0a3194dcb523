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

#include "demest/aggregated.h"

#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "demest/errors.h"
#include "demest/fwht.h"
#include "demest/rng.h"
#include "demest/sampling.h"

namespace demest {

namespace {

constexpr uint32_t kMaxClassSize = 20;

int sign_for(uint64_t u, uint64_t v) {
    return (std::popcount(u & v) & 1) ? -1 : 1;
}

uint64_t class_salt(const EventClass &cls) {
    uint64_t h = cls.size();
    for (uint32_t i : cls.indices()) {
        h = mix_seed(h, i + 1);
    }
    return mix_seed(h, cls.values().to_integer());
}

// a = -(2/2^k)·sum_u sign(u)·omega_u from a full set of 2^k polarizations
// indexed by subset-of-fixed-indices. Returns NaN when a value is
// unusable; `ok` reports whether all logs existed.
double combine(const std::vector<double> &z, uint64_t v, bool *ok) {
    *ok = true;
    double acc = 0.0;
    for (uint64_t u = 1; u < z.size(); u++) {
        if (z[u] <= 0.0) {
            *ok = false;
            return std::numeric_limits<double>::quiet_NaN();
        }
        acc += sign_for(u, v) * -std::log(z[u]);
    }
    return -2.0 / (double)z.size() * acc;
}

}  // namespace

EstimateWithError class_attenuation_estimate(
    const PolarizationSource &source,
    const EventClass &cls,
    const BootstrapOptions &bootstrap) {
    uint32_t k = (uint32_t)cls.size();
    if (k < 1 || k > kMaxClassSize) {
        throw std::invalid_argument("class must fix between 1 and " + std::to_string(kMaxClassSize) + " detectors");
    }
    if (!cls.has_one()) {
        throw std::invalid_argument(
            "class " + cls.str() + " fixes no detector to 1; such classes have no efficient estimator");
    }
    uint32_t n = source.num_detectors();
    uint64_t size = uint64_t{1} << k;
    uint64_t v = cls.values().to_integer();

    std::vector<double> z(size, 1.0);
    double acc = 0.0;
    bool divergent = false;
    for (uint64_t u = 1; u < size; u++) {
        EstimateWithError omega = source.depolarization(cls.parity_mask(n, u));
        z[u] = source.polarization(cls.parity_mask(n, u)).value;
        divergent |= omega.divergent;
        acc += sign_for(u, v) * omega.value;
    }
    double value = -2.0 / (double)size * acc;
    if (divergent) {
        return EstimateWithError::make_divergent(value);
    }
    auto num_shots = source.num_shots();
    if (!num_shots) {
        return {value, 0.0, false};
    }

    // Bootstrap via the k-bit substring histogram, which the polarizations
    // determine exactly (inverse transform, then round to integers).
    uint64_t shots = *num_shots;
    std::vector<double> cells(z);
    fwht_unnormalized(cells);
    std::vector<uint64_t> counts(size);
    uint64_t total = 0;
    size_t largest = 0;
    for (uint64_t i = 0; i < size; i++) {
        double c = std::round(cells[i] * (double)shots / (double)size);
        counts[i] = c > 0.0 ? (uint64_t)c : 0;
        total += counts[i];
        if (counts[i] > counts[largest]) {
            largest = i;
        }
    }
    counts[largest] += shots - total;  // fp dust, if any

    uint32_t b = bootstrap.resamples;
    if (b < 2) {
        throw std::invalid_argument("need at least 2 bootstrap resamples");
    }
    uint64_t salt = mix_seed(bootstrap.seed, class_salt(cls));
    std::vector<double> values;
    values.reserve(b);
    std::vector<double> resampled_z(size);
    for (uint32_t r = 0; r < b; r++) {
        RngStream rng(salt, r);
        std::vector<uint64_t> boot = resample_counts(counts, shots, rng);
        for (uint64_t i = 0; i < size; i++) {
            resampled_z[i] = (double)boot[i] / (double)shots;
        }
        fwht_unnormalized(resampled_z);
        bool ok;
        double a = combine(resampled_z, v, &ok);
        if (ok) {
            values.push_back(a);
        }
    }
    if (values.size() < 2 || values.size() < b / 2) {
        return EstimateWithError::make_divergent(value);
    }
    double mean = 0.0;
    for (double x : values) {
        mean += x;
    }
    mean /= values.size();
    double ss = 0.0;
    for (double x : values) {
        ss += (x - mean) * (x - mean);
    }
    return {value, std::sqrt(ss / (values.size() - 1)), false};
}

EstimateWithError class_attenuation_estimate(
    const DetectorHistories &data,
    const EventClass &cls,
    const BootstrapOptions &bootstrap) {
    return class_attenuation_estimate(EmpiricalPolarizations(data), cls, bootstrap);
}

EstimateWithError pij(const PolarizationSource &source, uint32_t i, uint32_t j) {
    uint32_t n = source.num_detectors();
    if (i == j || i >= n || j >= n) {
        throw std::invalid_argument("pij needs two distinct detector indices in range");
    }
    EventMask yi(n), yj(n);
    yi.set_bit(i, true);
    yj.set_bit(j, true);
    EventMask yij = yi ^ yj;
    double zi = source.polarization(yi).value;
    double zj = source.polarization(yj).value;
    double zij = source.polarization(yij).value;
    if (zij <= 0.0) {
        return EstimateWithError::make_divergent();
    }
    double radicand = zi * zj / zij;
    if (radicand <= 0.0) {
        return EstimateWithError::make_divergent();
    }
    double root = std::sqrt(radicand);
    double p = 0.5 - 0.5 * root;  // negative when radicand > 1; reported as-is

    std::array<EventMask, 3> parities{yi, yj, yij};
    std::vector<double> cov = source.mean_covariance_matrix(parities);
    std::array<double, 3> grad{-root / (4.0 * zi), -root / (4.0 * zj), root / (4.0 * zij)};
    double var = 0.0;
    for (size_t a = 0; a < 3; a++) {
        for (size_t c = 0; c < 3; c++) {
            var += grad[a] * grad[c] * cov[a * 3 + c];
        }
    }
    return {p, std::sqrt(std::max(0.0, var)), false};
}

EstimateWithError pij(const DetectorHistories &data, uint32_t i, uint32_t j) {
    return pij(EmpiricalPolarizations(data), i, j);
}

namespace {

EventMask random_parity(uint32_t n, RngStream &rng) {
    EventMask y(n);
    uint32_t words = y.num_words();
    for (uint32_t w = 0; w < words; w++) {
        y.words()[w] = rng();
    }
    if (n & 63) {
        y.words()[words - 1] &= (uint64_t{1} << (n & 63)) - 1;
    }
    return y;
}

McResult mc_core(const PolarizationSource &source, const EventMask *s, const McConfig &cfg) {
    if (cfg.n_samples < 1) {
        throw std::invalid_argument("need at least one Monte Carlo draw");
    }
    uint32_t n = source.num_detectors();
    if (s && s->num_bits() != n) {
        throw std::invalid_argument("event mask width does not match data");
    }
    std::vector<double> t;
    std::vector<int> signs;
    std::vector<EventMask> parities;
    std::vector<double> zs;
    uint64_t n_divergent = 0;
    for (uint64_t r = 0; r < cfg.n_samples; r++) {
        RngStream rng(mix_seed(cfg.seed, 0x6d635f79), r);
        EventMask y = random_parity(n, rng);
        EstimateWithError zest = source.polarization(y);
        EstimateWithError omega = depolarization(zest);
        if (omega.divergent) {
            n_divergent++;
            continue;
        }
        int sign = s ? (mask_dot(y, *s) ? 1 : -1) : 1;
        t.push_back(2.0 * sign * omega.value);
        signs.push_back(sign);
        parities.push_back(y);
        zs.push_back(zest.value);
    }
    McResult result;
    result.n_divergent = n_divergent;
    result.divergent_fraction = (double)n_divergent / (double)cfg.n_samples;
    if (t.empty()) {
        result.estimate = EstimateWithError::make_divergent();
        return result;
    }
    size_t rv = t.size();
    double mean = 0.0;
    for (double x : t) {
        mean += x;
    }
    mean /= rv;

    double sigma;
    if (rv < 2) {
        sigma = std::numeric_limits<double>::infinity();
    } else {
        // y-sampling variance: bootstrap over the draws.
        constexpr uint32_t kDrawResamples = 200;
        std::vector<double> boot_means(kDrawResamples);
        for (uint32_t b = 0; b < kDrawResamples; b++) {
            RngStream rng(mix_seed(cfg.seed, 0x6d63626f), b);
            double acc = 0.0;
            for (size_t i = 0; i < rv; i++) {
                acc += t[rng() % rv];
            }
            boot_means[b] = acc / rv;
        }
        double bm = 0.0;
        for (double x : boot_means) {
            bm += x;
        }
        bm /= kDrawResamples;
        double draw_var = 0.0;
        for (double x : boot_means) {
            draw_var += (x - bm) * (x - bm);
        }
        draw_var /= kDrawResamples - 1;

        // Shot noise is shared between draws (every omega-hat comes from the
        // same K shots), which the draw bootstrap cannot see. Add the average
        // pairwise covariance cov(t_r, t_r') = 4·sign_r·sign_r'·
        // cov(z_r, z_r')/(z_r·z_r'), zero for exact sources.
        double cov_term = 0.0;
        if (source.num_shots()) {
            std::vector<double> cov = source.mean_covariance_matrix(parities);
            double acc = 0.0;
            for (size_t a = 0; a < rv; a++) {
                for (size_t b2 = a + 1; b2 < rv; b2++) {
                    acc += 4.0 * signs[a] * signs[b2] * cov[a * rv + b2] / (zs[a] * zs[b2]);
                }
            }
            double avg = 2.0 * acc / ((double)rv * (double)(rv - 1));
            cov_term = (double)(rv - 1) / (double)rv * avg;
        }
        sigma = std::sqrt(std::max(0.0, draw_var + cov_term));
    }

    if (result.divergent_fraction > 0.10) {
        result.estimate = EstimateWithError::make_divergent(mean);
    } else {
        result.estimate = {mean, sigma, false};
    }
    return result;
}

double exhaustive_core(const PolarizationSource &source, const EventMask *s) {
    uint32_t n = source.num_detectors();
    if (n > kDefaultDistributionCap) {
        throw CapacityError("exhaustive parity enumeration is capped at N = " + std::to_string(kDefaultDistributionCap));
    }
    double acc = 0.0;
    uint64_t size = uint64_t{1} << n;
    for (uint64_t yi = 0; yi < size; yi++) {
        EventMask y = EventMask::from_integer(n, yi);
        EstimateWithError omega = source.depolarization(y);
        if (omega.divergent) {
            throw EstimationError("divergent depolarization at parity " + y.str() + " in exhaustive enumeration");
        }
        int sign = s ? (mask_dot(y, *s) ? 1 : -1) : 1;
        acc += 2.0 * sign * omega.value;
    }
    return acc / (double)size;
}

}  // namespace

McResult mc_event_attenuation(const PolarizationSource &source, const EventMask &s, const McConfig &cfg) {
    return mc_core(source, &s, cfg);
}

McResult mc_event_attenuation(const DetectorHistories &data, const EventMask &s, const McConfig &cfg) {
    return mc_core(EmpiricalPolarizations(data), &s, cfg);
}

McResult mc_total_attenuation(const PolarizationSource &source, const McConfig &cfg) {
    return mc_core(source, nullptr, cfg);
}

McResult mc_total_attenuation(const DetectorHistories &data, const McConfig &cfg) {
    return mc_core(EmpiricalPolarizations(data), nullptr, cfg);
}

double mc_event_attenuation_exhaustive(const PolarizationSource &source, const EventMask &s) {
    if (s.num_bits() != source.num_detectors()) {
        throw std::invalid_argument("event mask width does not match data");
    }
    return exhaustive_core(source, &s);
}

double mc_total_attenuation_exhaustive(const PolarizationSource &source) {
    return exhaustive_core(source, nullptr);
}

}  // namespace demest
