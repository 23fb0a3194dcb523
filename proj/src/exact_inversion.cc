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

#include "demest/exact_inversion.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "demest/errors.h"
#include "demest/fwht.h"
#include "demest/rng.h"

namespace demest {

SpectrumVector::SpectrumVector(uint32_t num_detectors, SpectrumKind kind) : num_detectors(num_detectors), kind(kind) {
    if (num_detectors < 1 || num_detectors > 30) {
        throw std::invalid_argument("spectrum needs num_detectors in 1..30");
    }
    entries.assign(uint64_t{1} << num_detectors, 0.0);
    if (kind == SpectrumKind::polarization) {
        entries[0] = 1.0;
    }
}

namespace {

void check_kind(const SpectrumVector &v, SpectrumKind expected, const char *what) {
    if (v.kind != expected) {
        throw std::invalid_argument(std::string("expected a ") + what + " spectrum");
    }
}

std::string format_parity(uint32_t n, uint64_t y) {
    return EventMask::from_integer(n, y).str();
}

}  // namespace

SpectrumVector polarizations_from_distribution(const Distribution &dist) {
    double total = 0.0;
    for (double w : dist.weights) {
        if (!(w >= 0.0)) {
            throw std::invalid_argument("distribution weights must be nonnegative");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("distribution weights must sum to 1");
    }
    SpectrumVector z(dist.num_detectors, SpectrumKind::polarization);
    z.entries = dist.weights;
    fwht_unnormalized(z.entries);
    z.entries[0] = 1.0;
    return z;
}

SpectrumVector depolarizations_from_polarizations(const SpectrumVector &z) {
    check_kind(z, SpectrumKind::polarization, "polarization");
    SpectrumVector omega(z.num_detectors, SpectrumKind::depolarization);
    std::string bad;
    size_t n_bad = 0;
    for (uint64_t y = 1; y < z.entries.size(); y++) {
        if (z.entries[y] <= 0.0) {
            if (n_bad < 8) {
                bad += (n_bad ? ", " : "") + format_parity(z.num_detectors, y);
            }
            n_bad++;
            continue;
        }
        omega.entries[y] = -std::log(z.entries[y]);
    }
    if (n_bad) {
        throw EstimationError(
            "cannot take -ln of " + std::to_string(n_bad) + " nonpositive polarization(s) at parities: " + bad +
            (n_bad > 8 ? ", ..." : ""));
    }
    return omega;
}

SpectrumVector attenuations_from_depolarizations(const SpectrumVector &omega) {
    check_kind(omega, SpectrumKind::depolarization, "depolarization");
    if (std::abs(omega.entries[0]) > 1e-12) {
        throw std::invalid_argument("depolarization spectrum must have entry[0] = 0");
    }
    SpectrumVector a(omega.num_detectors, SpectrumKind::attenuation);
    a.entries = omega.entries;
    fwht_unnormalized(a.entries);
    double scale = -2.0 / (double)a.entries.size();
    for (double &v : a.entries) {
        v *= scale;
    }
    a.entries[0] = 0.0;
    return a;
}

SpectrumVector depolarizations_from_attenuations(const SpectrumVector &a) {
    check_kind(a, SpectrumKind::attenuation, "attenuation");
    if (std::abs(a.entries[0]) > 1e-12) {
        throw std::invalid_argument("attenuation spectrum must have entry[0] = 0");
    }
    double total = 0.0;
    for (double v : a.entries) {
        total += v;
    }
    SpectrumVector omega(a.num_detectors, SpectrumKind::depolarization);
    omega.entries = a.entries;
    fwht_unnormalized(omega.entries);
    for (double &v : omega.entries) {
        v = (total - v) / 2.0;
    }
    omega.entries[0] = 0.0;
    return omega;
}

double total_attenuation_exact(const SpectrumVector &omega) {
    check_kind(omega, SpectrumKind::depolarization, "depolarization");
    double total = 0.0;
    for (double v : omega.entries) {
        total += v;
    }
    return 2.0 * total / (double)omega.entries.size();
}

namespace {

// Shared by the point estimate and every bootstrap resample: histogram
// counts -> attenuation entries. Returns false if any nonzero parity has a
// polarization <= 0 (resamples hitting that are skipped).
bool attenuations_from_counts(const std::vector<uint64_t> &counts, uint64_t k, std::vector<double> &scratch) {
    scratch.resize(counts.size());
    for (size_t i = 0; i < counts.size(); i++) {
        scratch[i] = (double)counts[i] / (double)k;
    }
    fwht_unnormalized(scratch);
    for (size_t y = 1; y < scratch.size(); y++) {
        if (scratch[y] <= 0.0) {
            return false;
        }
        scratch[y] = -std::log(scratch[y]);
    }
    scratch[0] = 0.0;
    fwht_unnormalized(scratch);
    double scale = -2.0 / (double)scratch.size();
    for (double &v : scratch) {
        v *= scale;
    }
    scratch[0] = 0.0;
    return true;
}

// Exact linear error propagation: since a = M·omega with
// M[s][y] = -(2/2^N)·(-1)^(y·s),
//     Var(a_s) = (4/4^N)·sum_{y,y'} (-1)^((y^y')·s)·Cov(omega_y, omega_y')
// and Cov(omega_y, omega_y') = (z_(y^y') - z_y·z_(y'))/(K·z_y·z_(y')). The
// constant -z_y·z_y' part of the numerator sums to zero for s != 0, and the
// rest factors over u = y^y' into one more transform:
//     Var(a_s) = (4/4^N)·(1/K)·FWHT[ z_u · sum_y 1/(z_y·z_(y^u)) ](s).
std::vector<double> covariance_variances(const std::vector<double> &z, uint64_t k) {
    size_t size = z.size();
    std::vector<double> weighted(size);
    for (uint64_t u = 0; u < size; u++) {
        double s = 0.0;
        for (uint64_t y = 0; y < size; y++) {
            s += 1.0 / (z[y] * z[y ^ u]);
        }
        weighted[u] = z[u] * s;
    }
    fwht_unnormalized(weighted);
    double scale = 4.0 / ((double)size * (double)size * (double)k);
    std::vector<double> var(size);
    for (size_t i = 0; i < size; i++) {
        var[i] = std::max(0.0, weighted[i] * scale);
    }
    var[0] = 0.0;
    return var;
}

}  // namespace

DemEstimate estimate_dem_exact(const DetectorHistories &data, const ExactEstimateOptions &options) {
    uint32_t n = data.num_detectors();
    if (n > options.max_detectors) {
        throw CapacityError(
            "exact inversion over " + std::to_string(n) + " detectors exceeds the cap of " +
            std::to_string(options.max_detectors) + "; use the lattice or low-weight estimators instead");
    }
    uint64_t k = data.num_shots();
    if (k == 0) {
        throw std::invalid_argument("need at least one shot");
    }
    if (options.covariance_error_bars && n > 12) {
        throw CapacityError("covariance error bars are O(4^N) and capped at N = 12");
    }

    uint64_t size = uint64_t{1} << n;
    std::vector<uint64_t> counts(size, 0);
    for (uint64_t shot = 0; shot < k; shot++) {
        counts[data.shot_words(shot)[0] & (size - 1)]++;
    }

    // Point estimate, with explicit divergence checks on every parity.
    std::vector<double> z(size);
    for (uint64_t i = 0; i < size; i++) {
        z[i] = (double)counts[i] / (double)k;
    }
    fwht_unnormalized(z);
    std::string bad;
    size_t n_bad = 0;
    for (uint64_t y = 1; y < size; y++) {
        double sigma = std::sqrt(std::max(0.0, 1.0 - z[y] * z[y]) / (double)k);
        if (!(z[y] > kDivergenceFloorSigmas * sigma)) {
            if (n_bad < 8) {
                bad += (n_bad ? ", " : "") + format_parity(n, y);
            }
            n_bad++;
        }
    }
    if (n_bad) {
        throw EstimationError(
            std::to_string(n_bad) + " parity polarization(s) are statistically indistinguishable from zero (" + bad +
            (n_bad > 8 ? ", ..." : "") + "); exact inversion cannot proceed. Use the aggregated or sparse estimators.");
    }
    std::vector<double> a;
    attenuations_from_counts(counts, k, a);

    // Error bars: sigma of the attenuations, either bootstrapped or
    // propagated; probabilities get the Jacobian factor exp(-a)/2.
    std::vector<double> sigma_a(size, 0.0);
    if (options.covariance_error_bars) {
        std::vector<double> var = covariance_variances(z, k);
        for (uint64_t s = 0; s < size; s++) {
            sigma_a[s] = std::sqrt(var[s]);
        }
    } else {
        uint32_t b = options.bootstrap_resamples;
        if (b < 2) {
            throw std::invalid_argument("need at least 2 bootstrap resamples");
        }
        std::vector<double> sum(size, 0.0), sum_sq(size, 0.0), resampled;
        uint32_t used = 0;
        for (uint32_t r = 0; r < b; r++) {
            RngStream rng(mix_seed(options.seed, 0x65786163), r);
            std::vector<uint64_t> boot_counts = resample_counts(counts, k, rng);
            if (!attenuations_from_counts(boot_counts, k, resampled)) {
                continue;  // resample diverged; skip it
            }
            used++;
            for (uint64_t s = 0; s < size; s++) {
                sum[s] += resampled[s];
                sum_sq[s] += resampled[s] * resampled[s];
            }
        }
        if (used < b / 2 || used < 2) {
            throw EstimationError("more than half of the bootstrap resamples diverged; estimate is unstable");
        }
        for (uint64_t s = 0; s < size; s++) {
            double mean = sum[s] / used;
            sigma_a[s] = std::sqrt(std::max(0.0, (sum_sq[s] - used * mean * mean) / (used - 1)));
        }
    }

    std::vector<DemEvent> events;
    for (uint64_t s = 1; s < size; s++) {
        EstimateWithError att{a[s], sigma_a[s], false};
        if (!is_significant(att, options.z_threshold)) {
            continue;
        }
        events.push_back({EventMask::from_integer(n, s), -std::expm1(-a[s]) / 2.0});
    }
    DemEstimate result{Dem(n, std::move(events)), {}, {}};
    // The Dem sorts its events in mask dictionary order, which is not
    // integer order; realign the error bars with the sorted list.
    for (const DemEvent &e : result.dem.events()) {
        uint64_t s = e.mask.to_integer();
        double jac = std::exp(-a[s]) / 2.0;
        result.attenuations.push_back({a[s], sigma_a[s], false});
        result.probabilities.push_back({e.probability, sigma_a[s] * jac, false});
    }
    return result;
}

}  // namespace demest
