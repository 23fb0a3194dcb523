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

#ifndef DEMEST_EXACT_INVERSION_H
#define DEMEST_EXACT_INVERSION_H

#include <cstdint>
#include <vector>

#include "demest/dem.h"
#include "demest/histories.h"
#include "demest/sampling.h"
#include "demest/statistics.h"

namespace demest {

// The small-N exact machinery. A model's depolarizations are linear in its
// attenuations, omega_y = sum over events s with y·s odd of a_s, and that
// map is diagonalized by the Walsh-Hadamard transform. Inverting it turns
// 2^N measured depolarizations into all 2^N - 1 event attenuations at once:
//
//     distribution -> polarizations -> depolarizations -> attenuations
//
// with one transform on each side of a pointwise -ln.

enum class SpectrumKind { polarization, depolarization, attenuation };

/// 2^N reals indexed by mask-as-integer. Polarization vectors have
/// entry[0] = 1; depolarization and attenuation vectors have entry[0] = 0
/// and all entries finite (divergence is handled before building one).
struct SpectrumVector {
    uint32_t num_detectors;
    SpectrumKind kind;
    std::vector<double> entries;

    SpectrumVector(uint32_t num_detectors, SpectrumKind kind);
};

/// entry[y] = sum_x (-1)^(x·y) P(x); one unnormalized transform.
SpectrumVector polarizations_from_distribution(const Distribution &dist);

/// Pointwise -ln. Exact-pipeline variant: any nonpositive entry throws,
/// naming the offending parities (sampled data goes through
/// estimate_dem_exact, which flags instead).
SpectrumVector depolarizations_from_polarizations(const SpectrumVector &z);

/// The inversion result: a_s = -(2/2^N)·sum_y (-1)^(y·s)·omega_y for s != 0,
/// entry[0] forced to 0 (the all-zero "event" is unobservable and projected
/// out by the pseudoinverse).
SpectrumVector attenuations_from_depolarizations(const SpectrumVector &omega);

/// Forward map omega_y = sum_{s: y·s odd} a_s; round-trips with the above.
SpectrumVector depolarizations_from_attenuations(const SpectrumVector &a);

/// Total attenuation a_0 = sum_s a_s = 2·mean(omega) over all 2^N parities.
double total_attenuation_exact(const SpectrumVector &omega);

struct ExactEstimateOptions {
    double z_threshold = kDefaultSignificanceZ;
    uint32_t max_detectors = kDefaultDistributionCap;
    /// Shot-level bootstrap resamples for the error bars (done as a
    /// multinomial resample of the 2^N-cell histogram, which is the exact
    /// same distribution as resampling the K shots).
    uint32_t bootstrap_resamples = 100;
    uint64_t seed = 0;
    /// Alternative error bars: linear propagation of the full depolarization
    /// covariance through the inversion (N <= 12; O(4^N) work).
    bool covariance_error_bars = false;
};

/// An estimated model together with per-event error bars (aligned with
/// dem.events()).
struct DemEstimate {
    Dem dem;
    std::vector<EstimateWithError> probabilities;
    std::vector<EstimateWithError> attenuations;
};

/// The full exact-inversion pipeline on sampled data: histogram, transform,
/// -ln with divergence flagging, inverse transform, significance filter.
/// Any divergent parity aborts with an error naming the parities (every
/// attenuation depends on every depolarization, so no event survives a
/// divergent entry cleanly); the aggregated/sparse estimators are the tool
/// for that regime.
DemEstimate estimate_dem_exact(const DetectorHistories &data, const ExactEstimateOptions &options = {});

}  // namespace demest

#endif
