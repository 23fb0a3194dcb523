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

#ifndef DEMEST_AGGREGATED_H
#define DEMEST_AGGREGATED_H

#include <cstdint>

#include "demest/dem.h"
#include "demest/polarization_source.h"

namespace demest {

struct BootstrapOptions {
    uint32_t resamples = 100;
    uint64_t seed = 0;
};

/// The aggregated attenuation of a class over k fixed detectors needs only
/// the 2^k - 1 depolarizations supported on those detectors:
///
///     a_class = -(2/2^k) · sum_{u in {0,1}^k} (-1)^(u·v) · omega_u
///
/// where v is the class's fixed values. This is the whole-model inversion
/// shrunk onto k bits; it is exact no matter what the other N-k detectors
/// are doing. Requires at least one fixed value of 1 (the complementary
/// classes have no known efficient estimator) and k <= 20.
///
/// Error bars come from a shot-level bootstrap, run as a multinomial
/// resample of the k-bit substring histogram (recovered exactly from the
/// 2^k polarizations); zero for exact sources. A divergent component
/// depolarization flags the whole result.
EstimateWithError class_attenuation_estimate(
    const PolarizationSource &source,
    const EventClass &cls,
    const BootstrapOptions &bootstrap = {});
EstimateWithError class_attenuation_estimate(
    const DetectorHistories &data,
    const EventClass &cls,
    const BootstrapOptions &bootstrap = {});

/// The two-detector special case in its classic form:
///
///     p = 1/2 - 1/2·sqrt( <z_i>·<z_j> / <z_i z_j> )
///
/// This is the aggregated probability of ALL events flipping both i and j,
/// and equals attenuation_to_prob(class_attenuation_estimate({i,j}=[11])).
/// Error bars by linear propagation of the three-parity covariance.
/// A nonpositive <z_i z_j> or radicand flags divergence; a radicand above 1
/// yields a negative value, reported as-is (callers may clamp).
EstimateWithError pij(const PolarizationSource &source, uint32_t i, uint32_t j);
EstimateWithError pij(const DetectorHistories &data, uint32_t i, uint32_t j);

struct McConfig {
    uint64_t n_samples = 256;
    uint64_t seed = 0;
};

/// Monte Carlo estimate plus how many draws hit divergent depolarizations.
/// Above a 10% divergent fraction the estimate itself is divergence-flagged
/// (high-weight parities decohering is this estimator's failure mode, and it
/// should be loud about it).
struct McResult {
    EstimateWithError estimate;
    uint64_t n_divergent = 0;
    double divergent_fraction = 0.0;
};

/// a_s = 2·< (-1)^(y·s + 1) · omega_y > over uniformly random parities y
/// (the all-zero string included). The reported std_error combines the
/// y-sampling variance (bootstrap over draws) with the shot-noise covariance
/// shared between draws, which the draw bootstrap alone cannot see.
McResult mc_event_attenuation(const PolarizationSource &source, const EventMask &s, const McConfig &cfg);
McResult mc_event_attenuation(const DetectorHistories &data, const EventMask &s, const McConfig &cfg);

/// a_0 = sum_s a_s = 2·<omega_y> over uniformly random parities.
McResult mc_total_attenuation(const PolarizationSource &source, const McConfig &cfg);
McResult mc_total_attenuation(const DetectorHistories &data, const McConfig &cfg);

/// Test mode: the same averages over ALL 2^N parities, which degenerate to
/// the exact inversion formulas. Throws on any divergent depolarization.
double mc_event_attenuation_exhaustive(const PolarizationSource &source, const EventMask &s);
double mc_total_attenuation_exhaustive(const PolarizationSource &source);

}  // namespace demest

#endif
