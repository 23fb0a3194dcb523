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

#ifndef DEMEST_STATISTICS_H
#define DEMEST_STATISTICS_H

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "demest/histories.h"

namespace demest {

/// A point estimate with a standard error. Divergent estimates (a
/// depolarization whose polarization is statistically indistinguishable from
/// zero, where sigma is effectively infinite) carry divergent = true and
/// std_error = +infinity.
struct EstimateWithError {
    double value = 0.0;
    double std_error = 0.0;
    bool divergent = false;

    static EstimateWithError make_divergent(double value = std::numeric_limits<double>::quiet_NaN()) {
        return {value, std::numeric_limits<double>::infinity(), true};
    }
};

/// A polarization within this many of its standard errors of zero cannot be
/// logged meaningfully (3/sqrt(K) floor, since sigma_z ~ 1/sqrt(K) there).
constexpr double kDivergenceFloorSigmas = 3.0;
/// Default z-score for is_significant; high because the lattice search runs
/// very many tests.
constexpr double kDefaultSignificanceZ = 5.0;

/// Empirical polarization <z_y> = (1/K)·sum_i (-1)^(x_i·y), with
/// std_error = sqrt(1 - <z>^2) / sqrt(K). The all-zero parity gives (1, 0).
EstimateWithError sample_polarization(const DetectorHistories &data, const EventMask &parity);

/// omega = -ln z with the error sigma_z/z scaled by the Jacobian. The result
/// is divergence-flagged when z <= kDivergenceFloorSigmas·sigma_z (which also
/// covers z <= 0 and sigma_omega >= 1).
EstimateWithError depolarization(const EstimateWithError &polarization);

/// Per-shot covariance matrix of the parities, row-major:
///     cov(z_a, z_b) = <z_(a^b)> - <z_a>·<z_b>.
/// (The covariance of the *means* is this divided by K.)
std::vector<double> polarization_covariance(const DetectorHistories &data, std::span<const EventMask> parities);

/// Standard deviation of `statistic` over with-replacement resamples of the
/// shots. General-purpose and O(n_resamples · cost(statistic)); the
/// estimators use specialized histogram bootstraps where speed matters.
double bootstrap_std_error(
    const DetectorHistories &data,
    const std::function<double(const DetectorHistories &)> &statistic,
    uint32_t n_resamples,
    uint64_t seed);

/// True iff est is not divergence-flagged and value > z_threshold·std_error.
bool is_significant(const EstimateWithError &est, double z_threshold = kDefaultSignificanceZ);

class RngStream;

/// One multinomial resample of a histogram (counts summing to `total`).
/// Statistically identical to resampling the underlying shots with
/// replacement, for any statistic that only looks at these cells — the
/// workhorse behind the fast bootstrap paths.
std::vector<uint64_t> resample_counts(std::span<const uint64_t> counts, uint64_t total, RngStream &rng);

}  // namespace demest

#endif
