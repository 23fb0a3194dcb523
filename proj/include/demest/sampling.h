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

#ifndef DEMEST_SAMPLING_H
#define DEMEST_SAMPLING_H

#include <cstdint>
#include <vector>

#include "demest/dem.h"
#include "demest/histories.h"

namespace demest {

/// Probability vector over all 2^N detector histories, indexed by
/// history-as-integer (bit i of the index = detector i).
struct Distribution {
    uint32_t num_detectors = 0;
    std::vector<double> weights;

    explicit Distribution(uint32_t num_detectors);
};

/// Default ceiling for anything that materializes 2^N entries.
constexpr uint32_t kDefaultDistributionCap = 24;

/// Samples K detector histories. Each shot starts all-zero; every event
/// independently fires with its probability and XORs its mask in.
///
/// Each shot consumes its own counter-based stream derived from
/// (seed, shot index), so output is bitwise identical for any num_threads.
/// Runs of consecutive equal-probability events are advanced with geometric
/// skips, making e.g. the 2^N-1 events of a uniformly depolarizing model
/// cost O(1 + #fires) per shot instead of O(2^N).
DetectorHistories sample_histories(const Dem &dem, uint64_t num_shots, uint64_t seed, uint32_t num_threads = 1);

/// Exact distribution by applying, for every event, the stochastic map
/// L_s = (1-p)·identity + p·(XOR by s) to the delta on the all-zero history.
/// The L_s commute, so event order is irrelevant.
Distribution exact_distribution(const Dem &dem, uint32_t max_detectors = kDefaultDistributionCap);

/// The uniformly depolarizing model: every nonzero N-bit mask fires with
/// probability eps/2^N (the all-zero mask is unobservable and omitted).
/// Requires 0 <= eps < 2^(N-1) so each probability stays below 1/2.
/// eps = 0 yields an empty model (zero-probability events are pruned).
Dem make_uniform_depolarizing_dem(uint32_t num_detectors, double eps);

/// Test-fixture generator: num_events distinct masks drawn uniformly from
/// all masks of weight 1..max_weight, probabilities uniform in
/// [p_min, p_max]. Deterministic given seed.
Dem make_random_sparse_dem(
    uint32_t num_detectors,
    uint32_t num_events,
    uint32_t max_weight,
    double p_min,
    double p_max,
    uint64_t seed);

}  // namespace demest

#endif
