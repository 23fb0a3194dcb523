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

#include "demest/sampling.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>

#include "demest/errors.h"
#include "demest/rng.h"

namespace demest {

Distribution::Distribution(uint32_t num_detectors) : num_detectors(num_detectors) {
    if (num_detectors < 1 || num_detectors > 30) {
        throw std::invalid_argument("distribution needs num_detectors in 1..30");
    }
    weights.assign(uint64_t{1} << num_detectors, 0.0);
}

namespace {

struct EventRun {
    size_t begin;
    size_t end;
    double probability;
};

// Maximal runs of consecutive equal-probability events (zero-probability
// runs dropped entirely).
std::vector<EventRun> make_runs(const Dem &dem) {
    std::vector<EventRun> runs;
    const auto &events = dem.events();
    size_t i = 0;
    while (i < events.size()) {
        size_t j = i + 1;
        while (j < events.size() && events[j].probability == events[i].probability) {
            j++;
        }
        if (events[i].probability > 0.0) {
            runs.push_back({i, j, events[i].probability});
        }
        i = j;
    }
    return runs;
}

void sample_range(
    const Dem &dem,
    const std::vector<EventRun> &runs,
    DetectorHistories &out,
    uint64_t seed,
    uint64_t shot_begin,
    uint64_t shot_end) {
    uint32_t words = out.words_per_shot();
    const auto &events = dem.events();
    for (uint64_t shot = shot_begin; shot < shot_end; shot++) {
        RngStream rng(seed, shot);
        auto row = out.shot_words(shot);
        for (const EventRun &run : runs) {
            size_t len = run.end - run.begin;
            uint64_t pos = rng.geometric(run.probability);
            while (pos < len) {
                const uint64_t *mask = events[run.begin + pos].mask.words();
                for (uint32_t w = 0; w < words; w++) {
                    row[w] ^= mask[w];
                }
                pos += 1 + rng.geometric(run.probability);
            }
        }
    }
}

uint64_t uniform_below(RngStream &rng, uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        uint64_t x = rng();
        if (x >= threshold) {
            return x % bound;
        }
    }
}

// Binomial coefficient saturating at 2^63 (plenty for feasibility checks).
uint64_t binomial_saturating(uint64_t n, uint64_t k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    constexpr uint64_t cap = uint64_t{1} << 63;
    uint64_t result = 1;
    for (uint64_t i = 1; i <= k; i++) {
        if (result > cap / (n - k + i)) {
            return cap;
        }
        result = result * (n - k + i) / i;
    }
    return std::min(result, cap);
}

}  // namespace

DetectorHistories sample_histories(const Dem &dem, uint64_t num_shots, uint64_t seed, uint32_t num_threads) {
    DetectorHistories out(dem.num_detectors(), num_shots);
    std::vector<EventRun> runs = make_runs(dem);
    if (num_threads <= 1 || num_shots < 2 * num_threads) {
        sample_range(dem, runs, out, seed, 0, num_shots);
        return out;
    }
    std::vector<std::thread> workers;
    for (uint32_t t = 0; t < num_threads; t++) {
        uint64_t begin = num_shots * t / num_threads;
        uint64_t end = num_shots * (t + 1) / num_threads;
        workers.emplace_back([&, begin, end] {
            sample_range(dem, runs, out, seed, begin, end);
        });
    }
    for (auto &w : workers) {
        w.join();
    }
    return out;
}

Distribution exact_distribution(const Dem &dem, uint32_t max_detectors) {
    uint32_t n = dem.num_detectors();
    if (n > max_detectors) {
        throw CapacityError(
            "exact distribution over " + std::to_string(n) + " detectors exceeds the cap of " + std::to_string(max_detectors));
    }
    Distribution dist(n);
    dist.weights[0] = 1.0;
    uint64_t size = dist.weights.size();
    for (const DemEvent &e : dem.events()) {
        uint64_t m = e.mask.to_integer();
        double p = e.probability;
        for (uint64_t x = 0; x < size; x++) {
            uint64_t y = x ^ m;
            if (x < y) {
                double wx = dist.weights[x];
                double wy = dist.weights[y];
                dist.weights[x] = (1.0 - p) * wx + p * wy;
                dist.weights[y] = (1.0 - p) * wy + p * wx;
            }
        }
    }
    return dist;
}

Dem make_uniform_depolarizing_dem(uint32_t num_detectors, double eps) {
    if (num_detectors < 1 || num_detectors > kDefaultDistributionCap) {
        throw std::invalid_argument("num_detectors must be in 1.." + std::to_string(kDefaultDistributionCap));
    }
    double limit = std::ldexp(1.0, (int)num_detectors - 1);  // 2^(N-1)
    if (!(eps >= 0.0 && eps < limit)) {
        throw std::invalid_argument("eps must satisfy 0 <= eps < 2^(N-1)");
    }
    if (eps == 0.0) {
        return Dem(num_detectors, {});
    }
    double p = eps * std::ldexp(1.0, -(int)num_detectors);
    uint64_t count = uint64_t{1} << num_detectors;
    std::vector<DemEvent> events;
    events.reserve(count - 1);
    for (uint64_t m = 1; m < count; m++) {
        events.push_back({EventMask::from_integer(num_detectors, m), p});
    }
    return Dem(num_detectors, std::move(events));
}

Dem make_random_sparse_dem(
    uint32_t num_detectors,
    uint32_t num_events,
    uint32_t max_weight,
    double p_min,
    double p_max,
    uint64_t seed) {
    if (max_weight < 1 || max_weight > num_detectors) {
        throw std::invalid_argument("max_weight must be in 1..num_detectors");
    }
    if (!(p_min > 0.0 && p_min <= p_max && p_max < 0.5)) {
        throw std::invalid_argument("need 0 < p_min <= p_max < 1/2");
    }
    // Cumulative counts of masks by weight, for uniform choice over the
    // whole weight <= max_weight population.
    std::vector<uint64_t> cumulative(max_weight + 1, 0);
    for (uint32_t w = 1; w <= max_weight; w++) {
        uint64_t c = binomial_saturating(num_detectors, w);
        cumulative[w] = cumulative[w - 1] + std::min(c, ~cumulative[w - 1]);
    }
    uint64_t total = cumulative[max_weight];
    if (num_events > total) {
        throw std::invalid_argument(
            "cannot draw " + std::to_string(num_events) + " distinct masks; only " + std::to_string(total) + " have weight <= " + std::to_string(max_weight));
    }

    // Salted so a model generated with seed k is independent of data later
    // sampled from it with the same k.
    RngStream rng(mix_seed(seed, 0x67656e), 0);
    std::set<std::vector<uint32_t>> seen;
    std::vector<DemEvent> events;
    while (events.size() < num_events) {
        uint64_t r = uniform_below(rng, total);
        uint32_t w = 1;
        while (r >= cumulative[w]) {
            w++;
        }
        // Floyd's algorithm: uniform w-subset of {0..N-1}.
        std::set<uint32_t> picked;
        for (uint32_t j = num_detectors - w; j < num_detectors; j++) {
            uint32_t t = (uint32_t)uniform_below(rng, j + 1);
            picked.insert(picked.count(t) ? j : t);
        }
        std::vector<uint32_t> indices(picked.begin(), picked.end());
        double p = p_min + rng.uniform_double() * (p_max - p_min);
        if (seen.insert(indices).second) {
            events.push_back({EventMask::from_indices(num_detectors, indices), p});
        }
    }
    return Dem(num_detectors, std::move(events));
}

}  // namespace demest
