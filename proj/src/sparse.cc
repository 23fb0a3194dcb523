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

#include "demest/sparse.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <Eigen/Dense>

#include "demest/errors.h"

namespace demest {

namespace {

using IndexSet = std::vector<uint32_t>;

std::string index_set_str(const IndexSet &set) {
    std::string out = "{";
    for (size_t i = 0; i < set.size(); i++) {
        out += (i ? "," : "") + std::to_string(set[i]);
    }
    return out + "}";
}

/// Advances a strictly increasing w-subset of 0..n-1 in lexicographic order.
bool next_index_set(IndexSet &set, uint32_t n) {
    uint32_t w = (uint32_t)set.size();
    for (uint32_t i = w; i-- > 0;) {
        if (set[i] < n - w + i) {
            set[i]++;
            for (uint32_t j = i + 1; j < w; j++) {
                set[j] = set[j - 1] + 1;
            }
            return true;
        }
    }
    return false;
}

bool is_strict_subset(const IndexSet &a, const IndexSet &b) {
    if (a.size() >= b.size()) {
        return false;
    }
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

struct IndexSetHash {
    size_t operator()(const IndexSet &set) const {
        uint64_t h = 0x9e3779b97f4a7c15ull * (set.size() + 1);
        for (uint32_t i : set) {
            uint64_t x = h ^ (i + 0x9e3779b97f4a7c15ull);
            x ^= x >> 30;
            x *= 0xbf58476d1ce4e5b9ull;
            x ^= x >> 27;
            x *= 0x94d049bb133111ebull;
            x ^= x >> 31;
            h = x;
        }
        return (size_t)h;
    }
};

uint64_t binomial_capped(uint64_t n, uint64_t k, uint64_t cap) {
    if (k > n) {
        return 0;
    }
    boost::multiprecision::cpp_int c = 1;
    for (uint64_t i = 1; i <= k; i++) {
        c = c * (n - k + i) / i;
        if (c > cap) {
            return cap;
        }
    }
    return (uint64_t)c;
}

}  // namespace

boost::multiprecision::cpp_int count_low_weight(uint32_t num_detectors, uint32_t w_max) {
    if (num_detectors < 1 || w_max < 1 || w_max > num_detectors) {
        throw std::out_of_range("need 1 <= w_max <= num_detectors");
    }
    // Stars-and-bars count of the weight 1..w_max strings: each prefix
    // product below is itself a binomial coefficient, so the division is
    // exact at every step.
    uint64_t n = (uint64_t)num_detectors + w_max - 1;
    boost::multiprecision::cpp_int c = 1;
    for (uint64_t i = 1; i <= w_max; i++) {
        c = c * (n - w_max + i) / i;
    }
    return c;
}

std::map<EventMask, EstimateWithError> solve_selected_events(
    const std::map<EventMask, EstimateWithError> &omegas,
    const std::vector<EventMask> &events) {
    if (events.empty()) {
        return {};
    }
    if (events.size() > omegas.size()) {
        throw std::invalid_argument(
            "cannot determine " + std::to_string(events.size()) + " events from " + std::to_string(omegas.size()) + " depolarizations");
    }
    uint32_t n = events[0].num_bits();
    for (const EventMask &s : events) {
        if (s.num_bits() != n) {
            throw std::invalid_argument("event masks have mixed widths");
        }
    }
    size_t rows = omegas.size();
    size_t cols = events.size();
    std::vector<const EventMask *> parities;
    parities.reserve(rows);
    Eigen::VectorXd omega(rows);
    Eigen::VectorXd variance(rows);
    size_t r = 0;
    for (const auto &[parity, est] : omegas) {
        if (parity.num_bits() != n) {
            throw std::invalid_argument("parity masks and event masks have mixed widths");
        }
        if (est.divergent) {
            throw std::invalid_argument("divergent depolarization at parity " + parity.str() + "; drop it before solving");
        }
        parities.push_back(&parity);
        omega(r) = est.value;
        variance(r) = est.std_error * est.std_error;
        r++;
    }

    Eigen::MatrixXd w(rows, cols);
    for (size_t y = 0; y < rows; y++) {
        for (size_t s = 0; s < cols; s++) {
            w(y, s) = mask_dot(*parities[y], events[s]) ? 1.0 : 0.0;
        }
    }

    // Cheap, nameable failure modes before the generic rank test.
    std::map<std::vector<bool>, size_t> seen_columns;
    for (size_t s = 0; s < cols; s++) {
        std::vector<bool> column(rows);
        bool any = false;
        for (size_t y = 0; y < rows; y++) {
            column[y] = w(y, s) != 0.0;
            any |= column[y];
        }
        if (!any) {
            throw IdentifiabilityError("event " + events[s].str() + " flips none of the supplied parities");
        }
        auto [it, inserted] = seen_columns.emplace(std::move(column), s);
        if (!inserted) {
            throw IdentifiabilityError(
                "events " + events[it->second].str() + " and " + events[s].str() + " act identically on the supplied parities");
        }
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd &sv = svd.singularValues();
    double tol = (double)std::max(rows, cols) * std::numeric_limits<double>::epsilon() * sv(0);
    size_t rank = 0;
    while (rank < (size_t)sv.size() && sv(rank) > tol) {
        rank++;
    }
    if (rank < cols) {
        const Eigen::MatrixXd &v = svd.matrixV();
        std::string names;
        for (size_t s = 0; s < cols; s++) {
            double in_kernel = 0.0;
            for (size_t k = rank; k < cols; k++) {
                in_kernel += v(s, k) * v(s, k);
            }
            if (in_kernel > 1e-12) {
                names += (names.empty() ? "" : ", ") + events[s].str();
            }
        }
        throw IdentifiabilityError("events not identifiable from the supplied parities: " + names);
    }

    // a = V diag(1/sv) U^T omega; the same map, squared, carries the input
    // variances onto the solution (treating the omegas as independent).
    Eigen::MatrixXd pinv =
        svd.matrixV() * sv.head(rank).cwiseInverse().asDiagonal() * svd.matrixU().leftCols(rank).transpose();
    Eigen::VectorXd a = pinv * omega;
    Eigen::VectorXd var = pinv.cwiseAbs2() * variance;

    std::map<EventMask, EstimateWithError> result;
    for (size_t s = 0; s < cols; s++) {
        result[events[s]] = {a(s), std::sqrt(var(s)), false};
    }
    return result;
}

std::map<IndexSet, EstimateWithError> low_weight_attenuations(
    const PolarizationSource &source, uint32_t w_max, const LowWeightOptions &options) {
    uint32_t n = source.num_detectors();
    if (w_max < 1 || w_max > n) {
        throw std::out_of_range("need 1 <= w_max <= num_detectors");
    }
    uint64_t total = 0;
    for (uint32_t k = 1; k <= w_max; k++) {
        total += binomial_capped(n, k, options.max_classes);
        if (total > options.max_classes) {
            throw CapacityError(
                "more than " + std::to_string(options.max_classes) + " classes of weight <= " + std::to_string(w_max) + "; lower w_max or raise max_classes");
        }
    }

    std::map<IndexSet, EstimateWithError> result;
    for (uint32_t w = w_max; w >= 1; w--) {
        IndexSet set(w);
        for (uint32_t i = 0; i < w; i++) {
            set[i] = i;
        }
        do {
            EstimateWithError est =
                class_attenuation_estimate(source, EventClass::all_ones(set), options.bootstrap);
            double value = est.value;
            bool divergent = est.divergent;
            // Every strict superset up to w_max is already finished; what is
            // left after subtracting them is this set's own event.
            IndexSet complement;
            complement.reserve(n - w);
            for (uint32_t i = 0; i < n; i++) {
                if (!std::binary_search(set.begin(), set.end(), i)) {
                    complement.push_back(i);
                }
            }
            for (uint32_t extra = 1; extra <= w_max - w; extra++) {
                IndexSet pick(extra);
                for (uint32_t i = 0; i < extra; i++) {
                    pick[i] = i;
                }
                do {
                    IndexSet superset(set);
                    for (uint32_t i : pick) {
                        superset.push_back(complement[i]);
                    }
                    std::sort(superset.begin(), superset.end());
                    const EstimateWithError &sup = result.at(superset);
                    value -= sup.value;
                    divergent |= sup.divergent;
                } while (next_index_set(pick, (uint32_t)complement.size()));
            }
            // The direct estimate's std error is kept through the
            // subtraction; the terms share shots, so adding them in
            // quadrature would overstate the noise.
            result[set] = divergent ? EstimateWithError::make_divergent(value)
                                    : EstimateWithError{value, est.std_error, false};
        } while (next_index_set(set, n));
    }
    return result;
}

std::map<IndexSet, EstimateWithError> low_weight_attenuations(
    const DetectorHistories &data, uint32_t w_max, const LowWeightOptions &options) {
    return low_weight_attenuations(EmpiricalPolarizations(data), w_max, options);
}

EstimateWithError low_weight_attenuation_recursive(
    const PolarizationSource &source,
    const IndexSet &indices,
    uint32_t w_max,
    const BootstrapOptions &bootstrap) {
    uint32_t n = source.num_detectors();
    if (indices.empty() || indices.size() > w_max || w_max > n) {
        throw std::out_of_range("need 1 <= |indices| <= w_max <= num_detectors");
    }
    EstimateWithError est = class_attenuation_estimate(source, EventClass::all_ones(indices), bootstrap);
    uint32_t w = (uint32_t)indices.size();
    if (w == w_max) {
        return est;
    }
    double value = est.value;
    bool divergent = est.divergent;
    IndexSet complement;
    for (uint32_t i = 0; i < n; i++) {
        if (!std::binary_search(indices.begin(), indices.end(), i)) {
            complement.push_back(i);
        }
    }
    for (uint32_t extra = 1; extra <= w_max - w; extra++) {
        IndexSet pick(extra);
        for (uint32_t i = 0; i < extra; i++) {
            pick[i] = i;
        }
        do {
            IndexSet superset(indices);
            for (uint32_t i : pick) {
                superset.push_back(complement[i]);
            }
            std::sort(superset.begin(), superset.end());
            EstimateWithError sup = low_weight_attenuation_recursive(source, superset, w_max, bootstrap);
            value -= sup.value;
            divergent |= sup.divergent;
        } while (next_index_set(pick, (uint32_t)complement.size()));
    }
    return divergent ? EstimateWithError::make_divergent(value)
                     : EstimateWithError{value, est.std_error, false};
}

size_t ClassLattice::num_stored() const {
    size_t total = 0;
    for (const auto &level : levels) {
        total += level.size();
    }
    return total;
}

namespace {

/// Evaluates one level's candidates, sharded over threads; results land in
/// candidate order, so the merge (and everything downstream) is identical
/// for any thread count.
std::vector<EstimateWithError> evaluate_candidates(
    const PolarizationSource &source,
    const std::vector<IndexSet> &candidates,
    const PruneOptions &options) {
    std::vector<EstimateWithError> results(candidates.size());
    auto worker = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; i++) {
            results[i] = class_attenuation_estimate(source, EventClass::all_ones(candidates[i]), options.bootstrap);
        }
    };
    size_t threads = std::max<uint32_t>(1, options.num_threads);
    threads = std::min(threads, candidates.size());
    if (threads <= 1) {
        worker(0, candidates.size());
    } else {
        std::vector<std::thread> pool;
        for (size_t t = 0; t < threads; t++) {
            size_t begin = candidates.size() * t / threads;
            size_t end = candidates.size() * (t + 1) / threads;
            pool.emplace_back(worker, begin, end);
        }
        for (std::thread &t : pool) {
            t.join();
        }
    }
    return results;
}

}  // namespace

ClassLattice prune_lattice(
    const PolarizationSource &source,
    uint32_t w_max,
    double z_threshold,
    const PruneOptions &options) {
    uint32_t n = source.num_detectors();
    if (w_max < 1) {
        throw std::out_of_range("w_max must be at least 1");
    }
    w_max = std::min(w_max, n);

    ClassLattice lattice;
    lattice.num_detectors = n;
    lattice.max_weight = w_max;
    lattice.z_threshold = z_threshold;
    lattice.zero_tolerance = options.zero_tolerance;
    lattice.levels.resize(w_max);

    auto significant = [&](const EstimateWithError &est) {
        return is_significant(est, z_threshold) && est.value > options.zero_tolerance;
    };
    auto run_level = [&](uint32_t w, const std::vector<IndexSet> &candidates) {
        std::vector<EstimateWithError> results = evaluate_candidates(source, candidates, options);
        lattice.num_evaluations += candidates.size();
        for (size_t i = 0; i < candidates.size(); i++) {
            if (significant(results[i])) {
                lattice.levels[w - 1].emplace(candidates[i], results[i]);
            } else {
                lattice.pruned.emplace(candidates[i], results[i].divergent);
            }
        }
    };

    std::vector<IndexSet> candidates;
    for (uint32_t i = 0; i < n; i++) {
        candidates.push_back({i});
    }
    run_level(1, candidates);

    std::vector<uint32_t> alive;
    for (const auto &[set, est] : lattice.levels[0]) {
        alive.push_back(set[0]);
    }
    if (w_max >= 2 && !alive.empty()) {
        candidates.clear();
        for (size_t a = 0; a < alive.size(); a++) {
            for (size_t b = a + 1; b < alive.size(); b++) {
                candidates.push_back({alive[a], alive[b]});
            }
        }
        run_level(2, candidates);
    }

    for (uint32_t w = 3; w <= w_max; w++) {
        const auto &below = lattice.levels[w - 2];
        if (below.empty()) {
            break;
        }
        candidates.clear();
        if (w == 3) {
            // Triangles in the pair graph: walk each edge {i,j} and intersect
            // the neighbor lists, keeping k > j to emit each once.
            std::vector<std::vector<uint32_t>> adjacent(n);
            for (const auto &[pair, est] : below) {
                adjacent[pair[0]].push_back(pair[1]);
                adjacent[pair[1]].push_back(pair[0]);
            }
            for (auto &list : adjacent) {
                std::sort(list.begin(), list.end());
            }
            for (const auto &[pair, est] : below) {
                const auto &ai = adjacent[pair[0]];
                const auto &aj = adjacent[pair[1]];
                std::vector<uint32_t> common;
                std::set_intersection(ai.begin(), ai.end(), aj.begin(), aj.end(), std::back_inserter(common));
                for (uint32_t k : common) {
                    if (k > pair[1]) {
                        candidates.push_back({pair[0], pair[1], k});
                    }
                }
            }
        } else {
            // Hypercliques: extend each (w-1)-set by a larger surviving
            // detector, then insist every facet survived too.
            std::unordered_set<IndexSet, IndexSetHash> stored(below.size());
            for (const auto &[set, est] : below) {
                stored.insert(set);
            }
            for (const auto &[set, est] : below) {
                for (uint32_t d : alive) {
                    if (d <= set.back()) {
                        continue;
                    }
                    IndexSet candidate(set);
                    candidate.push_back(d);
                    bool all_present = true;
                    IndexSet facet(candidate.begin() + 1, candidate.end());
                    for (size_t skip = 0; all_present && skip + 1 < candidate.size(); skip++) {
                        // facet = candidate minus element `skip`; the last
                        // facet (minus d) is `set` itself, already stored.
                        all_present = stored.count(facet) > 0;
                        facet[skip] = candidate[skip];
                    }
                    if (all_present) {
                        candidates.push_back(std::move(candidate));
                    }
                }
            }
            std::sort(candidates.begin(), candidates.end());
        }
        if (candidates.empty()) {
            break;
        }
        run_level(w, candidates);
    }
    return lattice;
}

ClassLattice prune_lattice(
    const DetectorHistories &data,
    uint32_t w_max,
    double z_threshold,
    const PruneOptions &options) {
    return prune_lattice(EmpiricalPolarizations(data), w_max, z_threshold, options);
}

void write_lattice_report(std::ostream &out, const ClassLattice &lattice) {
    char line[160];
    for (const auto &level : lattice.levels) {
        for (const auto &[set, est] : level) {
            std::string indices;
            for (uint32_t i : set) {
                indices += (indices.empty() ? "D" : " D") + std::to_string(i);
            }
            std::snprintf(line, sizeof line, " a=%.9g sigma=%.3g\n", est.value, est.std_error);
            out << indices << line;
        }
    }
}

ExtractionResult extract_events(const ClassLattice &lattice) {
    if (lattice.num_detectors == 0) {
        throw std::invalid_argument("lattice was not constructed by prune_lattice");
    }
    std::map<IndexSet, EstimateWithError> stored;
    for (const auto &level : lattice.levels) {
        stored.insert(level.begin(), level.end());
    }

    std::map<IndexSet, EstimateWithError> attenuations;
    std::vector<std::string> warnings;
    std::vector<DemEvent> events;
    while (!stored.empty()) {
        // Lexicographically first class with no stored strict superset.
        auto chosen = stored.end();
        for (auto it = stored.begin(); it != stored.end() && chosen == stored.end(); ++it) {
            bool maximal = true;
            for (auto up = stored.begin(); up != stored.end() && maximal; ++up) {
                maximal = !is_strict_subset(it->first, up->first);
            }
            if (maximal) {
                chosen = it;
            }
        }
        IndexSet set = chosen->first;
        EstimateWithError est = chosen->second;
        stored.erase(chosen);

        attenuations[set] = est;
        if (est.value < 0.0) {
            warnings.push_back(
                "class " + index_set_str(set) + " kept a negative attenuation " + std::to_string(est.value) + "; the data contradicts a weight <= " + std::to_string(lattice.max_weight) + " model and this event was left out of the DEM");
        } else {
            events.push_back({EventMask::from_indices(lattice.num_detectors, set),
                              attenuation_to_prob(est.value)});
        }

        // Peel this event off every remaining subset.
        uint32_t w = (uint32_t)set.size();
        for (uint64_t bits = 1; bits + 1 < (uint64_t{1} << w); bits++) {
            IndexSet subset;
            for (uint32_t i = 0; i < w; i++) {
                if (bits >> i & 1) {
                    subset.push_back(set[i]);
                }
            }
            auto it = stored.find(subset);
            if (it == stored.end()) {
                continue;
            }
            it->second.value -= est.value;
            double v = it->second.value;
            double sigma = it->second.std_error;
            if (is_significant(it->second, lattice.z_threshold) && v > lattice.zero_tolerance) {
                continue;
            }
            if (v < -std::max(3.0 * sigma, lattice.zero_tolerance)) {
                // Beyond noise: keep it; it will surface as a flagged event.
                warnings.push_back(
                    "model misfit: class " + index_set_str(subset) + " fell to " + std::to_string(v) + " after subtracting " + index_set_str(set));
                continue;
            }
            if (v < -lattice.zero_tolerance) {
                warnings.push_back(
                    "class " + index_set_str(subset) + " fell slightly negative (" + std::to_string(v) + ") after subtracting " + index_set_str(set) + "; floored to zero");
            }
            stored.erase(it);
        }
    }
    return {Dem(lattice.num_detectors, events), std::move(attenuations), std::move(warnings)};
}

}  // namespace demest
