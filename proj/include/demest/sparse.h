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

#ifndef DEMEST_SPARSE_H
#define DEMEST_SPARSE_H

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "demest/aggregated.h"
#include "demest/dem.h"
#include "demest/polarization_source.h"

namespace demest {

/// Number of nonzero bit strings of weight at most w_max over N detectors
/// counted the multiset way, binom(N + w_max - 1, w_max); the size of the
/// search space a weight-limited estimator must beat. Exact at any N.
boost::multiprecision::cpp_int count_low_weight(uint32_t num_detectors, uint32_t w_max);

/// Solves the restriction of omega = W·a to chosen rows (parities) and
/// columns (candidate events): W'_{y,s} = y·s, least squares when
/// overdetermined. Error bars propagate the omegas' std errors through the
/// pseudoinverse, treating them as independent (diagonal approximation).
///
/// Throws IdentifiabilityError naming the offending events when the columns
/// do not separate them (duplicate columns, an event invisible to every
/// supplied parity, or any other rank deficiency); std::invalid_argument on
/// divergent inputs or |events| > |omegas|.
std::map<EventMask, EstimateWithError> solve_selected_events(
    const std::map<EventMask, EstimateWithError> &omegas,
    const std::vector<EventMask> &events);

struct LowWeightOptions {
    BootstrapOptions bootstrap;
    /// Refuse (CapacityError) if the number of weight <= w_max index-sets
    /// exceeds this.
    uint64_t max_classes = 1u << 22;
};

/// The closed-form estimator under the assumption that every event has
/// weight <= w_max: at the top weight the aggregated class attenuation IS
/// the event attenuation; below that, subtract the already-finished strict
/// supersets. Returns an entry for every index-set of weight 1..w_max.
/// Divergence in a class flags that entry (and entries subtracting it), not
/// the whole run.
std::map<std::vector<uint32_t>, EstimateWithError> low_weight_attenuations(
    const PolarizationSource &source, uint32_t w_max, const LowWeightOptions &options = {});
std::map<std::vector<uint32_t>, EstimateWithError> low_weight_attenuations(
    const DetectorHistories &data, uint32_t w_max, const LowWeightOptions &options = {});

/// Space-lean variant of the above for a single index-set: recomputes
/// superset attenuations on the fly instead of caching a full level. Matches
/// low_weight_attenuations exactly; exponentially slower, for cross-checks.
EstimateWithError low_weight_attenuation_recursive(
    const PolarizationSource &source,
    const std::vector<uint32_t> &indices,
    uint32_t w_max,
    const BootstrapOptions &bootstrap = {});

/// The pruned inclusion lattice of all-ones classes. levels[w-1] maps
/// weight-w index-sets to their aggregated attenuation estimates; an
/// index-set lands in `pruned` (value: was it divergence-flagged rather
/// than merely insignificant) when evaluated and found empty, and none of
/// its supersets are ever stored or evaluated.
struct ClassLattice {
    uint32_t num_detectors = 0;
    uint32_t max_weight = 0;
    double z_threshold = kDefaultSignificanceZ;
    double zero_tolerance = 0.0;
    std::vector<std::map<std::vector<uint32_t>, EstimateWithError>> levels;
    std::map<std::vector<uint32_t>, bool> pruned;
    /// Number of class estimates computed; the work-bound diagnostic.
    uint64_t num_evaluations = 0;

    size_t num_stored() const;
};

struct PruneOptions {
    BootstrapOptions bootstrap;
    /// Attenuations at or below this are "zero" even when the std error is
    /// zero; only bites for exact polarization sources.
    double zero_tolerance = 1e-12;
    uint32_t num_threads = 1;
};

/// Level-wise search: singles, then pairs among surviving detectors, then
/// only those w-sets whose (w-1)-subsets all survived (triangle enumeration
/// at level 3, subset hashing above). A class is stored when its attenuation
/// estimate clears z_threshold std errors; divergent estimates count as
/// empty. Deterministic for any num_threads.
ClassLattice prune_lattice(
    const PolarizationSource &source,
    uint32_t w_max,
    double z_threshold = kDefaultSignificanceZ,
    const PruneOptions &options = {});
ClassLattice prune_lattice(
    const DetectorHistories &data,
    uint32_t w_max,
    double z_threshold = kDefaultSignificanceZ,
    const PruneOptions &options = {});

/// One line per stored class: indices, attenuation, std error.
void write_lattice_report(std::ostream &out, const ClassLattice &lattice);

/// extract_events output. Attenuations beyond repair (negative past 3 std
/// errors after subtraction: the data contradicts the weight <= w_max model)
/// stay in `attenuations` with a warning but are left out of the Dem, which
/// cannot hold a negative probability.
struct ExtractionResult {
    Dem dem;
    std::map<std::vector<uint32_t>, EstimateWithError> attenuations;
    std::vector<std::string> warnings;
};

/// Peels the lattice: repeatedly emit the lexicographically first stored
/// class with no stored strict superset as a DEM event, subtract its
/// attenuation from every stored strict subset, and drop subsets that fall
/// below significance (small negatives are floored; large ones are kept and
/// flagged, see ExtractionResult).
ExtractionResult extract_events(const ClassLattice &lattice);

}  // namespace demest

#endif
