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

#ifndef DEMEST_POLARIZATION_SOURCE_H
#define DEMEST_POLARIZATION_SOURCE_H

#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "demest/dem.h"
#include "demest/histories.h"
#include "demest/statistics.h"

namespace demest {

/// Where estimators get polarizations from: either empirical (finite shots,
/// nonzero error bars) or exact (computed from a known model, zero error
/// bars). Letting estimators run on exact polarizations is what makes their
/// algebra testable independently of sampling noise.
class PolarizationSource {
   public:
    virtual ~PolarizationSource() = default;

    virtual uint32_t num_detectors() const = 0;
    /// nullopt for exact sources.
    virtual std::optional<uint64_t> num_shots() const = 0;
    virtual EstimateWithError polarization(const EventMask &parity) const = 0;
    /// -ln of the polarization with divergence flagging.
    EstimateWithError depolarization(const EventMask &parity) const;

    /// Covariance of the polarization *estimates* (not the per-shot
    /// parities): (z_(a^b) - z_a·z_b)/K. Zero for exact sources.
    virtual double mean_covariance(const EventMask &a, const EventMask &b) const;
    /// Full matrix of the above, row-major. The empirical source overrides
    /// this with a much faster packed-column implementation.
    virtual std::vector<double> mean_covariance_matrix(std::span<const EventMask> parities) const;
};

/// Sample polarizations backed by a transposed (detector-major) copy of the
/// shots, so any parity costs weight-many column XORs plus a popcount sweep.
/// Results are cached per mask, behind a mutex so lattice workers can share
/// one instance.
class EmpiricalPolarizations final : public PolarizationSource {
   public:
    explicit EmpiricalPolarizations(const DetectorHistories &data);

    uint32_t num_detectors() const override {
        return num_detectors_;
    }
    std::optional<uint64_t> num_shots() const override {
        return num_shots_;
    }
    EstimateWithError polarization(const EventMask &parity) const override;
    std::vector<double> mean_covariance_matrix(std::span<const EventMask> parities) const override;

    /// Packed parity bits across shots: bit s = x_s·parity mod 2.
    std::vector<uint64_t> parity_column(const EventMask &parity) const;

   private:
    uint32_t num_detectors_;
    uint64_t num_shots_;
    size_t column_words_;
    std::vector<uint64_t> columns_;
    mutable std::mutex cache_mutex_;
    mutable std::unordered_map<EventMask, double, EventMaskHash> cache_;
};

/// Polarizations of a known model: z_y = prod over events with y·s odd of
/// (1 - 2p_s). Requires every probability < 1/2.
class ExactPolarizations final : public PolarizationSource {
   public:
    explicit ExactPolarizations(Dem dem);

    uint32_t num_detectors() const override {
        return dem_.num_detectors();
    }
    std::optional<uint64_t> num_shots() const override {
        return std::nullopt;
    }
    EstimateWithError polarization(const EventMask &parity) const override;

    const Dem &dem() const {
        return dem_;
    }

   private:
    Dem dem_;
    std::vector<double> decays_;
};

}  // namespace demest

#endif
