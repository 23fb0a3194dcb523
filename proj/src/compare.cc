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

#include "demest/compare.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace demest {

namespace {

double total_attenuation_or_nan(const Dem &dem) {
    double total = 0.0;
    for (const DemEvent &e : dem.events()) {
        if (e.probability >= 0.5) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        total += prob_to_attenuation(e.probability);
    }
    return total;
}

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

CompareReport compare_dems(
    const Dem &truth,
    const Dem &estimate,
    const std::unordered_map<EventMask, double, EventMaskHash> *sigmas,
    double z_factor) {
    if (truth.num_detectors() != estimate.num_detectors()) {
        throw std::invalid_argument(
            "detector counts differ: " + std::to_string(truth.num_detectors()) + " vs " + std::to_string(estimate.num_detectors()));
    }
    CompareReport report;
    report.num_detectors = truth.num_detectors();
    report.z_factor = z_factor;
    report.total_attenuation_true = total_attenuation_or_nan(truth);
    report.total_attenuation_estimated = total_attenuation_or_nan(estimate);

    // Both event lists are sorted by mask; a single merge pass buckets them.
    const auto &a = truth.events();
    const auto &b = estimate.events();
    size_t i = 0, j = 0;
    auto bump = [&](double err) {
        report.max_abs_error = std::max(report.max_abs_error, err);
    };
    while (i < a.size() || j < b.size()) {
        bool take_a = j == b.size() || (i < a.size() && a[i].mask < b[j].mask);
        bool take_b = i == a.size() || (j < b.size() && b[j].mask < a[i].mask);
        if (take_a) {
            report.missing.push_back(a[i].mask);
            bump(a[i].probability);
            i++;
        } else if (take_b) {
            report.spurious.push_back(b[j].mask);
            bump(b[j].probability);
            j++;
        } else {
            CompareRow row;
            row.mask = a[i].mask;
            row.true_p = a[i].probability;
            row.estimated_p = b[j].probability;
            row.abs_error = std::fabs(row.true_p - row.estimated_p);
            if (sigmas) {
                auto it = sigmas->find(row.mask);
                if (it != sigmas->end()) {
                    row.sigma = it->second;
                    row.within_error = row.abs_error <= z_factor * row.sigma;
                }
            }
            bump(row.abs_error);
            report.rows.push_back(row);
            i++;
            j++;
        }
    }
    return report;
}

void write_compare_report(std::ostream &out, const CompareReport &report) {
    out << "detectors=" << report.num_detectors << "\n";
    out << "matched=" << report.rows.size() << "\n";
    out << "missing=" << report.missing.size() << "\n";
    out << "spurious=" << report.spurious.size() << "\n";
    out << "max_abs_error=" << num(report.max_abs_error) << "\n";
    out << "total_attenuation_true=" << num(report.total_attenuation_true) << "\n";
    out << "total_attenuation_est=" << num(report.total_attenuation_estimated) << "\n";
    for (const CompareRow &row : report.rows) {
        out << "event=" << row.mask.str() << " true=" << num(row.true_p) << " est=" << num(row.estimated_p)
            << " abs_error=" << num(row.abs_error);
        if (row.sigma >= 0.0) {
            out << " sigma=" << num(row.sigma) << " within=" << (row.within_error ? 1 : 0);
        }
        out << "\n";
    }
    for (const EventMask &mask : report.missing) {
        out << "missing_event=" << mask.str() << "\n";
    }
    for (const EventMask &mask : report.spurious) {
        out << "spurious_event=" << mask.str() << "\n";
    }
}

}  // namespace demest
