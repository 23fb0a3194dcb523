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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "demest/aggregated.h"
#include "demest/compare.h"
#include "demest/dem.h"
#include "demest/dem_io.h"
#include "demest/errors.h"
#include "demest/exact_inversion.h"
#include "demest/histories.h"
#include "demest/sampling.h"
#include "demest/sparse.h"

namespace {

using namespace demest;

// Exit codes, kept scriptable: 0 success, 1 comparison mismatch,
// 2 usage/format error, 3 statistical impossibility.
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitStatistical = 3;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Writes to `path`, or to stdout when the path is empty or "-".
class OutputTarget {
   public:
    explicit OutputTarget(const std::string &path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) {
                throw ParseError("cannot open '" + path + "' for writing");
            }
        }
    }
    std::ostream &stream() {
        return file_.is_open() ? file_ : std::cout;
    }

   private:
    std::ofstream file_;
};

uint32_t default_threads() {
    const char *env = std::getenv("DEMEST_THREADS");
    if (!env) {
        return 1;
    }
    long value = std::strtol(env, nullptr, 10);
    return value >= 1 ? (uint32_t)value : 1;
}

struct GenArgs {
    uint32_t n = 0;
    uint32_t events = 0;
    uint32_t max_weight = 2;
    double p_min = 0.001;
    double p_max = 0.01;
    uint64_t seed = 0;
    double uniform_eps = -1.0;
    std::string out;
};

int run_gen(const GenArgs &args, bool uniform) {
    Dem dem = uniform ? make_uniform_depolarizing_dem(args.n, args.uniform_eps)
                      : make_random_sparse_dem(args.n, args.events, args.max_weight, args.p_min, args.p_max, args.seed);
    std::vector<std::string> header;
    if (uniform) {
        header.push_back("generated: uniform depolarizing, eps=" + fmt(args.uniform_eps));
    } else {
        header.push_back(
            "generated: random sparse, events=" + std::to_string(args.events) + " max_weight=" + std::to_string(args.max_weight) + " p_min=" + fmt(args.p_min) + " p_max=" + fmt(args.p_max) + " seed=" + std::to_string(args.seed));
    }
    OutputTarget out(args.out);
    write_dem(out.stream(), dem, header);
    return 0;
}

struct SampleArgs {
    std::string dem_path;
    uint64_t shots = 0;
    uint64_t seed = 0;
    std::string out;
    std::string format = "txt";
    uint32_t threads = 1;
};

int run_sample(const SampleArgs &args) {
    Dem dem = read_dem_file(args.dem_path);
    DetectorHistories data = sample_histories(dem, args.shots, args.seed, args.threads);
    ShotFormat format = args.format == "bin" ? ShotFormat::binary : ShotFormat::text;
    write_shots_file(args.out, data, format);
    return 0;
}

struct EstimateArgs {
    std::string data_path;
    std::string method = "exact";
    uint32_t wmax = 2;
    double significance = kDefaultSignificanceZ;
    uint64_t mc_samples = 256;
    uint64_t seed = 0;
    uint32_t bootstraps = 100;
    bool covariance_errors = false;
    bool clamp = false;
    std::string out;
    std::string lattice_report;
    uint32_t threads = 1;
};

std::string provenance(const EstimateArgs &args, uint64_t shots) {
    std::string line = "estimated: method=" + args.method + " shots=" + std::to_string(shots) + " data=" + args.data_path + " seed=" + std::to_string(args.seed);
    if (args.method == "exact") {
        line += " z_threshold=" + fmt(args.significance) + " bootstraps=" + std::to_string(args.bootstraps);
    } else if (args.method == "lowweight") {
        line += " wmax=" + std::to_string(args.wmax) + " z_threshold=" + fmt(args.significance) + " bootstraps=" + std::to_string(args.bootstraps);
    } else if (args.method == "lattice") {
        line += " wmax=" + std::to_string(args.wmax) + " z_threshold=" + fmt(args.significance) + " bootstraps=" + std::to_string(args.bootstraps);
    } else if (args.method == "total" || args.method == "total-attenuation") {
        line += " mc_samples=" + std::to_string(args.mc_samples);
    }
    return line;
}

int run_estimate(const EstimateArgs &args) {
    DetectorHistories data = read_shots_file(args.data_path);
    std::vector<std::string> header{provenance(args, data.num_shots())};
    OutputTarget out(args.out);

    if (args.method == "exact") {
        ExactEstimateOptions options;
        options.z_threshold = args.significance;
        options.bootstrap_resamples = args.bootstraps;
        options.seed = args.seed;
        options.covariance_error_bars = args.covariance_errors;
        DemEstimate est = estimate_dem_exact(data, options);
        std::unordered_map<EventMask, double, EventMaskHash> sigmas;
        for (size_t i = 0; i < est.dem.events().size(); i++) {
            sigmas[est.dem.events()[i].mask] = est.probabilities[i].std_error;
        }
        write_dem(out.stream(), est.dem, header, &sigmas);
        return 0;
    }
    if (args.method == "pij") {
        EmpiricalPolarizations source(data);
        uint32_t n = data.num_detectors();
        std::ostream &os = out.stream();
        os << "# " << header[0] << "\n";
        os << "detectors=" << n << "\n";
        for (uint32_t i = 0; i < n; i++) {
            // Aggregated probability of everything flipping detector i:
            // a_{i*} = omega_i, so p_{i*} = (1 - z_i)/2.
            EventMask yi(n);
            yi.set_bit(i, true);
            EstimateWithError z = source.polarization(yi);
            os << "pi_" << i << "=" << fmt(0.5 - 0.5 * z.value) << " sigma=" << fmt(0.5 * z.std_error) << "\n";
        }
        for (uint32_t i = 0; i < n; i++) {
            for (uint32_t j = i + 1; j < n; j++) {
                EstimateWithError p = pij(source, i, j);
                double value = args.clamp && p.value < 0.0 ? 0.0 : p.value;
                os << "pij_" << i << "_" << j << "=" << fmt(value);
                if (p.divergent) {
                    os << " divergent=1";
                } else {
                    os << " sigma=" << fmt(p.std_error);
                }
                os << "\n";
            }
        }
        return 0;
    }
    if (args.method == "lowweight") {
        LowWeightOptions options;
        options.bootstrap.resamples = args.bootstraps;
        options.bootstrap.seed = args.seed;
        auto attenuations = low_weight_attenuations(data, args.wmax, options);
        std::vector<DemEvent> events;
        std::unordered_map<EventMask, double, EventMaskHash> sigmas;
        for (const auto &[set, est] : attenuations) {
            if (!is_significant(est, args.significance) || est.value <= 0.0) {
                continue;
            }
            EventMask mask = EventMask::from_indices(data.num_detectors(), set);
            events.push_back({mask, attenuation_to_prob(est.value)});
            sigmas[mask] = 0.5 * std::exp(-est.value) * est.std_error;
        }
        Dem dem(data.num_detectors(), events);
        write_dem(out.stream(), dem, header, &sigmas);
        return 0;
    }
    if (args.method == "lattice") {
        PruneOptions options;
        options.bootstrap.resamples = args.bootstraps;
        options.bootstrap.seed = args.seed;
        options.num_threads = args.threads;
        ClassLattice lattice = prune_lattice(data, args.wmax, args.significance, options);
        if (!args.lattice_report.empty()) {
            OutputTarget report(args.lattice_report);
            write_lattice_report(report.stream(), lattice);
        }
        ExtractionResult extraction = extract_events(lattice);
        for (const std::string &warning : extraction.warnings) {
            header.push_back("warning: " + warning);
        }
        std::unordered_map<EventMask, double, EventMaskHash> sigmas;
        for (const auto &[set, est] : extraction.attenuations) {
            if (est.value < 0.0) {
                continue;
            }
            EventMask mask = EventMask::from_indices(lattice.num_detectors, set);
            sigmas[mask] = 0.5 * std::exp(-est.value) * est.std_error;
        }
        write_dem(out.stream(), extraction.dem, header, &sigmas);
        return 0;
    }
    if (args.method == "total" || args.method == "total-attenuation") {
        McConfig config;
        config.n_samples = args.mc_samples;
        config.seed = args.seed;
        McResult result = mc_total_attenuation(data, config);
        if (std::isnan(result.estimate.value)) {
            throw EstimationError("every Monte Carlo draw hit a divergent depolarization");
        }
        std::ostream &os = out.stream();
        os << "# " << header[0] << "\n";
        os << "total_attenuation=" << fmt(result.estimate.value) << "\n";
        os << "sigma=" << fmt(result.estimate.std_error) << "\n";
        os << "divergent=" << (result.estimate.divergent ? 1 : 0) << "\n";
        os << "n_divergent_draws=" << result.n_divergent << "\n";
        os << "divergent_fraction=" << fmt(result.divergent_fraction) << "\n";
        return 0;
    }
    throw ParseError("unknown method '" + args.method + "'");
}

struct StatsArgs {
    std::string data_path;
    std::vector<std::string> parities;
    std::string out;
};

int run_stats(const StatsArgs &args) {
    DetectorHistories data = read_shots_file(args.data_path);
    std::vector<EventMask> parities;
    if (args.parities.empty()) {
        for (uint32_t i = 0; i < data.num_detectors(); i++) {
            EventMask single(data.num_detectors());
            single.set_bit(i, true);
            parities.push_back(single);
        }
    } else {
        for (const std::string &bits : args.parities) {
            EventMask mask = EventMask::from_string(bits);
            if (mask.num_bits() != data.num_detectors()) {
                throw ParseError("parity '" + bits + "' has " + std::to_string(mask.num_bits()) + " bits; data has " + std::to_string(data.num_detectors()) + " detectors");
            }
            parities.push_back(mask);
        }
    }
    OutputTarget out(args.out);
    std::ostream &os = out.stream();
    os << "shots=" << data.num_shots() << "\n";
    os << "detectors=" << data.num_detectors() << "\n";
    for (const EventMask &parity : parities) {
        EstimateWithError z = sample_polarization(data, parity);
        EstimateWithError omega = depolarization(z);
        os << "parity=" << parity.str() << " z=" << fmt(z.value) << " z_sigma=" << fmt(z.std_error);
        if (omega.divergent) {
            os << " omega_divergent=1";
        } else {
            os << " omega=" << fmt(omega.value) << " omega_sigma=" << fmt(omega.std_error);
        }
        os << "\n";
    }
    return 0;
}

struct CompareArgs {
    std::string true_path;
    std::string est_path;
    std::string out;
};

int run_compare(const CompareArgs &args) {
    Dem truth = read_dem_file(args.true_path);
    std::unordered_map<EventMask, double, EventMaskHash> sigmas;
    Dem estimate = read_dem_file(args.est_path, &sigmas);
    CompareReport report = compare_dems(truth, estimate, &sigmas);
    OutputTarget out(args.out);
    write_compare_report(out.stream(), report);
    return report.clean() ? 0 : kExitMismatch;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Detector error model estimation from syndrome data"};
    app.require_subcommand(1);
    uint32_t threads = default_threads();
    app.add_option("--threads", threads, "Worker thread cap (default $DEMEST_THREADS or 1)");

    GenArgs gen_args;
    CLI::App *gen = app.add_subcommand("gen", "Generate a reference DEM");
    gen->add_option("--n", gen_args.n, "Number of detectors")->required();
    CLI::Option *events_opt = gen->add_option("--events", gen_args.events, "Number of random sparse events");
    gen->add_option("--max-weight", gen_args.max_weight, "Maximum event weight");
    gen->add_option("--p-min", gen_args.p_min, "Minimum event probability");
    gen->add_option("--p-max", gen_args.p_max, "Maximum event probability");
    gen->add_option("--seed", gen_args.seed, "RNG seed");
    CLI::Option *eps_opt = gen->add_option("--uniform-eps", gen_args.uniform_eps, "Uniformly depolarizing model with this total error weight");
    eps_opt->excludes(events_opt);
    gen->add_option("--out", gen_args.out, "Output DEM file (default stdout)");

    SampleArgs sample_args;
    CLI::App *sample = app.add_subcommand("sample", "Sample detector histories from a DEM");
    sample->add_option("--dem", sample_args.dem_path, "Input DEM file")->required();
    sample->add_option("--shots", sample_args.shots, "Number of shots")->required();
    sample->add_option("--seed", sample_args.seed, "RNG seed");
    sample->add_option("--out", sample_args.out, "Output shot file")->required();
    sample->add_option("--format", sample_args.format, "txt or bin")->check(CLI::IsMember({"txt", "bin"}));

    EstimateArgs est_args;
    CLI::App *estimate = app.add_subcommand("estimate", "Estimate a DEM from detector histories");
    estimate->add_option("--data", est_args.data_path, "Shot file (txt or bin)")->required();
    estimate->add_option("--method", est_args.method, "exact, pij, lowweight, lattice, or total-attenuation")
        ->check(CLI::IsMember({"exact", "pij", "lowweight", "lattice", "total", "total-attenuation"}));
    estimate->add_option("--wmax", est_args.wmax, "Maximum event weight (lowweight/lattice)");
    estimate->add_option("--significance", est_args.significance, "z-score for keeping an event");
    estimate->add_option("--mc-samples", est_args.mc_samples, "Monte Carlo draws (total)");
    estimate->add_option("--seed", est_args.seed, "RNG seed for bootstrap/Monte Carlo");
    estimate->add_option("--bootstraps", est_args.bootstraps, "Bootstrap resamples for error bars");
    estimate->add_flag("--covariance-errors", est_args.covariance_errors, "Exact-method error bars via covariance propagation");
    estimate->add_flag("--clamp", est_args.clamp, "Clamp negative pij values to 0");
    estimate->add_option("--lattice-report", est_args.lattice_report, "Also dump stored lattice classes to this file");
    estimate->add_option("--out", est_args.out, "Output file (default stdout)");

    CompareArgs cmp_args;
    CLI::App *compare = app.add_subcommand("compare", "Diff a true DEM against an estimate");
    compare->add_option("--true", cmp_args.true_path, "True DEM file")->required();
    compare->add_option("--est", cmp_args.est_path, "Estimated DEM file")->required();
    compare->add_option("--out", cmp_args.out, "Report file (default stdout)");

    StatsArgs stats_args;
    CLI::App *stats = app.add_subcommand("stats", "Polarization statistics for chosen parities");
    stats->add_option("--data", stats_args.data_path, "Shot file (txt or bin)")->required();
    stats->add_option("--parity", stats_args.parities, "Parity bit string, detector 0 leftmost (repeatable; default: every single detector)");
    stats->add_option("--out", stats_args.out, "Report file (default stdout)");

    EstimateArgs total_args;
    CLI::App *total = app.add_subcommand("total-attenuation", "Monte Carlo estimate of the total attenuation");
    total->add_option("--data", total_args.data_path, "Shot file (txt or bin)")->required();
    total->add_option("--mc-samples", total_args.mc_samples, "Monte Carlo draws");
    total->add_option("--seed", total_args.seed, "RNG seed");
    total->add_option("--out", total_args.out, "Report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            return run_gen(gen_args, eps_opt->count() > 0);
        }
        if (sample->parsed()) {
            sample_args.threads = threads;
            return run_sample(sample_args);
        }
        if (estimate->parsed()) {
            est_args.threads = threads;
            return run_estimate(est_args);
        }
        if (compare->parsed()) {
            return run_compare(cmp_args);
        }
        if (stats->parsed()) {
            return run_stats(stats_args);
        }
        if (total->parsed()) {
            total_args.method = "total";
            return run_estimate(total_args);
        }
    } catch (const CapacityError &e) {
        // Over-cap requests are usage errors: the fix is a different method
        // (exact past the distribution cap -> lattice), not different data.
        std::cerr << "error: " << e.what() << "\n";
        if (est_args.method == "exact") {
            std::cerr << "hint: --method lattice handles large N\n";
        }
        return kExitUsage;
    } catch (const EstimationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStatistical;
    } catch (const ParseError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return 0;
}
