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

// File formats and the command-line surface. The library half exercises the
// DEM text format and the shot text/binary formats directly; the CLI half
// shells out to the demest binary (path supplied by the DEMEST_CLI
// environment variable) and checks outputs and exit codes end to end.

#include <sys/wait.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <gtest/gtest.h>

#include "demest/compare.h"
#include "demest/dem.h"
#include "demest/dem_io.h"
#include "demest/errors.h"
#include "demest/histories.h"
#include "demest/sampling.h"

namespace demest {
namespace {

Dem reference_dem() {
    return Dem(2, {
                      {EventMask::from_string("10"), 0.1},
                      {EventMask::from_string("01"), 0.2},
                      {EventMask::from_string("11"), 0.05},
                  });
}

const char kReferenceDemText[] =
    "detectors 2\n"
    "error(0.20000000000000001) D1\n"
    "error(0.10000000000000001) D0\n"
    "error(0.050000000000000003) D0 D1\n";

TEST(DemText, WritesACanonicalSortedForm) {
    // Events ordered by mask (dictionary order on the parity string, so the
    // D1 event sorts before D0), probabilities rendered with full round-trip
    // precision.
    std::ostringstream out;
    write_dem(out, reference_dem());
    EXPECT_EQ(out.str(), kReferenceDemText);
}

TEST(DemText, ReadsBackWhatItWrites) {
    Dem dem = reference_dem();
    std::ostringstream out;
    write_dem(out, dem, {"provenance line", "second line"});
    std::istringstream in(out.str());
    Dem again = read_dem(in);
    ASSERT_EQ(again.num_detectors(), 2u);
    ASSERT_EQ(again.events().size(), 3u);
    for (size_t i = 0; i < 3; i++) {
        EXPECT_EQ(again.events()[i].mask, dem.events()[i].mask);
        EXPECT_EQ(again.events()[i].probability, dem.events()[i].probability);
    }
}

TEST(DemText, RoundTripsFullPrecisionProbabilities) {
    // %.17g is enough digits to reproduce any double exactly.
    std::vector<double> probs = {0.1234567890123456789, 1e-17, 0.4999999999999999, 0.0072973525693};
    std::vector<DemEvent> events;
    for (size_t i = 0; i < probs.size(); i++) {
        events.push_back({EventMask::from_integer(4, uint64_t{1} << i), probs[i]});
    }
    Dem dem(4, events);
    std::ostringstream out;
    write_dem(out, dem);
    std::istringstream in(out.str());
    Dem again = read_dem(in);
    ASSERT_EQ(again.events().size(), probs.size());
    for (size_t i = 0; i < probs.size(); i++) {
        const DemEvent *event = again.find(EventMask::from_integer(4, uint64_t{1} << i));
        ASSERT_NE(event, nullptr) << "event " << i;
        EXPECT_EQ(event->probability, probs[i]) << "event " << i;
    }
}

TEST(DemText, CollectsSigmaAnnotationsAndSkipsCommentary) {
    std::string text =
        "# header chatter\n"
        "\n"
        "detectors 3  # trailing comment\n"
        "error(0.01) D0   # sigma=0.002\n"
        "error(0.02) D0 D2\n"
        "# a full-line comment between events\n"
        "error(0.03) D1 D2  # sigma=0.004\n";
    std::istringstream in(text);
    std::unordered_map<EventMask, double, EventMaskHash> sigmas;
    Dem dem = read_dem(in, &sigmas);
    EXPECT_EQ(dem.num_detectors(), 3u);
    EXPECT_EQ(dem.events().size(), 3u);
    ASSERT_EQ(sigmas.size(), 2u);
    EXPECT_DOUBLE_EQ(sigmas.at(EventMask::from_string("100")), 0.002);
    EXPECT_DOUBLE_EQ(sigmas.at(EventMask::from_string("011")), 0.004);
    EXPECT_EQ(sigmas.count(EventMask::from_string("101")), 0u);

    // write_dem emits the annotations in the same comment syntax.
    std::ostringstream out;
    write_dem(out, dem, {}, &sigmas);
    std::istringstream in2(out.str());
    std::unordered_map<EventMask, double, EventMaskHash> sigmas2;
    read_dem(in2, &sigmas2);
    EXPECT_EQ(sigmas2.size(), 2u);
    EXPECT_DOUBLE_EQ(sigmas2.at(EventMask::from_string("100")), 0.002);
}

void expect_parse_error(const std::string &text, const std::string &needle) {
    std::istringstream in(text);
    try {
        read_dem(in);
        FAIL() << "expected ParseError for:\n" << text;
    } catch (const ParseError &e) {
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
            << "message '" << e.what() << "' lacks '" << needle << "'";
    }
}

TEST(DemText, ReportsMalformedLinesByNumber) {
    expect_parse_error("", "no 'detectors");
    expect_parse_error("error(0.1) D0\n", "model line 1");
    expect_parse_error("detectors 0\n", "model line 1");
    expect_parse_error("detectors 2 extra\n", "unexpected token 'extra'");
    expect_parse_error("detectors 2\nerror(0.1x) D0\n", "model line 2");
    expect_parse_error("detectors 2\nerror(1.0) D0\n", "[0, 1)");
    expect_parse_error("detectors 2\nerror(-0.1) D0\n", "[0, 1)");
    expect_parse_error("detectors 2\nerror(0.1) D2\n", "out of range 0..1");
    expect_parse_error("detectors 2\nerror(0.1) D1 D0\n", "strictly increasing");
    expect_parse_error("detectors 2\nerror(0.1) D0 D0\n", "strictly increasing");
    expect_parse_error("detectors 2\nerror(0.1) X0\n", "detector token");
    expect_parse_error("detectors 2\nerror(0.1)\n", "at least one detector");
    expect_parse_error("detectors 2\nnonsense 3\n", "model line 2");
}

TEST(DemText, FileHelpersRaiseOnUnopenablePaths) {
    EXPECT_THROW(read_dem_file("/nonexistent/path/model.dem"), ParseError);
    EXPECT_THROW(write_dem_file("/nonexistent/path/model.dem", reference_dem()), ParseError);
}

DetectorHistories patterned_shots() {
    // 5 shots over 12 detectors, enough to cross the one-byte record
    // boundary in the binary format.
    DetectorHistories data(12, 5);
    data.set_bit(0, 0, true);
    data.set_bit(1, 11, true);
    data.set_bit(2, 3, true);
    data.set_bit(2, 7, true);
    data.set_bit(4, 0, true);
    data.set_bit(4, 5, true);
    data.set_bit(4, 11, true);
    return data;
}

TEST(ShotText, WritesDetectorZeroLeftmostAndReadsBack) {
    DetectorHistories data = patterned_shots();
    std::ostringstream out;
    write_shots(out, data, ShotFormat::text);
    EXPECT_EQ(out.str(),
              "100000000000\n"
              "000000000001\n"
              "000100010000\n"
              "000000000000\n"
              "100001000001\n");
    std::istringstream in(out.str());
    DetectorHistories again = read_shots(in);
    ASSERT_EQ(again.num_detectors(), 12u);
    ASSERT_EQ(again.num_shots(), 5u);
    for (uint64_t shot = 0; shot < 5; shot++) {
        EXPECT_EQ(again.shot_mask(shot), data.shot_mask(shot)) << "shot " << shot;
    }
}

TEST(ShotText, RejectsRaggedAndNonBinaryInput) {
    {
        std::istringstream in("101\n10\n");
        EXPECT_THROW(read_shots(in), ParseError);
    }
    {
        std::istringstream in("102\n");
        EXPECT_THROW(read_shots(in), ParseError);
    }
    {
        std::istringstream in("\n\n");
        EXPECT_THROW(read_shots(in), ParseError);
    }
}

TEST(ShotBinary, RoundTripsThroughTheSniffingReader) {
    DetectorHistories data = patterned_shots();
    std::ostringstream out;
    write_shots(out, data, ShotFormat::binary);
    std::string bytes = out.str();

    // 17-byte header: magic, version, u32 detector count, u64 shot count
    // (both little endian), then ceil(12/8) = 2 bytes per shot.
    ASSERT_EQ(bytes.size(), 17u + 5u * 2u);
    EXPECT_EQ(bytes.substr(0, 4), "DEMH");
    EXPECT_EQ(bytes[4], '\x01');
    EXPECT_EQ((uint8_t)bytes[5], 12);
    EXPECT_EQ((uint8_t)bytes[6], 0);
    EXPECT_EQ((uint8_t)bytes[9], 5);
    // Shot 0 has only detector 0 set: low bit of the first record byte.
    EXPECT_EQ((uint8_t)bytes[17], 0x01);
    EXPECT_EQ((uint8_t)bytes[18], 0x00);
    // Shot 1 has detector 11 set: bit 3 of the second record byte.
    EXPECT_EQ((uint8_t)bytes[19], 0x00);
    EXPECT_EQ((uint8_t)bytes[20], 0x08);

    std::istringstream in(bytes);
    DetectorHistories again = read_shots(in);
    ASSERT_EQ(again.num_detectors(), 12u);
    ASSERT_EQ(again.num_shots(), 5u);
    for (uint64_t shot = 0; shot < 5; shot++) {
        EXPECT_EQ(again.shot_mask(shot), data.shot_mask(shot)) << "shot " << shot;
    }
}

TEST(ShotBinary, RejectsCorruptHeadersPaddingAndTruncation) {
    DetectorHistories data = patterned_shots();
    std::ostringstream out;
    write_shots(out, data, ShotFormat::binary);
    const std::string good = out.str();

    {
        std::string bad = good;
        bad[4] = '\x02';  // unsupported version
        std::istringstream in(bad);
        EXPECT_THROW(read_shots(in), ParseError);
    }
    {
        std::string bad = good;
        bad[18] = '\x80';  // padding bit 15 of a 12-detector record
        std::istringstream in(bad);
        EXPECT_THROW(read_shots(in), ParseError);
    }
    {
        std::string bad = good.substr(0, good.size() - 1);
        std::istringstream in(bad);
        EXPECT_THROW(read_shots(in), ParseError);
    }
    {
        std::istringstream in(std::string("DEMH"));  // header cut short
        EXPECT_THROW(read_shots(in), ParseError);
    }
}

TEST(ShotFiles, RoundTripOnDiskInBothFormats) {
    namespace fs = std::filesystem;
    fs::path dir = fs::path(::testing::TempDir()) / "demest_shot_files";
    fs::create_directories(dir);
    DetectorHistories data = patterned_shots();
    for (ShotFormat format : {ShotFormat::text, ShotFormat::binary}) {
        std::string path = (dir / (format == ShotFormat::text ? "shots.txt" : "shots.bin")).string();
        write_shots_file(path, data, format);
        DetectorHistories again = read_shots_file(path);
        ASSERT_EQ(again.num_shots(), data.num_shots());
        for (uint64_t shot = 0; shot < data.num_shots(); shot++) {
            EXPECT_EQ(again.shot_mask(shot), data.shot_mask(shot));
        }
    }
    EXPECT_THROW(read_shots_file((dir / "missing.txt").string()), ParseError);
}

// ---------------------------------------------------------------------------
// CLI tests: run the installed binary as a subprocess.

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    ASSERT_TRUE(out.good()) << path;
}

// Returns the full line starting with `prefix`, or "" (with a test failure).
std::string find_line(const std::string &text, const std::string &prefix) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(prefix, 0) == 0) {
            return line;
        }
    }
    ADD_FAILURE() << "no line starting with '" << prefix << "' in:\n" << text;
    return "";
}

// Extracts the numeric value following "key=" in a key=value line.
double field(const std::string &line, const std::string &key) {
    size_t pos = line.find(key + "=");
    if (pos == std::string::npos) {
        ADD_FAILURE() << "no field '" << key << "' in line: " << line;
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::strtod(line.c_str() + pos + key.size() + 1, nullptr);
}

class CliTest : public ::testing::Test {
   protected:
    void SetUp() override {
        const char *cli = std::getenv("DEMEST_CLI");
        ASSERT_NE(cli, nullptr) << "DEMEST_CLI must point at the demest binary";
        cli_ = cli;
        const ::testing::TestInfo *info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = std::filesystem::path(::testing::TempDir()) / (std::string("demest_cli_") + info->name());
        std::filesystem::create_directories(dir_);
    }

    std::string path(const std::string &name) const {
        return (dir_ / name).string();
    }

    CliResult run(const std::string &args) const {
        std::string out_path = path("_stdout"), err_path = path("_stderr");
        std::string cmd = cli_ + " " + args + " > " + out_path + " 2> " + err_path;
        int rc = std::system(cmd.c_str());
        CliResult result;
        result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
        result.out = slurp(out_path);
        result.err = slurp(err_path);
        return result;
    }

    // Reference two-detector model and a shot file whose empirical histogram
    // equals the model's exact distribution (so estimators recover it
    // exactly, up to floating point).
    std::string write_reference_dem(const std::string &name = "ref.dem") {
        std::string p = path(name);
        spill(p, kReferenceDemText);
        return p;
    }

    std::string write_exact_histogram_shots(const std::string &name = "shots.txt") {
        // P = (0.685, 0.085, 0.175, 0.055) over (00, 10, 01, 11), K = 1e5.
        std::string content;
        content.reserve(300000);
        auto repeat = [&](const char *row, int count) {
            for (int i = 0; i < count; i++) {
                content += row;
            }
        };
        repeat("00\n", 68500);
        repeat("10\n", 8500);
        repeat("01\n", 17500);
        repeat("11\n", 5500);
        std::string p = path(name);
        spill(p, content);
        return p;
    }

    std::string cli_;
    std::filesystem::path dir_;
};

TEST_F(CliTest, GenIsDeterministicAndMatchesTheLibrary) {
    std::string args = "gen --n 6 --events 8 --max-weight 3 --seed 7";
    CliResult first = run(args);
    CliResult second = run(args);
    ASSERT_EQ(first.exit_code, 0) << first.err;
    EXPECT_EQ(first.out, second.out);

    std::istringstream in(first.out);
    Dem parsed = read_dem(in);
    Dem expected = make_random_sparse_dem(6, 8, 3, 0.001, 0.01, 7);
    ASSERT_EQ(parsed.events().size(), expected.events().size());
    for (size_t i = 0; i < parsed.events().size(); i++) {
        EXPECT_EQ(parsed.events()[i].mask, expected.events()[i].mask);
        EXPECT_EQ(parsed.events()[i].probability, expected.events()[i].probability);
    }
}

TEST_F(CliTest, GenUniformEnumeratesEveryMask) {
    CliResult result = run("gen --n 4 --uniform-eps 0.2");
    ASSERT_EQ(result.exit_code, 0) << result.err;
    std::istringstream in(result.out);
    Dem dem = read_dem(in);
    EXPECT_EQ(dem.events().size(), 15u);
    for (const DemEvent &e : dem.events()) {
        EXPECT_DOUBLE_EQ(e.probability, 0.2 / 16.0);
    }
}

TEST_F(CliTest, GenWritesTheSameBytesToFileAndStdout) {
    CliResult console = run("gen --n 5 --events 4 --seed 11");
    ASSERT_EQ(console.exit_code, 0) << console.err;
    CliResult filed = run("gen --n 5 --events 4 --seed 11 --out " + path("gen.dem"));
    ASSERT_EQ(filed.exit_code, 0) << filed.err;
    EXPECT_TRUE(filed.out.empty());
    EXPECT_EQ(slurp(path("gen.dem")), console.out);
}

TEST_F(CliTest, SampleTextAndBinaryCarryTheSameShots) {
    std::string dem = write_reference_dem();
    ASSERT_EQ(run("sample --dem " + dem + " --shots 500 --seed 3 --out " + path("a.txt")).exit_code, 0);
    ASSERT_EQ(run("sample --dem " + dem + " --shots 500 --seed 3 --out " + path("a.bin") + " --format bin").exit_code, 0);

    std::string binary = slurp(path("a.bin"));
    ASSERT_GE(binary.size(), 17u);
    EXPECT_EQ(binary.substr(0, 4), "DEMH");

    // Identical seeds produce identical shots, so the stats reports agree
    // byte for byte across the two formats.
    CliResult stats_txt = run("stats --data " + path("a.txt"));
    CliResult stats_bin = run("stats --data " + path("a.bin"));
    ASSERT_EQ(stats_txt.exit_code, 0) << stats_txt.err;
    ASSERT_EQ(stats_bin.exit_code, 0) << stats_bin.err;
    EXPECT_EQ(stats_txt.out, stats_bin.out);
    EXPECT_NE(find_line(stats_txt.out, "shots="), "");
}

TEST_F(CliTest, StatsReportsPolarizationsPerParity) {
    // Counts 400/300/200/100 over (00, 10, 01, 11) give z(10) = 0.2,
    // z(01) = 0.4, and z(11) = 0 — the last divergent under the 3-sigma floor.
    std::string content;
    auto repeat = [&](const char *row, int count) {
        for (int i = 0; i < count; i++) {
            content += row;
        }
    };
    repeat("00\n", 400);
    repeat("10\n", 300);
    repeat("01\n", 200);
    repeat("11\n", 100);
    spill(path("half.txt"), content);

    CliResult result = run("stats --data " + path("half.txt") + " --parity 10 --parity 01 --parity 11");
    ASSERT_EQ(result.exit_code, 0) << result.err;
    EXPECT_EQ(find_line(result.out, "shots="), "shots=1000");
    EXPECT_EQ(find_line(result.out, "detectors="), "detectors=2");

    std::string z10 = find_line(result.out, "parity=10");
    EXPECT_NEAR(field(z10, "z"), 0.2, 1e-15);
    EXPECT_NEAR(field(z10, "omega"), 1.6094379124341003, 1e-12);  // -ln 0.2
    std::string z01 = find_line(result.out, "parity=01");
    EXPECT_NEAR(field(z01, "z"), 0.4, 1e-15);
    std::string z11 = find_line(result.out, "parity=11");
    EXPECT_NEAR(field(z11, "z"), 0.0, 1e-15);
    EXPECT_NE(z11.find("omega_divergent=1"), std::string::npos) << z11;
    EXPECT_EQ(z11.find(" omega="), std::string::npos) << z11;

    // Default parity list: one line per detector.
    CliResult defaults = run("stats --data " + path("half.txt"));
    ASSERT_EQ(defaults.exit_code, 0);
    EXPECT_NE(find_line(defaults.out, "parity=10"), "");
    EXPECT_NE(find_line(defaults.out, "parity=01"), "");
}

TEST_F(CliTest, ExactEstimateRoundTripsThroughCompare) {
    std::string dem = write_reference_dem();
    std::string shots = write_exact_histogram_shots();

    CliResult est = run("estimate --data " + shots + " --method exact --seed 5 --out " + path("est.dem"));
    ASSERT_EQ(est.exit_code, 0) << est.err;

    std::string est_text = slurp(path("est.dem"));
    EXPECT_NE(est_text.find("# estimated: method=exact"), std::string::npos);
    EXPECT_NE(est_text.find("# sigma="), std::string::npos);

    std::istringstream in(est_text);
    std::unordered_map<EventMask, double, EventMaskHash> sigmas;
    Dem recovered = read_dem(in, &sigmas);
    ASSERT_EQ(recovered.events().size(), 3u);
    ASSERT_NE(recovered.find(EventMask::from_string("10")), nullptr);
    EXPECT_NEAR(recovered.find(EventMask::from_string("10"))->probability, 0.1, 1e-12);
    EXPECT_NEAR(recovered.find(EventMask::from_string("01"))->probability, 0.2, 1e-12);
    EXPECT_NEAR(recovered.find(EventMask::from_string("11"))->probability, 0.05, 1e-12);
    EXPECT_EQ(sigmas.size(), 3u);

    CliResult cmp = run("compare --true " + dem + " --est " + path("est.dem"));
    EXPECT_EQ(cmp.exit_code, 0) << cmp.out;
    EXPECT_EQ(find_line(cmp.out, "matched="), "matched=3");
    EXPECT_EQ(find_line(cmp.out, "missing="), "missing=0");
    EXPECT_EQ(find_line(cmp.out, "spurious="), "spurious=0");
    EXPECT_LT(field(find_line(cmp.out, "max_abs_error="), "max_abs_error"), 1e-9);
    EXPECT_NEAR(field(find_line(cmp.out, "total_attenuation_true="), "total_attenuation_true"),
                0.8393296907380267, 1e-12);
    // Bootstrap sigmas are positive, so an exact recovery sits within error.
    std::string row = find_line(cmp.out, "event=10");
    EXPECT_NE(row.find("within=1"), std::string::npos) << row;
}

TEST_F(CliTest, PijReportsMarginalAndPairwiseProbabilities) {
    std::string shots = write_exact_histogram_shots();
    CliResult result = run("estimate --data " + shots + " --method pij");
    ASSERT_EQ(result.exit_code, 0) << result.err;
    // pi_i = (1 - z_i)/2 and the two-point estimator recovers the weight-2
    // probability exactly on exact-histogram data.
    EXPECT_NEAR(field(find_line(result.out, "pi_0"), "pi_0"), 0.14, 1e-12);
    EXPECT_NEAR(field(find_line(result.out, "pi_1"), "pi_1"), 0.23, 1e-12);
    std::string pair = find_line(result.out, "pij_0_1");
    EXPECT_NEAR(field(pair, "pij_0_1"), 0.05, 1e-12);
    EXPECT_GT(field(pair, "sigma"), 0.0);
}

TEST_F(CliTest, LowweightAndLatticeBothRecoverTheReferenceModel) {
    std::string dem = write_reference_dem();
    std::string shots = write_exact_histogram_shots();

    for (const std::string &method : {std::string("lowweight"), std::string("lattice")}) {
        std::string est_path = path("est_" + method + ".dem");
        std::string extra = method == "lattice" ? " --lattice-report " + path("lattice.txt") : "";
        CliResult est = run("estimate --data " + shots + " --method " + method + " --wmax 2 --seed 5" + extra + " --out " + est_path);
        ASSERT_EQ(est.exit_code, 0) << method << ": " << est.err;
        CliResult cmp = run("compare --true " + dem + " --est " + est_path);
        EXPECT_EQ(cmp.exit_code, 0) << method << ":\n" << cmp.out;
        EXPECT_LT(field(find_line(cmp.out, "max_abs_error="), "max_abs_error"), 1e-9) << method;
    }

    std::string report = slurp(path("lattice.txt"));
    EXPECT_NE(report.find("D0 D1 a="), std::string::npos) << report;
    EXPECT_NE(report.find("sigma="), std::string::npos) << report;
}

TEST_F(CliTest, TotalAttenuationAgreesBetweenSpellings) {
    std::string shots = write_exact_histogram_shots();
    CliResult sub = run("total-attenuation --data " + shots + " --mc-samples 4096 --seed 9");
    CliResult via_estimate = run("estimate --data " + shots + " --method total-attenuation --mc-samples 4096 --seed 9");
    ASSERT_EQ(sub.exit_code, 0) << sub.err;
    ASSERT_EQ(via_estimate.exit_code, 0) << via_estimate.err;
    EXPECT_EQ(find_line(sub.out, "total_attenuation="), find_line(via_estimate.out, "total_attenuation="));

    double total = field(find_line(sub.out, "total_attenuation="), "total_attenuation");
    double sigma = field(find_line(sub.out, "sigma="), "sigma");
    // True total attenuation of the reference model, recovered to Monte
    // Carlo accuracy (4096 uniform parity draws over just 4 parities).
    EXPECT_NEAR(total, 0.8393296907380267, 0.2);
    EXPECT_GT(sigma, 0.0);
    EXPECT_EQ(find_line(sub.out, "divergent="), "divergent=0");
    EXPECT_EQ(find_line(sub.out, "n_divergent_draws="), "n_divergent_draws=0");
}

TEST_F(CliTest, CompareFlagsMissingAndSpuriousEvents) {
    std::string dem = write_reference_dem();
    spill(path("other.dem"),
          "detectors 2\n"
          "error(0.1) D0\n"
          "error(0.03) D1\n");
    CliResult cmp = run("compare --true " + dem + " --est " + path("other.dem"));
    EXPECT_EQ(cmp.exit_code, 1);
    EXPECT_EQ(find_line(cmp.out, "matched="), "matched=2");
    EXPECT_EQ(find_line(cmp.out, "missing="), "missing=1");
    EXPECT_EQ(find_line(cmp.out, "spurious="), "spurious=0");
    EXPECT_EQ(find_line(cmp.out, "missing_event="), "missing_event=11");
    EXPECT_NEAR(field(find_line(cmp.out, "max_abs_error="), "max_abs_error"), 0.17, 1e-12);
}

TEST_F(CliTest, UsageAndFormatProblemsExitTwo) {
    std::string shots = write_exact_histogram_shots();

    // Unknown subcommand and unknown method are both command-line errors.
    EXPECT_EQ(run("frobnicate").exit_code, 2);
    EXPECT_EQ(run("estimate --data " + shots + " --method bogus").exit_code, 2);
    // Missing required option.
    EXPECT_EQ(run("sample --shots 10 --out " + path("x.txt")).exit_code, 2);

    // Malformed model file.
    spill(path("bad.dem"), "detectors 2\nerror(2.0) D0\n");
    CliResult bad = run("sample --dem " + path("bad.dem") + " --shots 10 --out " + path("x.txt"));
    EXPECT_EQ(bad.exit_code, 2);
    EXPECT_NE(bad.err.find("model line 2"), std::string::npos) << bad.err;

    // Parity width mismatch against the data.
    CliResult parity = run("stats --data " + shots + " --parity 101");
    EXPECT_EQ(parity.exit_code, 2);

    // Exact inversion over 30 detectors exceeds the distribution cap; the
    // error suggests the scalable estimator.
    std::string wide(30, '0');
    spill(path("wide.txt"), wide + "\n" + wide + "\n");
    CliResult capacity = run("estimate --data " + path("wide.txt") + " --method exact");
    EXPECT_EQ(capacity.exit_code, 2);
    EXPECT_NE(capacity.err.find("hint: --method lattice handles large N"), std::string::npos) << capacity.err;
}

TEST_F(CliTest, StatisticallyImpossibleDataExitsThree) {
    // Alternating single-detector flips leave every parity polarization at
    // zero, so the exact inversion has no finite depolarization to work with.
    std::string content;
    for (int i = 0; i < 500; i++) {
        content += "10\n01\n";
    }
    spill(path("divergent.txt"), content);
    CliResult result = run("estimate --data " + path("divergent.txt") + " --method exact");
    EXPECT_EQ(result.exit_code, 3);
    EXPECT_NE(result.err.find("exact inversion cannot proceed"), std::string::npos) << result.err;
}

}  // namespace
}  // namespace demest
