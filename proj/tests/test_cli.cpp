#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "quadcorr/config.hpp"

#ifndef QUADCORR_BIN
#error "QUADCORR_BIN must point at the command-line binary"
#endif

namespace fs = std::filesystem;
using quadcorr::ConfigFile;
using quadcorr::parse_config_file;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("quadcorr_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int n = 0;
        return n;
    }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

int run(const std::string& args) {
    const std::string cmd =
        std::string(QUADCORR_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_data_rows(const std::string& csv_text) {
    int rows = 0;
    std::istringstream in(csv_text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') ++rows;
    return rows;
}

const std::string kSmallConfig =
    "[source]\n"
    "g_p = 2e5\n"
    "g_q = 1e4\n"
    "[background]\n"
    "bg_s = 1e4\n"
    "bg_a = 1e4\n"
    "[detector]\n"
    "eta_1 = 0.25\n"
    "eta_2 = 0.25\n"
    "eta_3 = 0.25\n"
    "eta_4 = 0.25\n"
    "[run]\n"
    "duration_s = 2.0\n"
    "seed = 11\n";

}  // namespace

TEST_CASE("simulate writes a deterministic tag file plus manifest") {
    TempDir dir;
    const std::string cfg = dir.file("run.cfg");
    write_text(cfg, kSmallConfig);
    const std::string out_a = dir.file("a.qtag");
    const std::string out_b = dir.file("b.qtag");

    CHECK(run("simulate --config " + cfg + " --out " + out_a) == 0);
    CHECK(run("simulate --config " + cfg + " --out " + out_b) == 0);
    CHECK(fs::exists(out_a));
    CHECK(fs::file_size(out_a) > 24);
    CHECK(read_text(out_a) == read_text(out_b));

    // Manifests differ only in the paths they mention; digests match.
    const ConfigFile man_a = parse_config_file(out_a + ".manifest");
    const ConfigFile man_b = parse_config_file(out_b + ".manifest");
    CHECK(man_a.get("subcommand") == "simulate");
    CHECK(man_a.get("output.digest") == man_b.get("output.digest"));
    CHECK(man_a.get_double("run.seed") == 11.0);

    // Re-running to the same path reproduces the manifest byte for byte.
    const std::string manifest_before = read_text(out_a + ".manifest");
    CHECK(run("simulate --config " + cfg + " --out " + out_a) == 0);
    CHECK(read_text(out_a + ".manifest") == manifest_before);

    // A seed override changes the output.
    CHECK(run("simulate --config " + cfg + " --out " + out_b + " --seed 99") == 0);
    CHECK_FALSE(read_text(out_a) == read_text(out_b));
}

TEST_CASE("configuration and input errors map to distinct exit codes") {
    TempDir dir;
    const std::string cfg = dir.file("run.cfg");
    write_text(cfg, kSmallConfig + "typo_key = 1\n");
    CHECK(run("simulate --config " + cfg + " --out " + dir.file("x.qtag")) == 2);

    CHECK(run("simulate --config " + dir.file("missing.cfg") + " --out " +
              dir.file("x.qtag")) == 3);

    // Unknown flag: argument parsing error.
    write_text(cfg, kSmallConfig);
    CHECK(run("simulate --config " + cfg + " --out " + dir.file("x.qtag") +
              " --frobnicate") == 2);
    CHECK(run("definitely-not-a-subcommand") == 2);
}

TEST_CASE("corrupted tag files abort without partial outputs") {
    TempDir dir;
    const std::string bad = dir.file("bad.qtag");
    write_text(bad, "NOPE this is not a tag file at all................");
    const std::string out = dir.file("g2.csv");
    CHECK(run("g2 " + bad + " --out " + out) == 3);
    CHECK_FALSE(fs::exists(out));
    const std::string report = dir.file("report.txt");
    CHECK(run("correct " + bad + " --out " + report) == 3);
    CHECK_FALSE(fs::exists(report));
    CHECK(run("g2 " + dir.file("absent.qtag") + " --out " + out) == 3);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("histogram subcommands emit the documented grids") {
    TempDir dir;
    const std::string cfg = dir.file("run.cfg");
    write_text(cfg, kSmallConfig);
    const std::string tags = dir.file("run.qtag");
    REQUIRE(run("simulate --config " + cfg + " --out " + tags) == 0);

    const std::string g2csv = dir.file("g2.csv");
    CHECK(run("g2 " + tags + " --channels 1,3 --bin-ns 2 --range-ns 60 --out " +
              g2csv) == 0);
    const std::string g2text = read_text(g2csv);
    CHECK(count_data_rows(g2text) == 61);
    CHECK(g2text.find("# columns = tau_ns,count,normalized") != std::string::npos);
    CHECK(fs::exists(g2csv + ".manifest"));

    CHECK(run("g2 " + tags + " --channels 1,5 --out " + dir.file("z.csv")) == 2);
    CHECK(run("g2 " + tags + " --channels 2,2 --out " + dir.file("z.csv")) == 2);

    const std::string g3csv = dir.file("g3.csv");
    CHECK(run("g3 " + tags + " --channels 1,3,4 --bin-ns 4 --range-ns 40 --out " +
              g3csv) == 0);
    CHECK(count_data_rows(read_text(g3csv)) == 21 * 21);

    const std::string g4csv = dir.file("g4.csv");
    CHECK(run("g4 " + tags + " --bin-ns 4 --range-ns 20 --slices=-4,0,4 --out " +
              g4csv) == 0);
    CHECK(count_data_rows(read_text(g4csv)) == 11 * 11 * 11);
    for (const std::string label : {"-4", "0", "4"}) {
        const std::string slice = dir.file("g4.tau12_" + label + "ns.csv");
        CHECK(fs::exists(slice));
        CHECK(count_data_rows(read_text(slice)) == 11 * 11);
    }
}

TEST_CASE("correct and infer chain to a physical estimate") {
    TempDir dir;
    const std::string cfg = dir.file("run.cfg");
    write_text(cfg, kSmallConfig);
    const std::string tags = dir.file("run.qtag");
    REQUIRE(run("simulate --config " + cfg + " --out " + tags) == 0);

    const std::string report = dir.file("correction.txt");
    CHECK(run("correct " + tags + " --tc-ns 20 --out " + report) == 0);
    const ConfigFile rep = parse_config_file(report);
    CHECK(rep.get_double("window.t_c_s") == doctest::Approx(2e-8));
    CHECK(rep.get_double("singles.R1") > 0.0);
    CHECK(rep.has("corrected.c_q"));

    const std::string inference = dir.file("inference.txt");
    CHECK(run("infer " + report + " --eta-prime 1,1,1,1 --out " + inference) == 0);
    const ConfigFile inf = parse_config_file(inference);
    CHECK(inf.has("fit.g_p"));
    CHECK(inf.has("estimate.g_q.quadruplets"));
    // The fitted pair rate should land near the configured source.
    CHECK(inf.get_double("fit.g_p") > 2e4);
    CHECK(inf.get_double("fit.g_p") < 2e6);

    CHECK(run("infer " + report + " --eta-prime 1,1,1 --out " + inference) == 2);
    CHECK(run("infer " + report + " --eta-prime 1,1,1,0 --out " + inference) == 2);
    CHECK(run("infer " + dir.file("no-report.txt") + " --eta-prime 1,1,1,1 --out " +
              inference) == 3);
}

TEST_CASE("an unfittable report exits with the convergence code") {
    TempDir dir;
    // Synthetic correction report whose quadruplet rate overflows the
    // initial guess: every fit step goes non-finite and is rejected.
    std::ostringstream rep;
    rep << "window.t_c_s = 2e-08\nwindow.T_m_s = 1\n";
    for (int k = 1; k <= 4; ++k) rep << "singles.R" << k << " = 1e6\n";
    rep << "corrected.c13 = 100\ncorrected.c14 = 100\n"
        << "corrected.c23 = 100\ncorrected.c24 = 100\n"
        << "corrected.c123 = 1\ncorrected.c124 = 1\n"
        << "corrected.c134 = 1\ncorrected.c234 = 1\n"
        << "corrected.c_q = 1e308\n";
    const std::string report = dir.file("report.txt");
    write_text(report, rep.str());
    CHECK(run("infer " + report + " --eta-prime 1,1,1,1 --out " +
              dir.file("inference.txt")) == 4);
}

TEST_CASE("oracle grids") {
    TempDir dir;
    const std::string out = dir.file("oracle.csv");
    CHECK(run("oracle --kind g2-cross --bin-ns 2 --range-ns 60 --out " + out) == 0);
    CHECK(count_data_rows(read_text(out)) == 61);
    CHECK(run("oracle --kind g2-auto --arm stokes --out " + out) == 0);
    CHECK(run("oracle --kind g3 --bin-ns 4 --range-ns 20 --out " + out) == 0);
    CHECK(count_data_rows(read_text(out)) == 11 * 11);
    CHECK(run("oracle --kind g4 --bin-ns 8 --range-ns 16 --out " + out) == 0);
    CHECK(count_data_rows(read_text(out)) == 5 * 5 * 5);
    CHECK(run("oracle --kind nonsense --out " + out) == 2);
    CHECK(run("oracle --kind g2-auto --arm sideways --out " + out) == 2);
    CHECK(run("oracle --kind g2-cross --tau-c-ns=-1 --out " + out) == 2);
}

TEST_CASE("pump sweep emits one row per level") {
    TempDir dir;
    const std::string cfg = dir.file("run.cfg");
    write_text(cfg,
               "[source]\ng_p = 1e5\ng_q = 5e3\n[detector]\n"
               "eta_1 = 0.25\neta_2 = 0.25\neta_3 = 0.25\neta_4 = 0.25\n"
               "[run]\nduration_s = 1.0\nseed = 3\n");
    const std::string out = dir.file("sweep.csv");
    CHECK(run("sweep --config " + cfg + " --levels 0.5,1 --tc-ns 20 --out " +
              out) == 0);
    const std::string text = read_text(out);
    CHECK(count_data_rows(text) == 2);
    CHECK(text.find("# columns = level,pump,R1,R2,R3,R4,") != std::string::npos);
    CHECK(run("sweep --config " + cfg + " --levels 0.5,oops --out " + out) == 2);
}
