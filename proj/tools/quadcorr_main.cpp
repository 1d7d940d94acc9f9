// quadcorr: command-line front end for the four-channel coincidence toolkit.
//
// Subcommands wire the library modules into batch pipelines:
//   simulate  config -> QTAG tag file
//   g2        tag file -> pair-delay histogram CSV
//   g3        tag file -> triplet-delay histogram CSV
//   g4        tag file -> quadruplet histogram CSV + per-tau12 slices
//   correct   tag file -> windowed rates + accidental-corrected report
//   infer     correction report -> generation-rate inference report
//   oracle    analytic correlation-model grid dump CSV
//   sweep     pump-power series of simulate+correct, one CSV row per level
//
// Every output <out> gets a provenance manifest at <out>.manifest with the
// resolved parameters and content digests of inputs and outputs; two runs of
// the same command produce byte-identical manifests.
//
// Exit codes: 0 success, 2 invalid flags/config/input values, 3 I/O or tag
// file format error, 4 rate inference failed to converge.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "quadcorr/accidentals.hpp"
#include "quadcorr/coincidence.hpp"
#include "quadcorr/config.hpp"
#include "quadcorr/errors.hpp"
#include "quadcorr/gaussian_oracle.hpp"
#include "quadcorr/histograms.hpp"
#include "quadcorr/rates.hpp"
#include "quadcorr/report.hpp"
#include "quadcorr/simulator.hpp"
#include "quadcorr/tagstream.hpp"
#include "quadcorr/windows.hpp"

namespace {

using namespace quadcorr;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) out.push_back(item);
    return out;
}

double parse_double_item(const std::string& raw, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(raw, &used);
    } catch (const std::exception&) {
        throw InvalidConfig(what + ": not a number: " + raw);
    }
    if (used != raw.size()) throw InvalidConfig(what + ": trailing junk in: " + raw);
    return v;
}

std::vector<int> parse_channels(const std::string& text, std::size_t expected) {
    const auto items = split_list(text);
    if (items.size() != expected)
        throw InvalidConfig("--channels: expected " + std::to_string(expected) +
                            " comma-separated channels, got: " + text);
    std::vector<int> out;
    for (const auto& item : items) {
        const double v = parse_double_item(item, "--channels");
        const int ch = static_cast<int>(v);
        if (v != ch || !is_valid_channel(ch))
            throw InvalidConfig("--channels: channel must be 1..4, got: " + item);
        for (int prev : out)
            if (prev == ch) throw InvalidConfig("--channels: duplicate channel " + item);
        out.push_back(ch);
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
    const auto items = split_list(text);
    if (items.empty()) throw InvalidConfig(what + ": empty list");
    std::vector<double> out;
    for (const auto& item : items) out.push_back(parse_double_item(item, what));
    return out;
}

int64_t ns_to_ticks(double ns, uint64_t tick_ps, const std::string& what) {
    if (!(ns > 0)) throw InvalidConfig(what + ": must be positive");
    const auto ticks = static_cast<int64_t>(std::llround(ns * 1000.0 / tick_ps));
    if (ticks < 1)
        throw InvalidConfig(what + ": narrower than one tick (" +
                            std::to_string(tick_ps) + " ps)");
    return ticks;
}

int64_t floor_div(int64_t a, int64_t b) {
    return a >= 0 ? a / b : -((-a + b - 1) / b);
}

unsigned channel_mask(const std::vector<int>& channels) {
    unsigned mask = 0;
    for (int ch : channels) mask |= 1u << (ch - 1);
    return mask;
}

uint64_t file_tick_ps(const std::string& path) {
    TagFileScanner scanner(path);
    return scanner.header().tick_duration_ps;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    return os;
}

void close_output(std::ofstream& os, const std::string& path) {
    os.flush();
    if (!os) throw IoError("write failed: " + path);
}

void add_input(RunManifest& m, const std::string& key, const std::string& path) {
    m.add(key, path);
    m.add(key + ".digest", hex_digest(fnv1a64_file(path)));
}

void add_output(RunManifest& m, const std::string& key, const std::string& path) {
    m.add(key, path);
    m.add(key + ".digest", hex_digest(fnv1a64_file(path)));
}

void finish_manifest(RunManifest& m, const std::string& out_path) {
    m.write_file(out_path + ".manifest");
}

std::string format_ns(double ns) {
    std::ostringstream os;
    os << ns;
    return os.str();
}

std::string slice_path(const std::string& out, const std::string& label) {
    const std::filesystem::path p(out);
    std::filesystem::path q = p.parent_path() / p.stem();
    return q.string() + ".tau12_" + label + "ns" + p.extension().string();
}

// Resolved parameters are echoed under their config-schema names, so the
// parameter block of a manifest can be fed straight back as a config file.
void add_sim_params(RunManifest& m, const SimConfig& cfg) {
    m.add("source.g_p", cfg.g_p);
    m.add("source.g_q", cfg.g_q);
    m.add("waveform.tau_c_ns", cfg.tau_c_ns);
    m.add("waveform.tau_0_ns", cfg.tau_0_ns);
    m.add("waveform.tau_b_ns", cfg.tau_b_ns);
    m.add("background.bg_s", cfg.bg_s);
    m.add("background.bg_a", cfg.bg_a);
    for (int k = 0; k < 4; ++k) {
        m.add("background.dark_" + std::to_string(k + 1), cfg.dark[k]);
    }
    for (int k = 0; k < 4; ++k) {
        m.add("detector.eta_" + std::to_string(k + 1), cfg.eta[k]);
    }
    m.add_u64("detector.dead_time_ticks", cfg.dead_time_ticks);
    m.add("run.duration_s", cfg.duration_s);
    m.add_u64("run.seed", cfg.seed);
    m.add_u64("run.tick_ps", cfg.tick_ps);
}

// ---- simulate -----------------------------------------------------------------

struct SimulateOpts {
    std::string config;
    std::string out;
    uint64_t seed = 0;
    bool seed_given = false;
};

void run_simulate(const SimulateOpts& opt) {
    SimConfig cfg = sim_config_from(parse_config_file(opt.config));
    if (opt.seed_given) cfg.seed = opt.seed;
    cfg.validate();
    simulate_to_file(cfg, opt.out);

    RunManifest m;
    m.subcommand = "simulate";
    add_input(m, "config", opt.config);
    add_sim_params(m, cfg);
    add_output(m, "output", opt.out);
    finish_manifest(m, opt.out);
}

// ---- g2 / g3 / g4 ---------------------------------------------------------------

struct HistogramOpts {
    std::string tag_file;
    std::string out;
    std::string channels;
    double bin_ns = 2.0;
    double range_ns = 60.0;
    std::string slices = "-2,0,2";  // g4 only
};

void run_g2(const HistogramOpts& opt) {
    const auto ch = parse_channels(opt.channels, 2);
    const TagStream stream = read_tag_file(opt.tag_file, channel_mask(ch));
    const uint64_t tick_ps = stream.tick_duration_ps();
    const int64_t bin_ticks = ns_to_ticks(opt.bin_ns, tick_ps, "--bin-ns");
    const int64_t range_ticks = ns_to_ticks(opt.range_ns, tick_ps, "--range-ns");

    const auto pairs = find_pairs(stream, ch[0], ch[1], range_ticks);
    const auto rates = singles_rates(stream);
    auto hist = histogram_pairs(pairs, bin_ticks, range_ticks, tick_ps);
    hist = normalized_g2(hist, rates[ch[0] - 1], rates[ch[1] - 1],
                         stream.duration_seconds());

    auto os = open_output(opt.out);
    write_csv(os, hist, {{"channels", opt.channels}, {"input", opt.tag_file}});
    close_output(os, opt.out);

    RunManifest m;
    m.subcommand = "g2";
    add_input(m, "input", opt.tag_file);
    m.add("channels", opt.channels);
    m.add("bin_ns", opt.bin_ns);
    m.add("range_ns", opt.range_ns);
    m.add_u64("pairs", pairs.size());
    add_output(m, "output", opt.out);
    finish_manifest(m, opt.out);
}

void run_g3(const HistogramOpts& opt) {
    const auto ch = parse_channels(opt.channels, 3);  // anchor first
    const TagStream stream = read_tag_file(opt.tag_file, channel_mask(ch));
    const uint64_t tick_ps = stream.tick_duration_ps();
    const int64_t bin_ticks = ns_to_ticks(opt.bin_ns, tick_ps, "--bin-ns");
    const int64_t range_ticks = ns_to_ticks(opt.range_ns, tick_ps, "--range-ns");

    const auto pairs_b = find_pairs(stream, ch[0], ch[1], range_ticks);
    const auto pairs_c = find_pairs(stream, ch[0], ch[2], range_ticks);
    const auto triplets = find_triplets(pairs_b, pairs_c);
    const auto rates = singles_rates(stream);
    auto hist = histogram_triplets(triplets, bin_ticks, range_ticks, tick_ps);
    hist = normalized_g3(hist, rates[ch[0] - 1], rates[ch[1] - 1], rates[ch[2] - 1],
                         stream.duration_seconds());

    auto os = open_output(opt.out);
    write_csv(os, hist, {{"channels", opt.channels}, {"input", opt.tag_file}});
    close_output(os, opt.out);

    RunManifest m;
    m.subcommand = "g3";
    add_input(m, "input", opt.tag_file);
    m.add("channels", opt.channels);
    m.add("bin_ns", opt.bin_ns);
    m.add("range_ns", opt.range_ns);
    m.add_u64("triplets", triplets.size());
    add_output(m, "output", opt.out);
    finish_manifest(m, opt.out);
}

void run_g4(const HistogramOpts& opt) {
    const TagStream stream = read_tag_file(opt.tag_file);
    const uint64_t tick_ps = stream.tick_duration_ps();
    const int64_t bin_ticks = ns_to_ticks(opt.bin_ns, tick_ps, "--bin-ns");
    const int64_t range_ticks = ns_to_ticks(opt.range_ns, tick_ps, "--range-ns");
    const auto slice_ns = parse_doubles(opt.slices, "--slices");

    // Anchor channel 1 carries both histogram axes tau_31 and tau_41; the
    // closing channel-2 join needs twice the range since only |t1 - t2| is
    // bounded by the histogram, not |t4 - t2|.
    const auto pairs_13 = find_pairs(stream, 1, 3, range_ticks);
    const auto pairs_14 = find_pairs(stream, 1, 4, range_ticks);
    const auto triplets = find_triplets(pairs_13, pairs_14);
    const auto pairs_24 = find_pairs(stream, 2, 4, 2 * range_ticks);
    const auto quads = find_quadruplets(triplets, pairs_24);
    const auto hist = histogram_quadruplets(quads, bin_ticks, range_ticks, tick_ps);

    auto os = open_output(opt.out);
    write_csv(os, hist, {{"input", opt.tag_file}});
    close_output(os, opt.out);

    RunManifest m;
    m.subcommand = "g4";
    add_input(m, "input", opt.tag_file);
    m.add("bin_ns", opt.bin_ns);
    m.add("range_ns", opt.range_ns);
    m.add("slices_ns", opt.slices);
    m.add_u64("quadruplets", quads.size());
    add_output(m, "output", opt.out);

    for (double s : slice_ns) {
        const auto tau_ticks = static_cast<int64_t>(std::llround(s * 1000.0 / tick_ps));
        const int64_t bin = floor_div(tau_ticks, bin_ticks);
        const auto sliced = slice_tau12(hist, bin);
        const std::string label = format_ns(s);
        const std::string path = slice_path(opt.out, label);
        auto slice_os = open_output(path);
        write_csv(slice_os, sliced,
                  {{"input", opt.tag_file}, {"tau12_ns", label}});
        close_output(slice_os, path);
        add_output(m, "output.slice_" + label, path);
    }
    finish_manifest(m, opt.out);
}

// ---- correct / infer ------------------------------------------------------------

struct CorrectOpts {
    std::string tag_file;
    std::string out;
    double tc_ns = 20.0;
    double cross_center_ns = 0.0;
    bool cross_center_given = false;
};

void run_correct(const CorrectOpts& opt) {
    const uint64_t tick_ps = file_tick_ps(opt.tag_file);
    const int64_t tc_ticks = ns_to_ticks(opt.tc_ns, tick_ps, "--tc-ns");
    std::optional<int64_t> cross_center;
    if (opt.cross_center_given) {
        cross_center = static_cast<int64_t>(
            std::llround(opt.cross_center_ns * 1000.0 / tick_ps));
    }

    const WindowCounts w = window_counts_file(opt.tag_file, tc_ticks, cross_center);
    const CorrectedRates c = correct_all(w);

    auto os = open_output(opt.out);
    write_correction_report(os, w, c);
    close_output(os, opt.out);

    RunManifest m;
    m.subcommand = "correct";
    add_input(m, "input", opt.tag_file);
    m.add("tc_ns", opt.tc_ns);
    m.add_u64("tc_ticks", static_cast<uint64_t>(tc_ticks));
    m.add_u64("cross_center_ticks", static_cast<uint64_t>(w.cross_center_ticks));
    add_output(m, "output", opt.out);
    finish_manifest(m, opt.out);
}

struct InferOpts {
    std::string report;
    std::string out;
    std::string eta_prime = "1,1,1,1";
};

void run_infer(const InferOpts& opt) {
    const auto etas = parse_doubles(opt.eta_prime, "--eta-prime");
    if (etas.size() != 4)
        throw InvalidConfig("--eta-prime: expected 4 comma-separated values");
    std::array<double, 4> eta_prime{etas[0], etas[1], etas[2], etas[3]};

    const ConfigFile report = parse_config_file(opt.report);
    InferenceInputs in;
    static constexpr const char* kPairKeys[4] = {
        "corrected.c13", "corrected.c14", "corrected.c23", "corrected.c24"};
    static constexpr const char* kTripleKeys[4] = {
        "corrected.c123", "corrected.c124", "corrected.c134", "corrected.c234"};
    for (int k = 0; k < 4; ++k) in.c_pair_cross[k] = report.get_double(kPairKeys[k]);
    for (int k = 0; k < 4; ++k) in.c_triple[k] = report.get_double(kTripleKeys[k]);
    in.c_q = report.get_double("corrected.c_q");

    const InferenceResult res = infer_rates(in, eta_prime);

    auto os = open_output(opt.out);
    write_inference_report(os, in, eta_prime, res);
    close_output(os, opt.out);

    RunManifest m;
    m.subcommand = "infer";
    add_input(m, "input", opt.report);
    m.add("eta_prime", opt.eta_prime);
    add_output(m, "output", opt.out);
    finish_manifest(m, opt.out);
}

// ---- oracle ---------------------------------------------------------------------

struct OracleOpts {
    std::string kind;
    std::string out;
    std::string arm = "stokes";
    double r0 = 1.0;
    double c0 = 1.0;
    double tau_c_ns = 16.0;
    double tau_0_ns = 8.0;
    double tau_s_ns = 16.0;
    double tau_a_ns = 16.0;
    bool one_sided = false;
    double bin_ns = 2.0;
    double range_ns = 60.0;
};

void run_oracle(const OracleOpts& opt) {
    CorrelationModel model;
    model.r0 = opt.r0;
    model.c0 = opt.c0;
    model.tau_c = opt.tau_c_ns;
    model.tau_0 = opt.tau_0_ns;
    model.tau_s = opt.tau_s_ns;
    model.tau_a = opt.tau_a_ns;
    model.one_sided = opt.one_sided;
    validate(model);

    if (!(opt.bin_ns > 0) || !(opt.range_ns > 0))
        throw InvalidConfig("--bin-ns and --range-ns must be positive");
    const int n_side = static_cast<int>(opt.range_ns / opt.bin_ns);
    auto grid_ns = [&](int k) { return k * opt.bin_ns; };

    Arm arm = Arm::stokes;
    if (opt.arm == "anti")
        arm = Arm::anti;
    else if (opt.arm != "stokes")
        throw InvalidConfig("--arm: must be stokes or anti");

    auto os = open_output(opt.out);
    os << std::setprecision(17);
    os << "# kind = " << opt.kind << "\n";
    os << "# r0 = " << model.r0 << "\n# c0 = " << model.c0 << "\n";
    os << "# tau_c_ns = " << model.tau_c << "\n# tau_0_ns = " << model.tau_0 << "\n";
    os << "# tau_s_ns = " << model.tau_s << "\n# tau_a_ns = " << model.tau_a << "\n";
    os << "# one_sided = " << (model.one_sided ? 1 : 0) << "\n";
    os << "# step_ns = " << opt.bin_ns << "\n# range_ns = " << opt.range_ns << "\n";

    const double r0 = model.r0;
    if (opt.kind == "g2-cross") {
        os << "# columns = tau_ns,g2\n";
        for (int k = -n_side; k <= n_side; ++k)
            os << grid_ns(k) << "," << g2_cross(model, grid_ns(k)) << "\n";
    } else if (opt.kind == "g2-auto") {
        os << "# arm = " << opt.arm << "\n";
        os << "# columns = tau_ns,g2\n";
        for (int k = -n_side; k <= n_side; ++k)
            os << grid_ns(k) << "," << g2_auto(model, grid_ns(k), arm) << "\n";
    } else if (opt.kind == "g3") {
        os << "# columns = tau_3s_ns,tau_4s_ns,g3\n";
        for (int k3 = -n_side; k3 <= n_side; ++k3)
            for (int k4 = -n_side; k4 <= n_side; ++k4) {
                const double t3 = grid_ns(k3), t4 = grid_ns(k4);
                os << t3 << "," << t4 << ","
                   << G3_rate(model, t3, t4, t3 - t4) / (r0 * r0 * r0) << "\n";
            }
    } else if (opt.kind == "g4") {
        os << "# columns = tau12_ns,tau31_ns,tau41_ns,g4\n";
        const double norm = r0 * r0 * r0 * r0;
        for (int k1 = -n_side; k1 <= n_side; ++k1)
            for (int k2 = -n_side; k2 <= n_side; ++k2)
                for (int k3 = -n_side; k3 <= n_side; ++k3) {
                    const double tau12 = grid_ns(k1);
                    const double tau31 = grid_ns(k2);
                    const double tau41 = grid_ns(k3);
                    os << tau12 << "," << tau31 << "," << tau41 << ","
                       << G4_rate(model, 0.0, -tau12, tau31, tau41) / norm << "\n";
                }
    } else {
        throw InvalidConfig("--kind: must be g2-cross, g2-auto, g3, or g4");
    }
    close_output(os, opt.out);

    RunManifest m;
    m.subcommand = "oracle";
    m.add("kind", opt.kind);
    if (opt.kind == "g2-auto") m.add("arm", opt.arm);
    m.add("r0", model.r0);
    m.add("c0", model.c0);
    m.add("tau_c_ns", model.tau_c);
    m.add("tau_0_ns", model.tau_0);
    m.add("tau_s_ns", model.tau_s);
    m.add("tau_a_ns", model.tau_a);
    m.add("one_sided", std::string(model.one_sided ? "1" : "0"));
    m.add("step_ns", opt.bin_ns);
    m.add("range_ns", opt.range_ns);
    add_output(m, "output", opt.out);
    finish_manifest(m, opt.out);
}

// ---- sweep ----------------------------------------------------------------------

struct SweepOpts {
    std::string config;
    std::string out;
    std::string levels = "0.25,0.35355339059327379,0.5,0.70710678118654757,1";
    double tc_ns = 20.0;
    uint64_t seed = 0;
    bool seed_given = false;
};

void run_sweep(const SweepOpts& opt) {
    SimConfig base = sim_config_from(parse_config_file(opt.config));
    if (opt.seed_given) base.seed = opt.seed;
    base.validate();
    const auto pumps = parse_doubles(opt.levels, "--levels");
    const int64_t tc_ticks = ns_to_ticks(opt.tc_ns, base.tick_ps, "--tc-ns");

    auto os = open_output(opt.out);
    os << std::setprecision(17);
    os << "# columns = level,pump,R1,R2,R3,R4,c13,c14,c23,c24,"
          "c123,c124,c134,c234,c1234,c_p,c_q\n";
    os << "# tc_ns = " << opt.tc_ns << "\n";
    os << "# duration_s = " << base.duration_s << "\n";
    for (std::size_t i = 0; i < pumps.size(); ++i) {
        const SimConfig cfg = scaled_config(base, pumps[i], i);
        const TagStream stream = simulate(cfg);
        const WindowCounts w = window_counts(stream, tc_ticks);
        const CorrectedRates c = correct_all(w);
        os << i << "," << pumps[i];
        for (int k = 1; k <= 4; ++k) os << "," << w.R_single(k);
        os << "," << c.c_ij(1, 3) << "," << c.c_ij(1, 4) << "," << c.c_ij(2, 3)
           << "," << c.c_ij(2, 4);
        os << "," << c.c_ijk(1, 2, 3) << "," << c.c_ijk(1, 2, 4) << ","
           << c.c_ijk(1, 3, 4) << "," << c.c_ijk(2, 3, 4);
        os << "," << c.c_1234 << "," << c.c_p << "," << c.c_q << "\n";
    }
    close_output(os, opt.out);

    RunManifest m;
    m.subcommand = "sweep";
    add_input(m, "config", opt.config);
    add_sim_params(m, base);
    m.add("levels", opt.levels);
    m.add("tc_ns", opt.tc_ns);
    add_output(m, "output", opt.out);
    finish_manifest(m, opt.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"four-channel photon-coincidence toolkit"};
    app.require_subcommand(1);

    SimulateOpts sim_opt;
    auto* sim = app.add_subcommand("simulate", "generate a tag file from a config");
    sim->add_option("--config", sim_opt.config, "run config file")->required();
    sim->add_option("--out", sim_opt.out, "output tag file")->required();
    auto* sim_seed = sim->add_option("--seed", sim_opt.seed, "override config seed");

    HistogramOpts g2_opt;
    g2_opt.channels = "1,3";
    auto* g2 = app.add_subcommand("g2", "pair-delay histogram, normalized");
    g2->add_option("tag_file", g2_opt.tag_file, "input tag file")->required();
    g2->add_option("--channels", g2_opt.channels, "two channels i,j")
        ->capture_default_str();
    g2->add_option("--bin-ns", g2_opt.bin_ns, "bin width")->capture_default_str();
    g2->add_option("--range-ns", g2_opt.range_ns, "delay range")->capture_default_str();
    g2->add_option("--out", g2_opt.out, "output CSV")->required();

    HistogramOpts g3_opt;
    g3_opt.channels = "1,3,4";
    auto* g3 = app.add_subcommand("g3", "triplet-delay histogram, normalized");
    g3->add_option("tag_file", g3_opt.tag_file, "input tag file")->required();
    g3->add_option("--channels", g3_opt.channels, "anchor,partner,partner")
        ->capture_default_str();
    g3->add_option("--bin-ns", g3_opt.bin_ns, "bin width")->capture_default_str();
    g3->add_option("--range-ns", g3_opt.range_ns, "delay range")->capture_default_str();
    g3->add_option("--out", g3_opt.out, "output CSV")->required();

    HistogramOpts g4_opt;
    auto* g4 = app.add_subcommand("g4", "quadruplet histogram with tau12 slices");
    g4->add_option("tag_file", g4_opt.tag_file, "input tag file")->required();
    g4->add_option("--bin-ns", g4_opt.bin_ns, "bin width")->capture_default_str();
    g4->add_option("--range-ns", g4_opt.range_ns, "delay range")->capture_default_str();
    g4->add_option("--slices", g4_opt.slices, "tau12 slice positions (ns)")
        ->capture_default_str();
    g4->add_option("--out", g4_opt.out, "output CSV")->required();

    CorrectOpts cor_opt;
    auto* cor = app.add_subcommand("correct", "windowed rates + accidental correction");
    cor->add_option("tag_file", cor_opt.tag_file, "input tag file")->required();
    cor->add_option("--tc-ns", cor_opt.tc_ns, "coincidence window width")
        ->capture_default_str();
    auto* cor_center = cor->add_option("--cross-center-ns", cor_opt.cross_center_ns,
                                       "cross-arm window center (default tc/2)");
    cor->add_option("--out", cor_opt.out, "output report")->required();

    InferOpts inf_opt;
    auto* inf = app.add_subcommand("infer", "generation rates from a correction report");
    inf->add_option("report", inf_opt.report, "correction report file")->required();
    inf->add_option("--eta-prime", inf_opt.eta_prime, "per-detector efficiencies")
        ->capture_default_str();
    inf->add_option("--out", inf_opt.out, "output report")->required();

    OracleOpts ora_opt;
    auto* ora = app.add_subcommand("oracle", "analytic correlation-model grid dump");
    ora->add_option("--kind", ora_opt.kind, "g2-cross, g2-auto, g3, or g4")->required();
    ora->add_option("--arm", ora_opt.arm, "g2-auto arm: stokes or anti")
        ->capture_default_str();
    ora->add_option("--r0", ora_opt.r0, "rate scale")->capture_default_str();
    ora->add_option("--c0", ora_opt.c0, "cross amplitude")->capture_default_str();
    ora->add_option("--tau-c-ns", ora_opt.tau_c_ns, "cross decay time")
        ->capture_default_str();
    ora->add_option("--tau0-ns", ora_opt.tau_0_ns, "cross delay offset")
        ->capture_default_str();
    ora->add_option("--tau-s-ns", ora_opt.tau_s_ns, "Stokes auto decay time")
        ->capture_default_str();
    ora->add_option("--tau-a-ns", ora_opt.tau_a_ns, "anti-Stokes auto decay time")
        ->capture_default_str();
    ora->add_flag("--one-sided", ora_opt.one_sided, "one-sided cross waveform");
    ora->add_option("--bin-ns", ora_opt.bin_ns, "grid step")->capture_default_str();
    ora->add_option("--range-ns", ora_opt.range_ns, "grid range")->capture_default_str();
    ora->add_option("--out", ora_opt.out, "output CSV")->required();

    SweepOpts swp_opt;
    auto* swp = app.add_subcommand("sweep", "pump-power series of simulate+correct");
    swp->add_option("--config", swp_opt.config, "base run config file")->required();
    swp->add_option("--levels", swp_opt.levels, "relative pump powers")
        ->capture_default_str();
    swp->add_option("--tc-ns", swp_opt.tc_ns, "coincidence window width")
        ->capture_default_str();
    auto* swp_seed = swp->add_option("--seed", swp_opt.seed, "override config seed");
    swp->add_option("--out", swp_opt.out, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    sim_opt.seed_given = sim_seed->count() > 0;
    swp_opt.seed_given = swp_seed->count() > 0;
    cor_opt.cross_center_given = cor_center->count() > 0;

    try {
        if (sim->parsed()) run_simulate(sim_opt);
        if (g2->parsed()) run_g2(g2_opt);
        if (g3->parsed()) run_g3(g3_opt);
        if (g4->parsed()) run_g4(g4_opt);
        if (cor->parsed()) run_correct(cor_opt);
        if (inf->parsed()) run_infer(inf_opt);
        if (ora->parsed()) run_oracle(ora_opt);
        if (swp->parsed()) run_sweep(swp_opt);
        return 0;
    } catch (const NoConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const BadMagic& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const UnsupportedVersion& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NonMonotonicTime& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DuplicateChannelTick& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const TruncatedRecord& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const TicksOverflow& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const InvalidChannelMask& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const TagBeyondDuration& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
