#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "quadcorr/accidentals.hpp"
#include "quadcorr/coincidence.hpp"
#include "quadcorr/errors.hpp"
#include "quadcorr/simulator.hpp"
#include "quadcorr/tagstream.hpp"
#include "quadcorr/windows.hpp"

using namespace quadcorr;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

SimConfig base_config() {
    SimConfig cfg;
    cfg.g_p = 0.0;
    cfg.g_q = 0.0;
    cfg.duration_s = 1.0;
    cfg.eta = {0.5, 0.5, 0.5, 0.5};
    cfg.seed = 42;
    return cfg;
}

// Poisson mean check at ~5 sigma.
void check_poisson(double observed, double expected) {
    CHECK(std::abs(observed - expected) < 5.0 * std::sqrt(expected) + 1.0);
}

}  // namespace

TEST_CASE("config validation") {
    SimConfig cfg = base_config();
    cfg.validate();

    cfg.g_p = -1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = base_config();
    cfg.eta = {0.6, 0.6, 0.1, 0.1};
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = base_config();
    cfg.eta = {1.2, 0.0, 0.1, 0.1};
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = base_config();
    cfg.duration_s = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = base_config();
    cfg.tick_ps = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = base_config();
    cfg.tau_c_ns = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = base_config();
    cfg.tau_b_ns = -1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = base_config();
    cfg.tau_0_ns = -1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
}

TEST_CASE("deterministic and seed-sensitive") {
    SimConfig cfg = base_config();
    cfg.g_p = 5e4;
    cfg.bg_s = 1e4;
    cfg.dark = {100.0, 100.0, 100.0, 100.0};
    const TagStream a = simulate(cfg);
    const TagStream b = simulate(cfg);
    CHECK(a == b);
    cfg.seed = 43;
    const TagStream c = simulate(cfg);
    CHECK_FALSE(a == c);

    a.validate();
    for (int ch = 1; ch <= 4; ++ch)
        for (uint64_t t : a.channel(ch)) CHECK(t < a.t_m_ticks());
    CHECK(a.t_m_ticks() == cfg.t_m_ticks());
    CHECK(a.tick_duration_ps() == cfg.tick_ps);
}

TEST_CASE("file streaming matches the in-memory engine byte for byte") {
    SimConfig cfg = base_config();
    cfg.g_p = 2e4;
    cfg.g_q = 1e3;
    cfg.bg_s = 5e3;
    cfg.bg_a = 5e3;
    cfg.dark = {50.0, 0.0, 25.0, 0.0};
    cfg.seed = 7;

    const std::string direct = temp_path("qc_sim_direct.qtag");
    const std::string streamed = temp_path("qc_sim_streamed.qtag");
    write_tag_file(simulate(cfg), direct);
    simulate_to_file(cfg, streamed);
    CHECK(read_bytes(direct) == read_bytes(streamed));
    std::remove(direct.c_str());
    std::remove(streamed.c_str());
}

TEST_CASE("silent detectors produce an empty stream of full duration") {
    SimConfig cfg = base_config();
    cfg.duration_s = 3.0;
    const TagStream s = simulate(cfg);
    CHECK(s.empty());
    CHECK(s.t_m_ticks() == uint64_t{1'500'000'000});  // 3 s at 2 ns
}

TEST_CASE("dark counts are per-detector Poisson processes") {
    SimConfig cfg = base_config();
    cfg.duration_s = 10.0;
    cfg.dark = {1000.0, 2000.0, 500.0, 0.0};
    cfg.eta = {0.1, 0.1, 0.1, 0.1};  // must not thin darks
    const TagStream s = simulate(cfg);
    check_poisson(static_cast<double>(s.channel(1).size()), 10'000.0);
    check_poisson(static_cast<double>(s.channel(2).size()), 20'000.0);
    check_poisson(static_cast<double>(s.channel(3).size()), 5'000.0);
    CHECK(s.channel(4).empty());
}

TEST_CASE("arm backgrounds are thinned by the channel efficiencies") {
    SimConfig cfg = base_config();
    cfg.duration_s = 10.0;
    cfg.bg_s = 1e5;
    cfg.bg_a = 4e4;
    cfg.eta = {0.3, 0.2, 0.45, 0.15};
    const TagStream s = simulate(cfg);
    check_poisson(static_cast<double>(s.channel(1).size()), 0.3 * 1e6);
    check_poisson(static_cast<double>(s.channel(2).size()), 0.2 * 1e6);
    check_poisson(static_cast<double>(s.channel(3).size()), 0.45 * 4e5);
    check_poisson(static_cast<double>(s.channel(4).size()), 0.15 * 4e5);
}

TEST_CASE("pair events correlate the arms at the waveform delay") {
    SimConfig cfg = base_config();
    cfg.duration_s = 10.0;
    cfg.g_p = 1e5;
    cfg.eta = {0.4, 0.0, 0.5, 0.0};
    cfg.tau_0_ns = 8.0;
    cfg.tau_c_ns = 16.0;
    const TagStream s = simulate(cfg);
    check_poisson(static_cast<double>(s.channel(1).size()), 0.4 * 1e6);
    check_poisson(static_cast<double>(s.channel(3).size()), 0.5 * 1e6);

    // Matched pairs dominate a +/-100 ns search window; their mean delay is
    // tau_0 + tau_c = 24 ns.
    const auto pairs = find_pairs(s, 1, 3, 50);  // 100 ns at 2 ns ticks
    REQUIRE(pairs.size() > 100'000);
    double sum = 0.0;
    for (const auto& p : pairs)
        sum += (static_cast<double>(p.t_j) - static_cast<double>(p.t_i)) * 2.0;
    const double mean_delay_ns = sum / static_cast<double>(pairs.size());
    CHECK(mean_delay_ns > 21.0);
    CHECK(mean_delay_ns < 26.0);
}

TEST_CASE("double-pair events populate same-arm coincidences") {
    SimConfig cfg = base_config();
    cfg.duration_s = 20.0;
    cfg.g_q = 1e4;
    cfg.tau_b_ns = 16.0;
    const TagStream s = simulate(cfg);
    // Two Stokes photons per event, each detected with probability 1/2.
    // When both land on the same detector and quantize to the same 2 ns
    // tick, the duplicate is merged away: with a uniform tick phase that
    // happens with probability 1 - (b/w)(1 - exp(-w/b)) for a Laplace(b)
    // separation and tick width w, times 1/4 for the shared detector.
    const double p_same_tick = 1.0 - (16.0 / 2.0) * (1.0 - std::exp(-2.0 / 16.0));
    const double expected_singles = 2e5 * (1.0 - 0.25 * p_same_tick);
    check_poisson(static_cast<double>(s.channel(1).size()), expected_singles);
    check_poisson(static_cast<double>(s.channel(2).size()), expected_singles);

    // Corrected same-arm pair rate: both photons split to different
    // detectors (probability 1/2) and the Laplace(16 ns) separation falls in
    // the centered 20 ns window (probability 1 - exp(-10/16), up to tick
    // quantization at the edges).
    const WindowCounts w = window_counts(s, 10);
    const CorrectedRates c = correct_all(w);
    const double expected = 1e4 * 0.5 * (1.0 - std::exp(-10.0 / 16.0));
    CHECK(c.c_ij(1, 2) > 0.85 * expected);
    CHECK(c.c_ij(1, 2) < 1.15 * expected);
    // The anti-arm separation adds the difference of the two retrieval
    // delays -- Exp(16) minus Exp(16), another Laplace(16) -- on top of the
    // seed spread, so its window capture is 1 - exp(-a/b)(1 + a/(2b)).
    const double expected_anti =
        1e4 * 0.5 * (1.0 - std::exp(-10.0 / 16.0) * (1.0 + 10.0 / 32.0));
    CHECK(c.c_ij(3, 4) > 0.85 * expected_anti);
    CHECK(c.c_ij(3, 4) < 1.15 * expected_anti);
}

TEST_CASE("uncorrelated-pairs variant only removes double-pair emission") {
    SimConfig cfg = base_config();
    cfg.duration_s = 5.0;
    cfg.g_p = 5e4;
    cfg.g_q = 2e3;
    cfg.bg_s = 1e4;
    SimConfig no_q = cfg;
    no_q.g_q = 0.0;
    CHECK(simulate_uncorrelated_pairs(cfg) == simulate(no_q));
}

TEST_CASE("dead time enforces a minimum same-channel separation") {
    SimConfig cfg = base_config();
    cfg.duration_s = 1.0;
    cfg.dark = {1e6, 0.0, 0.0, 0.0};
    cfg.dead_time_ticks = 50;
    const TagStream s = simulate(cfg);
    const auto& ticks = s.channel(1);
    REQUIRE(ticks.size() > 100);
    for (std::size_t i = 1; i < ticks.size(); ++i)
        CHECK(ticks[i] - ticks[i - 1] >= 50);

    cfg.dead_time_ticks = 0;
    const TagStream unfiltered = simulate(cfg);
    CHECK(unfiltered.channel(1).size() > ticks.size());
}

TEST_CASE("pump scaling") {
    SimConfig cfg = base_config();
    cfg.g_p = 1e6;
    cfg.g_q = 4e4;
    cfg.bg_s = 2e5;
    cfg.bg_a = 3e5;
    cfg.dark = {100.0, 200.0, 300.0, 400.0};
    const SimConfig half = scaled_config(cfg, 0.5, 2);
    CHECK(half.g_p == doctest::Approx(5e5));
    CHECK(half.g_q == doctest::Approx(1e4));  // quadratic
    CHECK(half.bg_s == doctest::Approx(1e5));
    CHECK(half.bg_a == doctest::Approx(1.5e5));
    CHECK(half.dark == cfg.dark);  // pump-independent
    CHECK(half.eta == cfg.eta);
    CHECK(half.duration_s == cfg.duration_s);
    CHECK(half.seed != cfg.seed);
    const SimConfig other_level = scaled_config(cfg, 0.5, 3);
    CHECK(other_level.seed != half.seed);
    CHECK_THROWS_AS(scaled_config(cfg, -1.0, 0), InvalidConfig);

    const auto streams = power_sweep(cfg, {0.25, 0.5});
    CHECK(streams.size() == 2);
    CHECK(streams[0].size() < streams[1].size());
}
