#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "quadcorr/coincidence.hpp"
#include "quadcorr/errors.hpp"
#include "quadcorr/histograms.hpp"
#include "quadcorr/random.hpp"
#include "quadcorr/tagstream.hpp"

using namespace quadcorr;

namespace {

PairEvent pair13(std::uint64_t t_i, std::uint64_t t_j) { return {t_i, t_j, 1, 3}; }

int count_lines(const std::string& text, bool data_only) {
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        if (data_only && (line.empty() || line[0] == '#')) continue;
        ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("bin placement follows the floor convention") {
    // bin b covers b*dt <= tau < (b+1)*dt; with dt = 2 ticks and range 6
    // the axis is bins -3..3, i.e. lower edges -6,-4,...,+6 ticks.
    std::vector<PairEvent> pairs = {
        pair13(100, 100),  // tau 0   -> bin 0
        pair13(100, 101),  // tau 1   -> bin 0
        pair13(100, 102),  // tau 2   -> bin 1
        pair13(100, 99),   // tau -1  -> bin -1
        pair13(100, 98),   // tau -2  -> bin -1
        pair13(100, 97),   // tau -3  -> bin -2
        pair13(100, 107),  // tau 7   -> bin 3
        pair13(100, 93),   // tau -7  -> bin -4: outside, dropped
        pair13(100, 108),  // tau 8   -> bin 4: outside, dropped
    };
    const DelayHistogram1D h = histogram_pairs(pairs, 2, 6);
    CHECK(h.axis_bins() == 7);
    CHECK(h.min_bin() == -3);
    REQUIRE(h.counts.size() == 7);
    // index = bin - min_bin
    CHECK(h.counts[3] == 2);  // bin 0
    CHECK(h.counts[4] == 1);  // bin 1
    CHECK(h.counts[2] == 2);  // bin -1
    CHECK(h.counts[1] == 1);  // bin -2
    CHECK(h.counts[6] == 1);  // bin 3
    CHECK(h.counts[0] == 0);
    std::uint64_t total = 0;
    for (auto c : h.counts) total += c;
    CHECK(total == 7);

    CHECK(h.bin_lower_ns(0) == doctest::Approx(-12.0));  // -6 ticks * 2 ns
    CHECK(h.bin_lower_ns(3) == doctest::Approx(0.0));
    CHECK(h.bin_width_ns() == doctest::Approx(4.0));

    CHECK_THROWS_AS(histogram_pairs(pairs, 0, 6), InvalidConfig);
    CHECK_THROWS_AS(histogram_pairs(pairs, 2, -1), InvalidConfig);
}

TEST_CASE("defaults give 61 bins covering +-60 ns") {
    const DelayHistogram1D h = histogram_pairs({}, 1, 30);
    CHECK(h.axis_bins() == 61);
    CHECK(h.bin_lower_ns(0) == doctest::Approx(-60.0));
    CHECK(h.bin_lower_ns(60) == doctest::Approx(60.0));
}

TEST_CASE("g2 normalization divides by the accidental rate") {
    // One pair at tau = 0; R_i = R_j = 1000/s; dt = 2 ns; T_m = 1 s.
    const DelayHistogram1D raw = histogram_pairs({pair13(100, 100)}, 1, 30);
    const DelayHistogram1D h = normalized_g2(raw, 1000.0, 1000.0, 1.0);
    REQUIRE(h.normalized.size() == 61);
    CHECK(h.normalized[30] ==
          doctest::Approx(1.0 / (1000.0 * 1000.0 * 2e-9 * 1.0)));
    CHECK(h.normalized[0] == 0.0);
    CHECK(h.r_i == 1000.0);

    CHECK_THROWS_AS(normalized_g2(raw, 0.0, 1000.0, 1.0), ZeroRate);
    CHECK_THROWS_AS(normalized_g2(raw, 1000.0, 1000.0, 0.0), ZeroRate);
}

TEST_CASE("uncorrelated tags normalize to one") {
    // Two independent 1e6/s channels for 0.2 s: every bin's g2 is a Poisson
    // estimate with mean 1 and sigma ~0.05; allow 5 sigma.
    TagStream s(2000, 100'000'000);
    Rng rng(424242);
    for (int ch : {1, 3}) {
        auto& v = s.mutable_channel(ch);
        for (int i = 0; i < 200'000; ++i)
            v.push_back(rng.next_u64() % s.t_m_ticks());
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    s.validate();
    const auto pairs = find_pairs(s, 1, 3, 30);
    const auto rates = singles_rates(s);
    const auto h = normalized_g2(histogram_pairs(pairs, 1, 30), rates[0], rates[2],
                                 s.duration_seconds());
    double mean = 0.0;
    for (int b = 0; b < h.axis_bins(); ++b) {
        CHECK(h.normalized[b] > 0.75);
        CHECK(h.normalized[b] < 1.25);
        mean += h.normalized[b];
    }
    mean /= h.axis_bins();
    CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("triplet histogram axes are (t_b - t_a, t_c - t_a)") {
    std::vector<TripletEvent> triplets;
    TripletEvent tr;
    tr.t_a = 100;
    tr.t_b = 103;  // +3 ticks
    tr.t_c = 98;   // -2 ticks
    tr.channels[0] = 1;
    tr.channels[1] = 3;
    tr.channels[2] = 4;
    triplets.push_back(tr);
    const DelayHistogram2D h = histogram_triplets(triplets, 1, 30);
    CHECK(h.counts[h.at(30 + 3, 30 - 2)] == 1);
    std::uint64_t total = 0;
    for (auto c : h.counts) total += c;
    CHECK(total == 1);

    const DelayHistogram2D n = normalized_g3(h, 100.0, 200.0, 400.0, 2.0);
    CHECK(n.normalized[n.at(33, 28)] ==
          doctest::Approx(1.0 / (100.0 * 200.0 * 400.0 * 2e-9 * 2e-9 * 2.0)));
}

TEST_CASE("quadruplet histogram axes are (t1-t2, t3-t1, t4-t1)") {
    QuadEvent q{200, 195, 210, 204};
    // tau12 = +5, tau31 = +10, tau41 = +4
    const DelayHistogram3D h = histogram_quadruplets({q}, 1, 30);
    CHECK(h.counts[h.at(35, 40, 34)] == 1);

    const DelayHistogram2D s5 = slice_tau12(h, 5);
    CHECK(s5.counts[s5.at(40, 34)] == 1);
    const DelayHistogram2D s0 = slice_tau12(h, 0);
    std::uint64_t total = 0;
    for (auto c : s0.counts) total += c;
    CHECK(total == 0);
    CHECK_THROWS_AS(slice_tau12(h, 31), InvalidConfig);
    CHECK_THROWS_AS(slice_tau12(h, -31), InvalidConfig);
}

TEST_CASE("csv export is deterministic and complete") {
    std::vector<PairEvent> pairs = {pair13(100, 102), pair13(300, 297)};
    auto h = histogram_pairs(pairs, 1, 30);

    std::ostringstream first, second;
    write_csv(first, h, {{"source", "unit"}});
    write_csv(second, h, {{"source", "unit"}});
    CHECK(first.str() == second.str());
    CHECK(count_lines(first.str(), /*data_only=*/true) == 61);
    CHECK(first.str().find("# columns = tau_ns,count\n") != std::string::npos);
    CHECK(first.str().find("# source = unit\n") != std::string::npos);
    CHECK(first.str().find("# bin_ns = 2\n") != std::string::npos);

    const auto n = normalized_g2(h, 10.0, 10.0, 1.0);
    std::ostringstream norm;
    write_csv(norm, n);
    CHECK(norm.str().find("tau_ns,count,normalized") != std::string::npos);

    std::ostringstream two_d;
    write_csv(two_d, histogram_triplets({}, 1, 5));
    CHECK(count_lines(two_d.str(), true) == 11 * 11);

    std::ostringstream three_d;
    write_csv(three_d, histogram_quadruplets({}, 1, 5));
    CHECK(count_lines(three_d.str(), true) == 11 * 11 * 11);
}
