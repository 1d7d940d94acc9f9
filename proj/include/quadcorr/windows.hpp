#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "quadcorr/tagstream.hpp"

namespace quadcorr {

// Channel combinations in canonical (sorted-index) order.
inline constexpr std::array<std::array<int, 2>, 6> kPairCombos{
    {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};
inline constexpr std::array<std::array<int, 3>, 4> kTripleCombos{
    {{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}}};

// Windowed n-fold rates for every channel subset, the input to accidental
// correction.  Counting convention: the lowest channel of a subset anchors
// the event; every other channel must land in a delay window of full width
// t_c relative to the anchor, centered at 0 for a same-arm partner and at
// +cross_center (default t_c/2) for a cross-arm partner.  The acceptance
// region of an n-fold subset then has measure exactly t_c^(n-1), matching
// the accidental-rate products t_c^(n-1) * prod(R_k); with the default
// center the quadruplet region is the 20 ns window centered at
// (tau_12, tau_31, tau_41) = (0, 10, 10) ns.
struct WindowCounts {
    int64_t t_c_ticks = 0;
    int64_t cross_center_ticks = 0;
    double t_c_seconds = 0.0;
    double duration_seconds = 0.0;

    std::array<uint64_t, 4> singles_counts{};
    std::array<double, 4> singles{};  // R_k, counts/s

    std::array<uint64_t, 6> pair_counts{};
    std::array<double, 6> pair_rates{};  // R_ij, kPairCombos order

    std::array<uint64_t, 4> triple_counts{};
    std::array<double, 4> triple_rates{};  // R_ijk, kTripleCombos order

    uint64_t quad_count = 0;
    double quad_rate = 0.0;  // R_1234

    static int pair_index(int i, int j);
    static int triple_index(int i, int j, int k);

    double R_single(int k) const { return singles[k - 1]; }
    double R_pair(int i, int j) const { return pair_rates[pair_index(i, j)]; }
    double R_triple(int i, int j, int k) const {
        return triple_rates[triple_index(i, j, k)];
    }
    double R_quad() const { return quad_rate; }
};

// Counts windowed coincidences for all 11 channel subsets of sizes 2..4 and
// divides by T_m.  cross_center_ticks defaults to t_c/2.
WindowCounts window_counts(const TagStream& stream, int64_t t_c_ticks,
                           std::optional<int64_t> cross_center_ticks = {});

// Streaming equivalent over a tag file: one sequential pass with bounded
// memory, chunked by time slice with overlap margins.  Produces results
// identical to window_counts on the materialized stream.
WindowCounts window_counts_file(const std::string& path, int64_t t_c_ticks,
                                std::optional<int64_t> cross_center_ticks = {});

}  // namespace quadcorr
