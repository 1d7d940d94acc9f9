#pragma once

#include <cstdint>
#include <vector>

#include "quadcorr/tagstream.hpp"

namespace quadcorr {

// Ordered pair coincidence: one tag on each of two distinct channels within
// the configured maximum delay.  Delay sign convention: delay = t_j - t_i.
struct PairEvent {
    uint64_t t_i = 0;
    uint64_t t_j = 0;
    std::uint16_t ch_i = 0;
    std::uint16_t ch_j = 0;
    friend bool operator==(const PairEvent&, const PairEvent&) = default;
};

inline int64_t pair_delay(const PairEvent& p) {
    return static_cast<int64_t>(p.t_j) - static_cast<int64_t>(p.t_i);
}

// Triplet built from two pair lists sharing an anchor channel (channels[0]).
struct TripletEvent {
    uint64_t t_a = 0;  // anchor channel time
    uint64_t t_b = 0;
    uint64_t t_c = 0;
    std::uint16_t channels[3] = {0, 0, 0};
    friend bool operator==(const TripletEvent&, const TripletEvent&) = default;
};

// Full four-channel coincidence; t_k is the tag time on channel k.
struct QuadEvent {
    uint64_t t_1 = 0;
    uint64_t t_2 = 0;
    uint64_t t_3 = 0;
    uint64_t t_4 = 0;
    friend bool operator==(const QuadEvent&, const QuadEvent&) = default;
};

// All ordered pairs (tag on ch_i, tag on ch_j) with |t_j - t_i| <= max_delay
// ticks, in the all-combinations convention (a tag may join many pairs).
// Two-cursor sweep, O(N + P); chunk-parallel with output identical to the
// serial sweep regardless of thread count.
std::vector<PairEvent> find_pairs(const TagStream& stream, int ch_i, int ch_j,
                                  int64_t max_delay_ticks);

// Joins two pair lists that share their anchor channel: emits
// (t_A, t_B, t_C) for every combination with |t_A - t_A'| <= anchor_tol
// ticks (0 = the anchor tag must be the same detection).
std::vector<TripletEvent> find_triplets(const std::vector<PairEvent>& pairs_ab,
                                        const std::vector<PairEvent>& pairs_ac,
                                        uint64_t anchor_tol = 0);

// Joins triplets (A,B,C) with pairs (D,C) anchored on the shared channel-C
// timestamp; the four channels must cover 1..4.  Emits one QuadEvent per
// matching combination.
std::vector<QuadEvent> find_quadruplets(const std::vector<TripletEvent>& triplets,
                                        const std::vector<PairEvent>& pairs_dc,
                                        uint64_t anchor_tol = 0);

// Runs find_pairs over time slices of the given width (with max_delay overlap
// margins), keeping each pair only in the slice that owns its anchor tag.
// Exists to demonstrate the chunked-execution identity; the result equals
// find_pairs exactly.
std::vector<PairEvent> find_pairs_chunked(const TagStream& stream, int ch_i,
                                          int ch_j, int64_t max_delay_ticks,
                                          uint64_t slice_ticks);

}  // namespace quadcorr
