#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "quadcorr/coincidence.hpp"
#include "quadcorr/tagstream.hpp"
#include "quadcorr/windows.hpp"

namespace quadcorr {

// Independent reference implementations: a serial pair finder (the baseline
// the parallel kernel is benchmarked against) and exhaustive scans used as
// oracles in equivalence tests.  The brute variants assume valid inputs and
// favor obviousness over speed.

std::vector<PairEvent> find_pairs_serial(const TagStream& stream, int ch_i,
                                         int ch_j, int64_t max_delay_ticks);

// O(N^2): every tag combination tested directly.
std::vector<PairEvent> brute_pairs(const TagStream& stream, int ch_i, int ch_j,
                                   int64_t max_delay_ticks);

// O(P^2): every pair-of-pairs combination tested for anchor agreement.
std::vector<TripletEvent> brute_triplets(const std::vector<PairEvent>& pairs_ab,
                                         const std::vector<PairEvent>& pairs_ac,
                                         uint64_t anchor_tol);

// O(N^3): every (a, b, c) tag combination tested directly (anchor_tol = 0).
std::vector<TripletEvent> brute_triplets_scan(const TagStream& stream, int ch_a,
                                              int ch_b, int ch_c,
                                              int64_t max_delay_ab,
                                              int64_t max_delay_ac);

// O(T*P): every triplet-pair combination tested for anchor agreement.
std::vector<QuadEvent> brute_quadruplets(const std::vector<TripletEvent>& triplets,
                                         const std::vector<PairEvent>& pairs_dc,
                                         uint64_t anchor_tol);

// O(N^4): every (a, b, c, d) tag combination tested directly (anchor_tol = 0);
// the d tag is windowed against the c tag.
std::vector<QuadEvent> brute_quadruplets_scan(const TagStream& stream, int ch_a,
                                              int ch_b, int ch_c, int ch_d,
                                              int64_t max_delay_ab,
                                              int64_t max_delay_ac,
                                              int64_t max_delay_dc);

// Windowed subset counting by direct enumeration over the full tag arrays.
WindowCounts brute_window_counts(
    const TagStream& stream, int64_t t_c_ticks,
    std::optional<int64_t> cross_center_ticks = std::nullopt);

}  // namespace quadcorr
