#include "quadcorr/coincidence.hpp"

#include <algorithm>
#include <numeric>

#include "quadcorr/errors.hpp"
#include "quadcorr/parallel.hpp"

namespace quadcorr {

namespace {

// Fixed-size chunk decomposition for anchor arrays: a function of the data
// size only, so results are identical for any thread count.
std::vector<std::pair<std::size_t, std::size_t>> anchor_chunks(std::size_t n) {
    const std::size_t target = 1 << 16;
    std::size_t pieces = (n + target - 1) / target;
    if (pieces < 1) pieces = 1;
    if (pieces > 4096) pieces = 4096;
    return chunk_ranges(n, pieces);
}

// Runs `emit(begin, end, out)` over every chunk, possibly in parallel, and
// concatenates the per-chunk outputs in chunk order.
template <typename T, typename Emit>
std::vector<T> chunked_emit(std::size_t n, Emit emit) {
    const auto chunks = anchor_chunks(n);
    std::vector<std::vector<T>> partial(chunks.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
#endif
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks.size()); ++c) {
        emit(chunks[c].first, chunks[c].second, partial[c]);
    }
    std::size_t total = 0;
    for (const auto& p : partial) total += p.size();
    std::vector<T> out;
    out.reserve(total);
    for (auto& p : partial) {
        out.insert(out.end(), p.begin(), p.end());
        p.clear();
        p.shrink_to_fit();
    }
    return out;
}

uint64_t clamped_sub(uint64_t a, uint64_t b) { return a > b ? a - b : 0; }

}  // namespace

std::vector<PairEvent> find_pairs(const TagStream& stream, int ch_i, int ch_j,
                                  int64_t max_delay_ticks) {
    if (!is_valid_channel(ch_i) || !is_valid_channel(ch_j))
        throw InvalidConfig("channel id out of range");
    if (ch_i == ch_j) throw SameChannel("pair channels must differ");
    if (max_delay_ticks < 0) throw InvalidConfig("max_delay must be >= 0");

    const auto& a = stream.channel(ch_i);
    const auto& b = stream.channel(ch_j);
    const uint64_t d = static_cast<uint64_t>(max_delay_ticks);
    const auto chi = static_cast<std::uint16_t>(ch_i);
    const auto chj = static_cast<std::uint16_t>(ch_j);

    return chunked_emit<PairEvent>(
        a.size(), [&](std::size_t begin, std::size_t end, std::vector<PairEvent>& out) {
            // Window of b-tags in [t_i - d, t_i + d]; both cursors only move
            // forward as t_i increases.
            std::size_t lo = std::lower_bound(b.begin(), b.end(),
                                              clamped_sub(a[begin], d)) -
                             b.begin();
            std::size_t hi = lo;
            for (std::size_t i = begin; i < end; ++i) {
                const uint64_t t = a[i];
                while (lo < b.size() && b[lo] < clamped_sub(t, d)) ++lo;
                if (hi < lo) hi = lo;
                while (hi < b.size() && b[hi] <= t + d) ++hi;
                for (std::size_t j = lo; j < hi; ++j)
                    out.push_back({t, b[j], chi, chj});
            }
        });
}

std::vector<TripletEvent> find_triplets(const std::vector<PairEvent>& pairs_ab,
                                        const std::vector<PairEvent>& pairs_ac,
                                        uint64_t anchor_tol) {
    if (pairs_ab.empty() || pairs_ac.empty()) return {};
    const std::uint16_t cha = pairs_ab.front().ch_i;
    if (pairs_ac.front().ch_i != cha)
        throw MismatchedAnchorChannel("pair lists do not share an anchor channel");
    const std::uint16_t chb = pairs_ab.front().ch_j;
    const std::uint16_t chc = pairs_ac.front().ch_j;
    if (chb == chc) throw SameChannel("triplet companion channels must differ");

    return chunked_emit<TripletEvent>(
        pairs_ab.size(),
        [&](std::size_t begin, std::size_t end, std::vector<TripletEvent>& out) {
            std::size_t lo =
                std::lower_bound(pairs_ac.begin(), pairs_ac.end(),
                                 clamped_sub(pairs_ab[begin].t_i, anchor_tol),
                                 [](const PairEvent& p, uint64_t t) {
                                     return p.t_i < t;
                                 }) -
                pairs_ac.begin();
            std::size_t hi = lo;
            for (std::size_t i = begin; i < end; ++i) {
                const uint64_t t = pairs_ab[i].t_i;
                while (lo < pairs_ac.size() &&
                       pairs_ac[lo].t_i < clamped_sub(t, anchor_tol))
                    ++lo;
                if (hi < lo) hi = lo;
                while (hi < pairs_ac.size() && pairs_ac[hi].t_i <= t + anchor_tol)
                    ++hi;
                for (std::size_t j = lo; j < hi; ++j) {
                    out.push_back({t, pairs_ab[i].t_j, pairs_ac[j].t_j,
                                   {cha, chb, chc}});
                }
            }
        });
}

std::vector<QuadEvent> find_quadruplets(const std::vector<TripletEvent>& triplets,
                                        const std::vector<PairEvent>& pairs_dc,
                                        uint64_t anchor_tol) {
    if (triplets.empty() || pairs_dc.empty()) return {};
    const std::uint16_t anchor_ch = triplets.front().channels[2];
    if (pairs_dc.front().ch_j != anchor_ch)
        throw MismatchedAnchorChannel(
            "pair list second channel must equal the triplet third channel");
    {
        bool present[5] = {false, false, false, false, false};
        present[triplets.front().channels[0]] = true;
        present[triplets.front().channels[1]] = true;
        present[triplets.front().channels[2]] = true;
        present[pairs_dc.front().ch_i] = true;
        if (!(present[1] && present[2] && present[3] && present[4]))
            throw MismatchedAnchorChannel(
                "quadruplet channels must cover all four detectors");
    }
    const int tr_ch_a = triplets.front().channels[0];
    const int tr_ch_b = triplets.front().channels[1];
    const int pr_ch_d = pairs_dc.front().ch_i;

    // Order both inputs by the anchor-channel timestamp.
    std::vector<std::uint32_t> tri_idx(triplets.size());
    std::iota(tri_idx.begin(), tri_idx.end(), 0u);
    std::stable_sort(tri_idx.begin(), tri_idx.end(),
                     [&](std::uint32_t x, std::uint32_t y) {
                         return triplets[x].t_c < triplets[y].t_c;
                     });
    std::vector<std::uint32_t> pair_idx(pairs_dc.size());
    std::iota(pair_idx.begin(), pair_idx.end(), 0u);
    std::stable_sort(pair_idx.begin(), pair_idx.end(),
                     [&](std::uint32_t x, std::uint32_t y) {
                         return pairs_dc[x].t_j < pairs_dc[y].t_j;
                     });

    return chunked_emit<QuadEvent>(
        tri_idx.size(),
        [&](std::size_t begin, std::size_t end, std::vector<QuadEvent>& out) {
            std::size_t lo =
                std::lower_bound(pair_idx.begin(), pair_idx.end(),
                                 clamped_sub(triplets[tri_idx[begin]].t_c,
                                             anchor_tol),
                                 [&](std::uint32_t p, uint64_t t) {
                                     return pairs_dc[p].t_j < t;
                                 }) -
                pair_idx.begin();
            std::size_t hi = lo;
            for (std::size_t i = begin; i < end; ++i) {
                const TripletEvent& tr = triplets[tri_idx[i]];
                const uint64_t t = tr.t_c;
                while (lo < pair_idx.size() &&
                       pairs_dc[pair_idx[lo]].t_j < clamped_sub(t, anchor_tol))
                    ++lo;
                if (hi < lo) hi = lo;
                while (hi < pair_idx.size() &&
                       pairs_dc[pair_idx[hi]].t_j <= t + anchor_tol)
                    ++hi;
                for (std::size_t j = lo; j < hi; ++j) {
                    const PairEvent& pr = pairs_dc[pair_idx[j]];
                    QuadEvent q;
                    uint64_t* slots[5] = {nullptr, &q.t_1, &q.t_2, &q.t_3, &q.t_4};
                    *slots[tr_ch_a] = tr.t_a;
                    *slots[tr_ch_b] = tr.t_b;
                    *slots[anchor_ch] = tr.t_c;
                    *slots[pr_ch_d] = pr.t_i;
                    out.push_back(q);
                }
            }
        });
}

std::vector<PairEvent> find_pairs_chunked(const TagStream& stream, int ch_i,
                                          int ch_j, int64_t max_delay_ticks,
                                          uint64_t slice_ticks) {
    if (slice_ticks == 0) throw InvalidConfig("slice width must be positive");
    const uint64_t d = static_cast<uint64_t>(max_delay_ticks);
    std::vector<PairEvent> out;
    const uint64_t span = stream.t_m_ticks();
    for (uint64_t lo = 0;; lo += slice_ticks) {
        const uint64_t hi = lo + slice_ticks;
        // Slice with overlap margins; ownership decided by the anchor tag.
        TagStream piece = slice(stream, clamped_sub(lo, d),
                                hi > TagStream::kMaxTicks - d ? TagStream::kMaxTicks
                                                              : hi + d);
        piece.set_t_m_ticks(stream.t_m_ticks());
        for (const PairEvent& p : find_pairs(piece, ch_i, ch_j, max_delay_ticks)) {
            if (p.t_i >= lo && p.t_i < hi) out.push_back(p);
        }
        if (hi > span) break;
    }
    return out;
}

}  // namespace quadcorr
