#include "quadcorr/reference.hpp"

#include <algorithm>
#include <cstdlib>

#include "quadcorr/errors.hpp"

namespace quadcorr {

namespace {

// |x - y| <= d on 60-bit tick values; differences fit in int64.
bool within(uint64_t x, uint64_t y, int64_t d) {
    const int64_t diff = static_cast<int64_t>(x) - static_cast<int64_t>(y);
    return diff <= d && -diff <= d;
}

}  // namespace

std::vector<PairEvent> find_pairs_serial(const TagStream& stream, int ch_i,
                                         int ch_j, int64_t max_delay_ticks) {
    if (!is_valid_channel(ch_i) || !is_valid_channel(ch_j))
        throw InvalidConfig("channel id out of range");
    if (ch_i == ch_j) throw SameChannel("pair channels must differ");
    if (max_delay_ticks < 0) throw InvalidConfig("max_delay must be >= 0");

    const auto& a = stream.channel(ch_i);
    const auto& b = stream.channel(ch_j);
    const uint64_t d = static_cast<uint64_t>(max_delay_ticks);
    std::vector<PairEvent> out;
    for (uint64_t t : a) {
        const uint64_t w_lo = t > d ? t - d : 0;
        const auto first = std::lower_bound(b.begin(), b.end(), w_lo);
        for (auto it = first; it != b.end() && *it <= t + d; ++it) {
            out.push_back({t, *it, static_cast<std::uint16_t>(ch_i),
                           static_cast<std::uint16_t>(ch_j)});
        }
    }
    return out;
}

std::vector<PairEvent> brute_pairs(const TagStream& stream, int ch_i, int ch_j,
                                   int64_t max_delay_ticks) {
    const auto& a = stream.channel(ch_i);
    const auto& b = stream.channel(ch_j);
    std::vector<PairEvent> out;
    for (uint64_t t_i : a) {
        for (uint64_t t_j : b) {
            if (within(t_i, t_j, max_delay_ticks)) {
                out.push_back({t_i, t_j, static_cast<std::uint16_t>(ch_i),
                               static_cast<std::uint16_t>(ch_j)});
            }
        }
    }
    return out;
}

std::vector<TripletEvent> brute_triplets(const std::vector<PairEvent>& pairs_ab,
                                         const std::vector<PairEvent>& pairs_ac,
                                         uint64_t anchor_tol) {
    std::vector<TripletEvent> out;
    for (const PairEvent& ab : pairs_ab) {
        for (const PairEvent& ac : pairs_ac) {
            if (within(ab.t_i, ac.t_i, static_cast<int64_t>(anchor_tol))) {
                out.push_back({ab.t_i, ab.t_j, ac.t_j,
                               {ab.ch_i, ab.ch_j, ac.ch_j}});
            }
        }
    }
    return out;
}

std::vector<TripletEvent> brute_triplets_scan(const TagStream& stream, int ch_a,
                                              int ch_b, int ch_c,
                                              int64_t max_delay_ab,
                                              int64_t max_delay_ac) {
    std::vector<TripletEvent> out;
    for (uint64_t t_a : stream.channel(ch_a)) {
        for (uint64_t t_b : stream.channel(ch_b)) {
            if (!within(t_a, t_b, max_delay_ab)) continue;
            for (uint64_t t_c : stream.channel(ch_c)) {
                if (!within(t_a, t_c, max_delay_ac)) continue;
                out.push_back({t_a, t_b, t_c,
                               {static_cast<std::uint16_t>(ch_a),
                                static_cast<std::uint16_t>(ch_b),
                                static_cast<std::uint16_t>(ch_c)}});
            }
        }
    }
    return out;
}

std::vector<QuadEvent> brute_quadruplets(const std::vector<TripletEvent>& triplets,
                                         const std::vector<PairEvent>& pairs_dc,
                                         uint64_t anchor_tol) {
    std::vector<QuadEvent> out;
    for (const TripletEvent& tr : triplets) {
        for (const PairEvent& pr : pairs_dc) {
            if (!within(tr.t_c, pr.t_j, static_cast<int64_t>(anchor_tol)))
                continue;
            QuadEvent q;
            uint64_t* slots[5] = {nullptr, &q.t_1, &q.t_2, &q.t_3, &q.t_4};
            *slots[tr.channels[0]] = tr.t_a;
            *slots[tr.channels[1]] = tr.t_b;
            *slots[tr.channels[2]] = tr.t_c;
            *slots[pr.ch_i] = pr.t_i;
            out.push_back(q);
        }
    }
    return out;
}

std::vector<QuadEvent> brute_quadruplets_scan(const TagStream& stream, int ch_a,
                                              int ch_b, int ch_c, int ch_d,
                                              int64_t max_delay_ab,
                                              int64_t max_delay_ac,
                                              int64_t max_delay_dc) {
    std::vector<QuadEvent> out;
    for (uint64_t t_a : stream.channel(ch_a)) {
        for (uint64_t t_b : stream.channel(ch_b)) {
            if (!within(t_a, t_b, max_delay_ab)) continue;
            for (uint64_t t_c : stream.channel(ch_c)) {
                if (!within(t_a, t_c, max_delay_ac)) continue;
                for (uint64_t t_d : stream.channel(ch_d)) {
                    if (!within(t_c, t_d, max_delay_dc)) continue;
                    QuadEvent q;
                    uint64_t* slots[5] = {nullptr, &q.t_1, &q.t_2, &q.t_3,
                                          &q.t_4};
                    *slots[ch_a] = t_a;
                    *slots[ch_b] = t_b;
                    *slots[ch_c] = t_c;
                    *slots[ch_d] = t_d;
                    out.push_back(q);
                }
            }
        }
    }
    return out;
}

WindowCounts brute_window_counts(const TagStream& stream, int64_t t_c_ticks,
                                 std::optional<int64_t> cross_center_ticks) {
    if (t_c_ticks < 1) throw InvalidConfig("t_c must be at least 1 tick");
    if (stream.t_m_ticks() == 0) throw ZeroDuration("T_m is zero");
    const int64_t center = cross_center_ticks.value_or(t_c_ticks / 2);

    // Tags of `channel` inside the anchored window [t + off, t + off + t_c),
    // where off centers the window at `center` for cross-arm partners and at
    // 0 for same-arm partners.
    auto window_count = [&](int anchor_ch, int channel, uint64_t anchor) {
        const int64_t c =
            is_stokes(anchor_ch) != is_stokes(channel) ? center : 0;
        const int64_t w_lo = static_cast<int64_t>(anchor) + c - t_c_ticks / 2;
        const int64_t w_hi = w_lo + t_c_ticks;
        uint64_t n = 0;
        for (uint64_t t : stream.channel(channel)) {
            const int64_t ti = static_cast<int64_t>(t);
            if (ti >= w_lo && ti < w_hi) ++n;
        }
        return n;
    };

    auto count_subset = [&](const std::vector<int>& chs) {
        uint64_t total = 0;
        for (uint64_t anchor : stream.channel(chs[0])) {
            uint64_t product = 1;
            for (std::size_t c = 1; c < chs.size(); ++c) {
                product *= window_count(chs[0], chs[c], anchor);
            }
            total += product;
        }
        return total;
    };

    WindowCounts w;
    w.t_c_ticks = t_c_ticks;
    w.cross_center_ticks = center;
    w.duration_seconds = stream.duration_seconds();
    w.t_c_seconds = static_cast<double>(t_c_ticks) *
                    static_cast<double>(stream.tick_duration_ps()) * 1e-12;
    for (int k = 1; k <= 4; ++k) {
        w.singles_counts[k - 1] = stream.channel(k).size();
        w.singles[k - 1] =
            static_cast<double>(w.singles_counts[k - 1]) / w.duration_seconds;
    }
    for (int idx = 0; idx < 6; ++idx) {
        w.pair_counts[idx] =
            count_subset({kPairCombos[idx][0], kPairCombos[idx][1]});
        w.pair_rates[idx] =
            static_cast<double>(w.pair_counts[idx]) / w.duration_seconds;
    }
    for (int idx = 0; idx < 4; ++idx) {
        w.triple_counts[idx] =
            count_subset({kTripleCombos[idx][0], kTripleCombos[idx][1],
                          kTripleCombos[idx][2]});
        w.triple_rates[idx] =
            static_cast<double>(w.triple_counts[idx]) / w.duration_seconds;
    }
    w.quad_count = count_subset({1, 2, 3, 4});
    w.quad_rate = static_cast<double>(w.quad_count) / w.duration_seconds;
    return w;
}

}  // namespace quadcorr
