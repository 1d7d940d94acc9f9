#include "quadcorr/windows.hpp"

#include <algorithm>
#include <vector>

#include "quadcorr/errors.hpp"
#include "quadcorr/parallel.hpp"

namespace quadcorr {

namespace {

// All subsets of {1,2,3,4} with 2..4 elements, anchor first (lowest id).
struct Subset {
    int size;
    std::array<int, 4> channels;
};

constexpr std::array<Subset, 11> kSubsets{{
    {2, {1, 2, 0, 0}},
    {2, {1, 3, 0, 0}},
    {2, {1, 4, 0, 0}},
    {2, {2, 3, 0, 0}},
    {2, {2, 4, 0, 0}},
    {2, {3, 4, 0, 0}},
    {3, {1, 2, 3, 0}},
    {3, {1, 2, 4, 0}},
    {3, {1, 3, 4, 0}},
    {3, {2, 3, 4, 0}},
    {4, {1, 2, 3, 4}},
}};

// A cross-arm partner window is shifted by cross_center; same-arm sits at 0.
bool is_cross_arm(int anchor, int companion) {
    return is_stokes(anchor) != is_stokes(companion);
}

// Counts anchored events of one subset, considering only anchors with
// anchor_lo <= t < anchor_hi.  Channels are sorted tick arrays.
uint64_t count_subset(const std::array<const std::vector<uint64_t>*, 4>& ch,
                      const Subset& s, int64_t t_c, int64_t cross_center,
                      uint64_t anchor_lo, uint64_t anchor_hi) {
    const auto& anchors = *ch[s.channels[0] - 1];
    const std::size_t a_begin =
        std::lower_bound(anchors.begin(), anchors.end(), anchor_lo) -
        anchors.begin();
    const std::size_t a_end =
        std::lower_bound(anchors.begin(), anchors.end(), anchor_hi) -
        anchors.begin();
    if (a_begin >= a_end) return 0;

    const int n_comp = s.size - 1;
    std::array<const std::vector<uint64_t>*, 3> comp{};
    std::array<int64_t, 3> off{};
    for (int c = 0; c < n_comp; ++c) {
        const int channel = s.channels[c + 1];
        comp[c] = ch[channel - 1];
        const int64_t center =
            is_cross_arm(s.channels[0], channel) ? cross_center : 0;
        off[c] = center - t_c / 2;
    }

    uint64_t total = 0;
    std::array<std::size_t, 3> lo{}, hi{};
    for (int c = 0; c < n_comp; ++c) {
        const int64_t first = static_cast<int64_t>(anchors[a_begin]) + off[c];
        lo[c] = std::lower_bound(comp[c]->begin(), comp[c]->end(),
                                 first < 0 ? 0 : static_cast<uint64_t>(first)) -
                comp[c]->begin();
        hi[c] = lo[c];
    }
    for (std::size_t i = a_begin; i < a_end; ++i) {
        const int64_t t = static_cast<int64_t>(anchors[i]);
        uint64_t product = 1;
        for (int c = 0; c < n_comp; ++c) {
            const auto& v = *comp[c];
            const int64_t w_lo = t + off[c];
            const int64_t w_hi = w_lo + t_c;
            while (lo[c] < v.size() &&
                   static_cast<int64_t>(v[lo[c]]) < w_lo)
                ++lo[c];
            if (hi[c] < lo[c]) hi[c] = lo[c];
            while (hi[c] < v.size() &&
                   static_cast<int64_t>(v[hi[c]]) < w_hi)
                ++hi[c];
            product *= hi[c] - lo[c];
            if (product == 0) break;
        }
        total += product;
    }
    return total;
}

struct Tallies {
    std::array<uint64_t, 6> pair{};
    std::array<uint64_t, 4> triple{};
    uint64_t quad = 0;

    Tallies& operator+=(const Tallies& o) {
        for (int i = 0; i < 6; ++i) pair[i] += o.pair[i];
        for (int i = 0; i < 4; ++i) triple[i] += o.triple[i];
        quad += o.quad;
        return *this;
    }
};

Tallies tally_subsets(const std::array<const std::vector<uint64_t>*, 4>& ch,
                      int64_t t_c, int64_t cross_center, uint64_t anchor_lo,
                      uint64_t anchor_hi) {
    Tallies t;
    std::array<uint64_t, 11> counts{};
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
#endif
    for (int si = 0; si < 11; ++si) {
        counts[si] = count_subset(ch, kSubsets[si], t_c, cross_center,
                                  anchor_lo, anchor_hi);
    }
    for (int i = 0; i < 6; ++i) t.pair[i] = counts[i];
    for (int i = 0; i < 4; ++i) t.triple[i] = counts[6 + i];
    t.quad = counts[10];
    return t;
}

WindowCounts finalize(const Tallies& tallies,
                      const std::array<uint64_t, 4>& singles_counts,
                      uint64_t t_m_ticks, uint64_t tick_ps, int64_t t_c,
                      int64_t cross_center) {
    if (t_m_ticks == 0) throw ZeroDuration("T_m is zero");
    WindowCounts w;
    w.t_c_ticks = t_c;
    w.cross_center_ticks = cross_center;
    w.duration_seconds = static_cast<double>(t_m_ticks) * tick_ps * 1e-12;
    w.t_c_seconds = static_cast<double>(t_c) * tick_ps * 1e-12;
    w.singles_counts = singles_counts;
    for (int k = 0; k < 4; ++k)
        w.singles[k] = static_cast<double>(singles_counts[k]) / w.duration_seconds;
    w.pair_counts = tallies.pair;
    for (int i = 0; i < 6; ++i)
        w.pair_rates[i] = static_cast<double>(tallies.pair[i]) / w.duration_seconds;
    w.triple_counts = tallies.triple;
    for (int i = 0; i < 4; ++i)
        w.triple_rates[i] =
            static_cast<double>(tallies.triple[i]) / w.duration_seconds;
    w.quad_count = tallies.quad;
    w.quad_rate = static_cast<double>(tallies.quad) / w.duration_seconds;
    return w;
}

int64_t resolve_center(int64_t t_c, std::optional<int64_t> cross_center) {
    if (t_c < 1) throw InvalidConfig("t_c must be at least 1 tick");
    return cross_center.value_or(t_c / 2);
}

}  // namespace

int WindowCounts::pair_index(int i, int j) {
    for (int idx = 0; idx < 6; ++idx)
        if (kPairCombos[idx][0] == std::min(i, j) &&
            kPairCombos[idx][1] == std::max(i, j))
            return idx;
    throw InvalidConfig("bad pair combination");
}

int WindowCounts::triple_index(int i, int j, int k) {
    std::array<int, 3> want{i, j, k};
    std::sort(want.begin(), want.end());
    for (int idx = 0; idx < 4; ++idx)
        if (kTripleCombos[idx][0] == want[0] && kTripleCombos[idx][1] == want[1] &&
            kTripleCombos[idx][2] == want[2])
            return idx;
    throw InvalidConfig("bad triple combination");
}

WindowCounts window_counts(const TagStream& stream, int64_t t_c_ticks,
                           std::optional<int64_t> cross_center_ticks) {
    const int64_t center = resolve_center(t_c_ticks, cross_center_ticks);
    const std::array<const std::vector<uint64_t>*, 4> ch{
        &stream.channel(1), &stream.channel(2), &stream.channel(3),
        &stream.channel(4)};
    const Tallies t = tally_subsets(ch, t_c_ticks, center, 0,
                                    TagStream::kMaxTicks + 1);
    std::array<uint64_t, 4> singles{};
    for (int k = 1; k <= 4; ++k) singles[k - 1] = stream.channel(k).size();
    return finalize(t, singles, stream.t_m_ticks(), stream.tick_duration_ps(),
                    t_c_ticks, center);
}

WindowCounts window_counts_file(const std::string& path, int64_t t_c_ticks,
                                std::optional<int64_t> cross_center_ticks) {
    const int64_t center = resolve_center(t_c_ticks, cross_center_ticks);
    TagFileScanner scanner(path);

    // Time-sliced pass: anchors in [chunk_lo, chunk_hi) are counted once the
    // read position is `pad` ticks past chunk_hi, so every companion window
    // is already buffered.  pad bounds |off| + t_c over both window shapes.
    const uint64_t pad = static_cast<uint64_t>(2 * t_c_ticks + 2 +
                                               std::abs(center));
    const uint64_t chunk_len =
        std::max<uint64_t>(uint64_t{1} << 22, 64 * static_cast<uint64_t>(t_c_ticks));

    std::array<std::vector<uint64_t>, 4> buf;
    const std::array<const std::vector<uint64_t>*, 4> ch{&buf[0], &buf[1],
                                                         &buf[2], &buf[3]};
    std::array<uint64_t, 4> singles{};
    Tallies total;
    uint64_t chunk_lo = 0;
    uint64_t chunk_hi = chunk_len;

    auto process_chunk = [&] {
        total += tally_subsets(ch, t_c_ticks, center, chunk_lo, chunk_hi);
        const uint64_t keep_from = chunk_hi > pad ? chunk_hi - pad : 0;
        for (auto& v : buf) {
            auto it = std::lower_bound(v.begin(), v.end(), keep_from);
            v.erase(v.begin(), it);
        }
        chunk_lo = chunk_hi;
        chunk_hi += chunk_len;
    };

    uint64_t ticks = 0;
    int channel = 0;
    uint64_t last_tick = 0;
    bool any = false;
    while (scanner.next(ticks, channel)) {
        while (ticks >= chunk_hi + pad) process_chunk();
        buf[channel - 1].push_back(ticks);
        ++singles[channel - 1];
        last_tick = ticks;
        any = true;
    }
    while (any && chunk_lo <= last_tick) process_chunk();

    return finalize(total, singles, scanner.header().t_m_ticks,
                    scanner.header().tick_duration_ps, t_c_ticks, center);
}

}  // namespace quadcorr
