#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "quadcorr/coincidence.hpp"

namespace quadcorr {

// Delay histograms share the bin convention: bin index b counts delays
// tau (ticks) with b*dt <= tau < (b+1)*dt, for b in [-range/dt, +range/dt].
// With the defaults (dt = 1 tick = 2 ns, range = 30 ticks = 60 ns) that is
// 61 bins per axis covering [-60, +60] ns inclusive.

struct DelayHistogram1D {
    int64_t bin_ticks = 1;
    int64_t range_ticks = 30;
    uint64_t tick_ps = TagStream::kDefaultTickPs;
    std::vector<uint64_t> counts;
    std::vector<double> normalized;  // filled by normalized_g2
    double r_i = 0.0, r_j = 0.0, t_m_seconds = 0.0;

    int64_t min_bin() const { return -(range_ticks / bin_ticks); }
    int axis_bins() const { return static_cast<int>(2 * (range_ticks / bin_ticks) + 1); }
    double bin_lower_ns(int index) const {
        return static_cast<double>((min_bin() + index) * bin_ticks) * tick_ps * 1e-3;
    }
    double bin_width_ns() const { return static_cast<double>(bin_ticks) * tick_ps * 1e-3; }
    double bin_width_seconds() const { return static_cast<double>(bin_ticks) * tick_ps * 1e-12; }
};

struct DelayHistogram2D {
    int64_t bin_ticks = 1;
    int64_t range_ticks = 30;
    uint64_t tick_ps = TagStream::kDefaultTickPs;
    std::vector<uint64_t> counts;    // row-major [axis1][axis2]
    std::vector<double> normalized;  // filled by normalized_g3
    double r_s = 0.0, r_3 = 0.0, r_4 = 0.0, t_m_seconds = 0.0;

    int64_t min_bin() const { return -(range_ticks / bin_ticks); }
    int axis_bins() const { return static_cast<int>(2 * (range_ticks / bin_ticks) + 1); }
    std::size_t at(int i1, int i2) const {
        return static_cast<std::size_t>(i1) * axis_bins() + i2;
    }
    double bin_lower_ns(int index) const {
        return static_cast<double>((min_bin() + index) * bin_ticks) * tick_ps * 1e-3;
    }
    double bin_width_seconds() const { return static_cast<double>(bin_ticks) * tick_ps * 1e-12; }
};

struct DelayHistogram3D {
    int64_t bin_ticks = 1;
    int64_t range_ticks = 30;
    uint64_t tick_ps = TagStream::kDefaultTickPs;
    std::vector<uint64_t> counts;  // row-major [tau12][tau31][tau41]

    int64_t min_bin() const { return -(range_ticks / bin_ticks); }
    int axis_bins() const { return static_cast<int>(2 * (range_ticks / bin_ticks) + 1); }
    std::size_t at(int i1, int i2, int i3) const {
        const std::size_t n = axis_bins();
        return (static_cast<std::size_t>(i1) * n + i2) * n + i3;
    }
    double bin_lower_ns(int index) const {
        return static_cast<double>((min_bin() + index) * bin_ticks) * tick_ps * 1e-3;
    }
};

// Pair-delay histogram over tau = t_j - t_i.
DelayHistogram1D histogram_pairs(const std::vector<PairEvent>& pairs,
                                 int64_t bin_ticks, int64_t range_ticks,
                                 uint64_t tick_ps = TagStream::kDefaultTickPs);

// Normalizes to the accidental pair rate: counts / (R_i R_j dt T_m).
// Far-delay bins of uncorrelated streams then sit at 1.
DelayHistogram1D normalized_g2(DelayHistogram1D hist, double r_i, double r_j,
                               double t_m_seconds);

// Triplet histogram over (tau_bs, tau_cs) = (t_b - t_a, t_c - t_a): for
// (s,3,4) triplets these are the paper's (tau_3s, tau_4s) axes.
DelayHistogram2D histogram_triplets(const std::vector<TripletEvent>& triplets,
                                    int64_t bin_ticks, int64_t range_ticks,
                                    uint64_t tick_ps = TagStream::kDefaultTickPs);

// Normalizes to the accidental triplet rate: counts / (R_s R_3 R_4 dt^2 T_m).
DelayHistogram2D normalized_g3(DelayHistogram2D hist, double r_s, double r_3,
                               double r_4, double t_m_seconds);

// Quadruplet histogram over (tau_12, tau_31, tau_41) =
// (t_1 - t_2, t_3 - t_1, t_4 - t_1); raw counts.
DelayHistogram3D histogram_quadruplets(const std::vector<QuadEvent>& quads,
                                       int64_t bin_ticks, int64_t range_ticks,
                                       uint64_t tick_ps = TagStream::kDefaultTickPs);

// Fixed-tau12 slice of the 3D histogram (raw counts; axes tau_31, tau_41).
DelayHistogram2D slice_tau12(const DelayHistogram3D& hist, int64_t tau12_bin);

// CSV export: '#' header lines with the bin/range/normalization metadata,
// then one line per bin: coordinates (ns, bin lower edge), raw count, and
// the normalized value where a normalization has been applied.
void write_csv(std::ostream& os, const DelayHistogram1D& hist,
               const std::vector<std::pair<std::string, std::string>>& extra = {});
void write_csv(std::ostream& os, const DelayHistogram2D& hist,
               const std::vector<std::pair<std::string, std::string>>& extra = {});
void write_csv(std::ostream& os, const DelayHistogram3D& hist,
               const std::vector<std::pair<std::string, std::string>>& extra = {});

}  // namespace quadcorr
