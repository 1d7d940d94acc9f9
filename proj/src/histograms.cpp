#include "quadcorr/histograms.hpp"

#include <cmath>
#include <ostream>

#include "quadcorr/errors.hpp"
#include "quadcorr/parallel.hpp"

namespace quadcorr {

namespace {

int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

void check_binning(int64_t bin_ticks, int64_t range_ticks) {
    if (bin_ticks < 1) throw InvalidConfig("bin width must be at least 1 tick");
    if (range_ticks < 0) throw InvalidConfig("range must be >= 0");
}

// Bin index on one axis, or -1 when the delay falls outside the range.
int axis_bin(int64_t delay, int64_t bin_ticks, int64_t n_side) {
    const int64_t b = floor_div(delay, bin_ticks);
    if (b < -n_side || b > n_side) return -1;
    return static_cast<int>(b + n_side);
}

void write_header(std::ostream& os, const char* columns, int64_t bin_ticks,
                  int64_t range_ticks, uint64_t tick_ps,
                  const std::vector<std::pair<std::string, std::string>>& extra) {
    os << "# columns = " << columns << "\n";
    os << "# bin_ns = " << bin_ticks * tick_ps * 1e-3 << "\n";
    os << "# range_ns = " << range_ticks * tick_ps * 1e-3 << "\n";
    for (const auto& [key, value] : extra) os << "# " << key << " = " << value << "\n";
}

}  // namespace

DelayHistogram1D histogram_pairs(const std::vector<PairEvent>& pairs,
                                 int64_t bin_ticks, int64_t range_ticks,
                                 uint64_t tick_ps) {
    check_binning(bin_ticks, range_ticks);
    DelayHistogram1D h;
    h.bin_ticks = bin_ticks;
    h.range_ticks = range_ticks;
    h.tick_ps = tick_ps;
    const int64_t n_side = range_ticks / bin_ticks;
    h.counts.assign(2 * n_side + 1, 0);
    for (const PairEvent& p : pairs) {
        const int b = axis_bin(pair_delay(p), bin_ticks, n_side);
        if (b >= 0) ++h.counts[b];
    }
    return h;
}

DelayHistogram1D normalized_g2(DelayHistogram1D hist, double r_i, double r_j,
                               double t_m_seconds) {
    if (r_i <= 0.0 || r_j <= 0.0) throw ZeroRate("singles rate must be positive");
    if (t_m_seconds <= 0.0) throw ZeroRate("T_m must be positive");
    const double denom = r_i * r_j * hist.bin_width_seconds() * t_m_seconds;
    hist.r_i = r_i;
    hist.r_j = r_j;
    hist.t_m_seconds = t_m_seconds;
    hist.normalized.resize(hist.counts.size());
    for (std::size_t b = 0; b < hist.counts.size(); ++b)
        hist.normalized[b] = static_cast<double>(hist.counts[b]) / denom;
    return hist;
}

DelayHistogram2D histogram_triplets(const std::vector<TripletEvent>& triplets,
                                    int64_t bin_ticks, int64_t range_ticks,
                                    uint64_t tick_ps) {
    check_binning(bin_ticks, range_ticks);
    DelayHistogram2D h;
    h.bin_ticks = bin_ticks;
    h.range_ticks = range_ticks;
    h.tick_ps = tick_ps;
    const int64_t n_side = range_ticks / bin_ticks;
    const int n = static_cast<int>(2 * n_side + 1);
    h.counts.assign(static_cast<std::size_t>(n) * n, 0);
    for (const TripletEvent& t : triplets) {
        const int64_t d1 = static_cast<int64_t>(t.t_b) - static_cast<int64_t>(t.t_a);
        const int64_t d2 = static_cast<int64_t>(t.t_c) - static_cast<int64_t>(t.t_a);
        const int b1 = axis_bin(d1, bin_ticks, n_side);
        const int b2 = axis_bin(d2, bin_ticks, n_side);
        if (b1 >= 0 && b2 >= 0) ++h.counts[h.at(b1, b2)];
    }
    return h;
}

DelayHistogram2D normalized_g3(DelayHistogram2D hist, double r_s, double r_3,
                               double r_4, double t_m_seconds) {
    if (r_s <= 0.0 || r_3 <= 0.0 || r_4 <= 0.0)
        throw ZeroRate("singles rate must be positive");
    if (t_m_seconds <= 0.0) throw ZeroRate("T_m must be positive");
    const double dt = hist.bin_width_seconds();
    const double denom = r_s * r_3 * r_4 * dt * dt * t_m_seconds;
    hist.r_s = r_s;
    hist.r_3 = r_3;
    hist.r_4 = r_4;
    hist.t_m_seconds = t_m_seconds;
    hist.normalized.resize(hist.counts.size());
    for (std::size_t b = 0; b < hist.counts.size(); ++b)
        hist.normalized[b] = static_cast<double>(hist.counts[b]) / denom;
    return hist;
}

DelayHistogram3D histogram_quadruplets(const std::vector<QuadEvent>& quads,
                                       int64_t bin_ticks, int64_t range_ticks,
                                       uint64_t tick_ps) {
    check_binning(bin_ticks, range_ticks);
    DelayHistogram3D h;
    h.bin_ticks = bin_ticks;
    h.range_ticks = range_ticks;
    h.tick_ps = tick_ps;
    const int64_t n_side = range_ticks / bin_ticks;
    const int n = static_cast<int>(2 * n_side + 1);
    h.counts.assign(static_cast<std::size_t>(n) * n * n, 0);
    for (const QuadEvent& q : quads) {
        const int64_t d12 = static_cast<int64_t>(q.t_1) - static_cast<int64_t>(q.t_2);
        const int64_t d31 = static_cast<int64_t>(q.t_3) - static_cast<int64_t>(q.t_1);
        const int64_t d41 = static_cast<int64_t>(q.t_4) - static_cast<int64_t>(q.t_1);
        const int b1 = axis_bin(d12, bin_ticks, n_side);
        const int b2 = axis_bin(d31, bin_ticks, n_side);
        const int b3 = axis_bin(d41, bin_ticks, n_side);
        if (b1 >= 0 && b2 >= 0 && b3 >= 0) ++h.counts[h.at(b1, b2, b3)];
    }
    return h;
}

DelayHistogram2D slice_tau12(const DelayHistogram3D& hist, int64_t tau12_bin) {
    const int64_t n_side = hist.range_ticks / hist.bin_ticks;
    if (tau12_bin < -n_side || tau12_bin > n_side)
        throw InvalidConfig("slice bin outside histogram range");
    DelayHistogram2D out;
    out.bin_ticks = hist.bin_ticks;
    out.range_ticks = hist.range_ticks;
    out.tick_ps = hist.tick_ps;
    const int n = hist.axis_bins();
    out.counts.assign(static_cast<std::size_t>(n) * n, 0);
    const int i1 = static_cast<int>(tau12_bin + n_side);
    for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3)
            out.counts[out.at(i2, i3)] = hist.counts[hist.at(i1, i2, i3)];
    return out;
}

void write_csv(std::ostream& os, const DelayHistogram1D& hist,
               const std::vector<std::pair<std::string, std::string>>& extra) {
    const bool norm = !hist.normalized.empty();
    write_header(os, norm ? "tau_ns,count,normalized" : "tau_ns,count",
                 hist.bin_ticks, hist.range_ticks, hist.tick_ps, extra);
    if (norm)
        os << "# R_i = " << hist.r_i << "\n# R_j = " << hist.r_j
           << "\n# T_m_s = " << hist.t_m_seconds << "\n";
    for (int b = 0; b < hist.axis_bins(); ++b) {
        os << hist.bin_lower_ns(b) << "," << hist.counts[b];
        if (norm) os << "," << hist.normalized[b];
        os << "\n";
    }
}

void write_csv(std::ostream& os, const DelayHistogram2D& hist,
               const std::vector<std::pair<std::string, std::string>>& extra) {
    const bool norm = !hist.normalized.empty();
    write_header(os,
                 norm ? "tau_bs_ns,tau_cs_ns,count,normalized"
                      : "tau_bs_ns,tau_cs_ns,count",
                 hist.bin_ticks, hist.range_ticks, hist.tick_ps, extra);
    if (norm)
        os << "# R_s = " << hist.r_s << "\n# R_3 = " << hist.r_3
           << "\n# R_4 = " << hist.r_4 << "\n# T_m_s = " << hist.t_m_seconds
           << "\n";
    const int n = hist.axis_bins();
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            os << hist.bin_lower_ns(i1) << "," << hist.bin_lower_ns(i2) << ","
               << hist.counts[hist.at(i1, i2)];
            if (norm) os << "," << hist.normalized[hist.at(i1, i2)];
            os << "\n";
        }
    }
}

void write_csv(std::ostream& os, const DelayHistogram3D& hist,
               const std::vector<std::pair<std::string, std::string>>& extra) {
    write_header(os, "tau12_ns,tau31_ns,tau41_ns,count", hist.bin_ticks,
                 hist.range_ticks, hist.tick_ps, extra);
    const int n = hist.axis_bins();
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            for (int i3 = 0; i3 < n; ++i3)
                os << hist.bin_lower_ns(i1) << "," << hist.bin_lower_ns(i2) << ","
                   << hist.bin_lower_ns(i3) << "," << hist.counts[hist.at(i1, i2, i3)]
                   << "\n";
}

}  // namespace quadcorr
