#include "quadcorr/accidentals.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "quadcorr/errors.hpp"

namespace quadcorr {

namespace {

// Value of one partition block: a singleton contributes its singles rate,
// a larger block its corrected coincidence rate.
double block_value(const std::vector<int>& block,
                   const std::map<std::vector<int>, double>& lower,
                   const std::vector<double>& singles) {
    if (block.size() == 1) return singles[block[0] - 1];
    const auto it = lower.find(block);
    if (it == lower.end())
        throw InvalidConfig("missing lower-order corrected rate for a block");
    return it->second;
}

std::string block_label(const std::vector<std::vector<int>>& partition) {
    std::string s;
    for (const auto& block : partition) {
        s += '{';
        for (int ch : block) s += static_cast<char>('0' + ch);
        s += '}';
    }
    return s;
}

void check_tc(double t_c_s) {
    if (!(t_c_s > 0.0)) throw InvalidConfig("t_c must be positive seconds");
}

}  // namespace

double correct_pairs(double R_ij, double R_i, double R_j, double t_c_s) {
    check_tc(t_c_s);
    return R_ij - t_c_s * R_i * R_j;
}

double correct_triplets(double R_ijk, double c_ij, double c_ik, double c_jk,
                        double R_i, double R_j, double R_k, double t_c_s) {
    check_tc(t_c_s);
    return R_ijk - t_c_s * (c_ij * R_k + c_jk * R_i + c_ik * R_j) -
           t_c_s * t_c_s * R_i * R_j * R_k;
}

double correct_quadruplets(double R_1234, const TripleCs& t, const PairCs& p,
                           const std::array<double, 4>& r, double t_c_s) {
    check_tc(t_c_s);
    const double tc2 = t_c_s * t_c_s;
    const double tc3 = tc2 * t_c_s;
    double c = R_1234;
    c -= t_c_s * (p.c12 * p.c34 + p.c13 * p.c24 + p.c14 * p.c23);
    c -= t_c_s * (t.c123 * r[3] + t.c124 * r[2] + t.c134 * r[1] + t.c234 * r[0]);
    c -= tc2 * (p.c12 * r[2] * r[3] + p.c13 * r[1] * r[3] + p.c14 * r[1] * r[2] +
                p.c23 * r[0] * r[3] + p.c24 * r[0] * r[2] + p.c34 * r[0] * r[1]);
    c -= tc3 * r[0] * r[1] * r[2] * r[3];
    return c;
}

std::vector<std::vector<std::vector<int>>> bell_partitions(int n) {
    if (n < 1) throw InvalidConfig("n must be >= 1");
    std::vector<std::vector<std::vector<int>>> out;
    // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
    std::vector<int> a(n, 0);
    for (;;) {
        int blocks = 0;
        for (int v : a) blocks = std::max(blocks, v + 1);
        std::vector<std::vector<int>> partition(blocks);
        for (int i = 0; i < n; ++i) partition[a[i]].push_back(i + 1);
        out.push_back(std::move(partition));

        // Next RGS in lexicographic order.
        int i = n - 1;
        for (; i > 0; --i) {
            int prefix_max = 0;
            for (int j = 0; j < i; ++j) prefix_max = std::max(prefix_max, a[j]);
            if (a[i] <= prefix_max) break;
        }
        if (i == 0) break;
        ++a[i];
        for (int j = i + 1; j < n; ++j) a[j] = 0;
    }
    return out;
}

double correct_nfold_general(
    double observed, const std::map<std::vector<int>, double>& lower_order_corrected,
    const std::vector<double>& singles, double t_c_s, int n) {
    check_tc(t_c_s);
    if (static_cast<int>(singles.size()) < n)
        throw InvalidConfig("need one singles rate per channel");
    double corrected = observed;
    for (const auto& partition : bell_partitions(n)) {
        const int m = static_cast<int>(partition.size());
        if (m < 2) continue;  // the observed term itself
        double term = std::pow(t_c_s, m - 1);
        for (const auto& block : partition)
            term *= block_value(block, lower_order_corrected, singles);
        corrected -= term;
    }
    return corrected;
}

CorrectedRates correct_all(const WindowCounts& w) {
    CorrectedRates c;
    c.t_c_seconds = w.t_c_seconds;
    for (int idx = 0; idx < 6; ++idx) {
        const auto [i, j] = std::pair{kPairCombos[idx][0], kPairCombos[idx][1]};
        c.c_pair[idx] = correct_pairs(w.pair_rates[idx], w.R_single(i),
                                      w.R_single(j), w.t_c_seconds);
    }
    for (int idx = 0; idx < 4; ++idx) {
        const auto [i, j, k] = std::tuple{kTripleCombos[idx][0], kTripleCombos[idx][1],
                                          kTripleCombos[idx][2]};
        c.c_triple[idx] = correct_triplets(
            w.triple_rates[idx], c.c_ij(i, j), c.c_ij(i, k), c.c_ij(j, k),
            w.R_single(i), w.R_single(j), w.R_single(k), w.t_c_seconds);
    }
    const TripleCs t{c.c_triple[0], c.c_triple[1], c.c_triple[2], c.c_triple[3]};
    const PairCs p{c.c_pair[0], c.c_pair[1], c.c_pair[2],
                   c.c_pair[3], c.c_pair[4], c.c_pair[5]};
    c.c_1234 = correct_quadruplets(
        w.quad_rate, t, p,
        {w.singles[0], w.singles[1], w.singles[2], w.singles[3]}, w.t_c_seconds);
    c.c_p = c.c_ij(1, 3) + c.c_ij(1, 4) + c.c_ij(2, 3) + c.c_ij(2, 4);
    c.c_q = c.c_1234;
    return c;
}

void write_correction_report(std::ostream& os, const WindowCounts& w,
                             const CorrectedRates& c) {
    os << std::setprecision(17);
    os << "window.t_c_s = " << w.t_c_seconds << "\n";
    os << "window.t_c_ticks = " << w.t_c_ticks << "\n";
    os << "window.cross_center_ticks = " << w.cross_center_ticks << "\n";
    os << "window.T_m_s = " << w.duration_seconds << "\n";
    for (int k = 1; k <= 4; ++k)
        os << "singles.R" << k << " = " << w.R_single(k) << "\n";
    for (int idx = 0; idx < 6; ++idx) {
        const int i = kPairCombos[idx][0], j = kPairCombos[idx][1];
        os << "observed.R" << i << j << " = " << w.pair_rates[idx] << "\n";
    }
    for (int idx = 0; idx < 4; ++idx) {
        const int i = kTripleCombos[idx][0], j = kTripleCombos[idx][1],
                  k = kTripleCombos[idx][2];
        os << "observed.R" << i << j << k << " = " << w.triple_rates[idx] << "\n";
    }
    os << "observed.R1234 = " << w.quad_rate << "\n";

    // Per-partition audit of every subtracted term, one order at a time.
    std::map<std::vector<int>, double> lower;
    std::vector<double> singles(w.singles.begin(), w.singles.end());
    for (int idx = 0; idx < 6; ++idx)
        lower[{kPairCombos[idx][0], kPairCombos[idx][1]}] = c.c_pair[idx];
    for (int idx = 0; idx < 4; ++idx)
        lower[{kTripleCombos[idx][0], kTripleCombos[idx][1], kTripleCombos[idx][2]}] =
            c.c_triple[idx];

    auto audit = [&](const std::vector<int>& channels, const std::string& name) {
        const int n = static_cast<int>(channels.size());
        for (const auto& partition : bell_partitions(n)) {
            if (partition.size() < 2) continue;
            // Map the partition of {1..n} onto the actual channel ids.
            std::vector<std::vector<int>> mapped;
            for (const auto& block : partition) {
                std::vector<int> b;
                for (int e : block) b.push_back(channels[e - 1]);
                mapped.push_back(std::move(b));
            }
            double term = std::pow(w.t_c_seconds, partition.size() - 1);
            for (const auto& block : mapped)
                term *= block_value(block, lower, singles);
            os << "audit." << name << ".term" << block_label(mapped) << " = "
               << term << "\n";
        }
    };
    for (int idx = 0; idx < 6; ++idx) {
        const int i = kPairCombos[idx][0], j = kPairCombos[idx][1];
        const std::string name = "c" + std::to_string(i) + std::to_string(j);
        audit({i, j}, name);
        os << "corrected." << name << " = " << c.c_pair[idx] << "\n";
    }
    for (int idx = 0; idx < 4; ++idx) {
        const int i = kTripleCombos[idx][0], j = kTripleCombos[idx][1],
                  k = kTripleCombos[idx][2];
        const std::string name =
            "c" + std::to_string(i) + std::to_string(j) + std::to_string(k);
        audit({i, j, k}, name);
        os << "corrected." << name << " = " << c.c_triple[idx] << "\n";
    }
    audit({1, 2, 3, 4}, "c1234");
    os << "corrected.c1234 = " << c.c_1234 << "\n";
    os << "corrected.c_p = " << c.c_p << "\n";
    os << "corrected.c_q = " << c.c_q << "\n";
}

}  // namespace quadcorr
