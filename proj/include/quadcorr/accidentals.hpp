#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <vector>

#include "quadcorr/windows.hpp"

namespace quadcorr {

// Corrected coincidence rates for every channel combination.  Values may be
// slightly negative (fluctuation around zero) and are NOT clamped; c_p is
// the total correlated pair rate over the cross-arm combinations
// {13,14,23,24} and c_q the corrected quadruplet rate.
struct CorrectedRates {
    double t_c_seconds = 0.0;
    std::array<double, 6> c_pair{};    // kPairCombos order
    std::array<double, 4> c_triple{};  // kTripleCombos order
    double c_1234 = 0.0;
    double c_p = 0.0;
    double c_q = 0.0;

    double c_ij(int i, int j) const { return c_pair[WindowCounts::pair_index(i, j)]; }
    double c_ijk(int i, int j, int k) const {
        return c_triple[WindowCounts::triple_index(i, j, k)];
    }
};

// c_ij = R_ij - t_c R_i R_j.  Rates in counts/s, t_c in seconds.
double correct_pairs(double R_ij, double R_i, double R_j, double t_c_s);

// c_ijk = R_ijk - t_c (c_ij R_k + c_jk R_i + c_ik R_j) - t_c^2 R_i R_j R_k.
double correct_triplets(double R_ijk, double c_ij, double c_ik, double c_jk,
                        double R_i, double R_j, double R_k, double t_c_s);

struct PairCs {
    double c12 = 0, c13 = 0, c14 = 0, c23 = 0, c24 = 0, c34 = 0;
};
struct TripleCs {
    double c123 = 0, c124 = 0, c134 = 0, c234 = 0;
};

// Fourteen-term quadruplet correction (all non-trivial partitions of the
// four channels).
double correct_quadruplets(double R_1234, const TripleCs& triples,
                           const PairCs& pairs,
                           const std::array<double, 4>& singles, double t_c_s);

// All set partitions of {1..n} in canonical order (restricted growth
// strings); |result| = Bell(n).
std::vector<std::vector<std::vector<int>>> bell_partitions(int n);

// Generic n-fold corrector: for each non-trivial partition with m blocks
// subtracts t_c^(m-1) * prod(block rate), where a singleton block
// contributes R_k and a larger block its corrected rate.  Reproduces the
// explicit pair/triplet/quadruplet formulas exactly.
double correct_nfold_general(double observed,
                             const std::map<std::vector<int>, double>& lower_order_corrected,
                             const std::vector<double>& singles, double t_c_s,
                             int n);

// Applies the full correction chain to windowed rates.
CorrectedRates correct_all(const WindowCounts& w);

// Audit report: every observed rate, corrected rate, and each subtracted
// term labelled by its partition, as key = value lines.
void write_correction_report(std::ostream& os, const WindowCounts& w,
                             const CorrectedRates& c);

}  // namespace quadcorr
