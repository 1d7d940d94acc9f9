#pragma once

#include <array>
#include <iosfwd>

#include "quadcorr/errors.hpp"

namespace quadcorr {

struct CorrectedRates;

// Per-detector efficiencies eta'_k combined with arm transmission factors.
// Channels 1 and 2 sit behind the Stokes beamsplitter, channels 3 and 4
// behind the anti-Stokes one, so the total channel efficiency is
// eta_k = eta_s * eta'_k for k in {1,2} and eta_a * eta'_k for k in {3,4}.
struct EfficiencySet {
    std::array<double, 4> eta_prime{1.0, 1.0, 1.0, 1.0};
    double eta_s = 1.0;
    double eta_a = 1.0;

    double eta(int channel) const;
    std::array<double, 4> totals() const;
    void validate() const;
};

struct GenerationRates {
    double g_p = 0.0;  // pairs per second
    double g_q = 0.0;  // correlated double-pairs per second
};

// One rate estimated independently from each of four equations, plus the
// arithmetic mean and sample standard deviation.  A negative mean is
// clamped to zero and flagged; the raw per-equation values are kept.
struct EstimateSummary {
    std::array<double, 4> estimates{};
    double mean = 0.0;
    double spread = 0.0;
    bool clamped = false;
};

double gq_from_quadruplets(double c_q, const std::array<double, 4>& eta);

// Triplet rates ordered c123, c124, c134, c234.
EstimateSummary gq_from_triplets(const std::array<double, 4>& c_triple,
                                 const std::array<double, 4>& eta);

// Cross-arm pair rates ordered c13, c14, c23, c24.
EstimateSummary gp_from_pairs(const std::array<double, 4>& c_pair_cross,
                              double g_q,
                              const std::array<double, 4>& eta);

// Forward model: the nine accidental-corrected rates implied by a pair of
// generation rates and a set of total channel efficiencies.
struct SynthesizedRates {
    std::array<double, 4> c_pair_cross{};  // c13, c14, c23, c24
    std::array<double, 4> c_triple{};      // c123, c124, c134, c234
    double c_q = 0.0;
};

SynthesizedRates synthesize_rates(const GenerationRates& gen,
                                  const std::array<double, 4>& eta);

struct LossFit {
    double eta_s = 0.0;
    double eta_a = 0.0;
    double g_p = 0.0;
    double g_q = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
    bool clamped = false;
};

// Joint least-squares fit of (eta_s, eta_a, g_p, g_q) to the nine corrected
// rates, minimizing the sum of squared relative residuals.  All nine rates
// must be positive; the per-detector eta'_k are taken as known.
LossFit fit_arm_losses(const std::array<double, 4>& c_pair_cross,
                       const std::array<double, 4>& c_triple,
                       double c_q,
                       const std::array<double, 4>& eta_prime);

struct InferenceInputs {
    std::array<double, 4> c_pair_cross{};  // c13, c14, c23, c24
    std::array<double, 4> c_triple{};      // c123, c124, c134, c234
    double c_q = 0.0;
};

InferenceInputs inference_inputs(const CorrectedRates& corrected);

struct InferenceResult {
    LossFit fit;
    std::array<double, 4> eta_total{};
    double gq_quad = 0.0;
    EstimateSummary gq_triplets;
    EstimateSummary gp_pairs;
};

InferenceResult infer_rates(const InferenceInputs& in,
                            const std::array<double, 4>& eta_prime);

void write_inference_report(std::ostream& os, const InferenceInputs& in,
                            const std::array<double, 4>& eta_prime,
                            const InferenceResult& res);

}  // namespace quadcorr
