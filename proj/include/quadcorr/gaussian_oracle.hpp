#pragma once

#include <cmath>

#include "quadcorr/errors.hpp"

namespace quadcorr {

// Parametric first-order correlation functions of the two-arm source.
// cross_amplitude C(dt) peaks at the anti-Stokes delay offset tau_0 and
// decays exponentially with tau_c; auto_amplitude R(tau) decays with the
// arm's own constant and satisfies R(0) = R0, the pair generation rate.
// All amplitudes are real-valued; times are in ns, rates in counts/s.
struct CorrelationModel {
    double r0 = 1.0;        // mean rate scale (pair generation rate)
    double c0 = 1.0;        // cross-correlation amplitude; may exceed r0
    double tau_c = 16.0;    // cross-correlation decay time
    double tau_0 = 8.0;     // anti-Stokes delay offset
    double tau_s = 16.0;    // Stokes auto-correlation decay time
    double tau_a = 16.0;    // anti-Stokes auto-correlation decay time
    bool one_sided = false;  // one-sided cross waveform (zero before tau_0)
    double rabi_omega = 0.0;  // optional cos^2 envelope (rad/ns); 0 = off
};

enum class Arm { stokes, anti };

// Throws DomainError when the model violates its invariants.
void validate(const CorrelationModel& model);

// C(dt) with dt = t_anti - t_stokes.
double cross_amplitude(const CorrelationModel& model, double dt_ns);

// R(tau) for one arm's auto-correlation; even in tau.
double auto_amplitude(const CorrelationModel& model, double tau_ns, Arm arm);

// g2_cross(tau) = 1 + C(tau)^2 / R0^2; >= 1, -> 1 at large |tau|.
double g2_cross(const CorrelationModel& model, double tau_ns);

// g2_auto(tau) = 1 + R(tau)^2 / R0^2; exactly 2 at tau = 0 (thermal).
double g2_auto(const CorrelationModel& model, double tau_ns, Arm arm);

// Reduced three-fold correlation from the three pairwise g2 values.
// Every argument must be >= 1.
double g3_reduced(double g2_as_3s, double g2_as_4s, double g2_aa_34);

// Five-term third-order rate; G3_rate/R0^3 equals g3_reduced of the
// corresponding g2 values identically.
double G3_rate(const CorrelationModel& model, double tau_3s, double tau_4s,
               double tau_34);

// Seventeen-term fourth-order rate from four absolute detection times
// (channels 1,2 = Stokes; 3,4 = anti-Stokes).
double G4_rate(const CorrelationModel& model, double t1, double t2, double t3,
               double t4);

// Delay-based entry point; the six pairwise delays tau_ij = t_i - t_j must
// be cycle-consistent or InconsistentDelays is thrown.
struct G4Delays {
    double tau34 = 0, tau24 = 0, tau14 = 0, tau23 = 0, tau21 = 0, tau13 = 0;
};
double G4_rate(const CorrelationModel& model, const G4Delays& delays);

// ---- photon-number statistics -------------------------------------------------

// Two-mode squeezed vacuum: P_n = tanh^(2n)(zeta) / cosh^2(zeta), where n
// counts photon PAIRS.
struct SqueezedStateModel {
    double zeta = 0.0;
    double alpha() const { return std::tanh(zeta); }
    double beta() const { return std::cosh(zeta); }
};

// Independent pairs: P'_n = e^(-mu) mu^n / n!.
struct PoissonPairModel {
    double mu = 0.0;
};

double pn_squeezed(double zeta, int n);
double pn_poisson(double mu, int n);

}  // namespace quadcorr
