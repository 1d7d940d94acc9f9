#include "quadcorr/gaussian_oracle.hpp"

#include <algorithm>

namespace quadcorr {

void validate(const CorrelationModel& model) {
    if (!(model.r0 > 0.0)) throw DomainError("R0 must be positive");
    if (!(model.c0 >= 0.0)) throw DomainError("C0 must be non-negative");
    if (!(model.tau_c > 0.0) || !(model.tau_s > 0.0) || !(model.tau_a > 0.0))
        throw DomainError("decay times must be positive");
    if (!(model.tau_0 >= 0.0)) throw DomainError("tau_0 must be non-negative");
    if (model.rabi_omega < 0.0) throw DomainError("rabi_omega must be >= 0");
}

double cross_amplitude(const CorrelationModel& model, double dt_ns) {
    const double u = dt_ns - model.tau_0;
    if (model.one_sided && u < 0.0) return 0.0;
    double c = model.c0 * std::exp(-std::abs(u) / model.tau_c);
    if (model.rabi_omega > 0.0) {
        const double envelope = std::cos(0.5 * model.rabi_omega * u);
        c *= envelope * envelope;
    }
    return c;
}

double auto_amplitude(const CorrelationModel& model, double tau_ns, Arm arm) {
    const double tau_mode = arm == Arm::stokes ? model.tau_s : model.tau_a;
    return model.r0 * std::exp(-std::abs(tau_ns) / tau_mode);
}

double g2_cross(const CorrelationModel& model, double tau_ns) {
    validate(model);
    const double c = cross_amplitude(model, tau_ns);
    return 1.0 + (c * c) / (model.r0 * model.r0);
}

double g2_auto(const CorrelationModel& model, double tau_ns, Arm arm) {
    validate(model);
    const double r = auto_amplitude(model, tau_ns, arm);
    return 1.0 + (r * r) / (model.r0 * model.r0);
}

double g3_reduced(double g2_as_3s, double g2_as_4s, double g2_aa_34) {
    if (g2_as_3s < 1.0 || g2_as_4s < 1.0 || g2_aa_34 < 1.0)
        throw DomainError("g2 arguments must be >= 1");
    return g2_aa_34 + g2_as_3s + g2_as_4s - 2.0 +
           2.0 * std::sqrt(g2_as_3s - 1.0) * std::sqrt(g2_as_4s - 1.0) *
               std::sqrt(g2_aa_34 - 1.0);
}

double G3_rate(const CorrelationModel& model, double tau_3s, double tau_4s,
               double tau_34) {
    validate(model);
    const double r0 = model.r0;
    const double ra = auto_amplitude(model, tau_34, Arm::anti);
    const double c3 = cross_amplitude(model, tau_3s);
    const double c4 = cross_amplitude(model, tau_4s);
    return r0 * (r0 * r0 + ra * ra) + r0 * (c3 * c3 + c4 * c4) +
           2.0 * c3 * c4 * ra;
}

double G4_rate(const CorrelationModel& model, double t1, double t2, double t3,
               double t4) {
    validate(model);
    const double r0 = model.r0;
    const double rs = auto_amplitude(model, t1 - t2, Arm::stokes);
    const double ra = auto_amplitude(model, t3 - t4, Arm::anti);
    const double c13 = cross_amplitude(model, t3 - t1);
    const double c14 = cross_amplitude(model, t4 - t1);
    const double c23 = cross_amplitude(model, t3 - t2);
    const double c24 = cross_amplitude(model, t4 - t2);

    double g4 = r0 * r0 * r0 * r0;                       // 1
    g4 += r0 * r0 * (ra * ra + rs * rs);                 // 2,3
    g4 += r0 * r0 * (c23 * c23 + c24 * c24);             // 4,5
    g4 += r0 * r0 * (c13 * c13 + c14 * c14);             // 6,7
    g4 += 2.0 * r0 * ra * c24 * c23;                     // 8
    g4 += 2.0 * r0 * ra * c14 * c13;                     // 9
    g4 += 2.0 * r0 * rs * c14 * c24;                     // 10
    g4 += 2.0 * r0 * rs * c13 * c23;                     // 11
    g4 += ra * ra * rs * rs;                             // 12
    g4 += c13 * c13 * c24 * c24 + c14 * c14 * c23 * c23; // 13,14
    g4 += 2.0 * c24 * c13 * c14 * c23;                   // 15
    g4 += 2.0 * ra * rs * c24 * c13;                     // 16
    g4 += 2.0 * ra * rs * c23 * c14;                     // 17
    return g4;
}

double G4_rate(const CorrelationModel& model, const G4Delays& d) {
    // Reconstruct absolute times from three independent delays and require
    // the remaining three to close the cycles.
    const double t1 = 0.0;
    const double t4 = -d.tau14;
    const double t2 = d.tau24 + t4;
    const double t3 = d.tau34 + t4;
    const double scale =
        std::max({1.0, std::abs(d.tau34), std::abs(d.tau24), std::abs(d.tau14),
                  std::abs(d.tau23), std::abs(d.tau21), std::abs(d.tau13)});
    const double tol = 1e-9 * scale;
    if (std::abs(d.tau21 - (t2 - t1)) > tol ||
        std::abs(d.tau23 - (t2 - t3)) > tol ||
        std::abs(d.tau13 - (t1 - t3)) > tol)
        throw InconsistentDelays("pairwise delays do not close their cycles");
    return G4_rate(model, t1, t2, t3, t4);
}

}  // namespace quadcorr
