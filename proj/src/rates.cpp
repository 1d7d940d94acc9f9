#include "quadcorr/rates.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "quadcorr/accidentals.hpp"

namespace quadcorr {

namespace {

// Cross-arm pair combinations, matching the report/order convention.
constexpr std::array<std::array<int, 2>, 4> kCrossPairs{
    {{1, 3}, {1, 4}, {2, 3}, {2, 4}}};

// Triplet combinations c123, c124, c134, c234.  Each has one arm fully
// detected (both its channels fire) and one "lonely" channel whose arm
// partner is lost; the lonely channel collects either of that arm's two
// photons.
constexpr std::array<std::array<int, 2>, 4> kCompleteArm{
    {{1, 2}, {1, 2}, {3, 4}, {3, 4}}};
constexpr std::array<int, 4> kLonely{3, 4, 1, 2};

void check_eta(const std::array<double, 4>& eta) {
    for (double e : eta) {
        if (!(e > 0.0)) {
            throw ZeroEfficiency("channel efficiencies must be positive");
        }
    }
}

void finalize(EstimateSummary& s) {
    double sum = 0.0;
    for (double v : s.estimates) sum += v;
    s.mean = sum / 4.0;
    double ss = 0.0;
    for (double v : s.estimates) ss += (v - s.mean) * (v - s.mean);
    s.spread = std::sqrt(ss / 3.0);
    if (s.mean < 0.0) {
        s.mean = 0.0;
        s.clamped = true;
    }
}

}  // namespace

double EfficiencySet::eta(int channel) const {
    if (channel < 1 || channel > 4) {
        throw InvalidConfig("channel must be in 1..4");
    }
    return (channel <= 2 ? eta_s : eta_a) * eta_prime[channel - 1];
}

std::array<double, 4> EfficiencySet::totals() const {
    return {eta(1), eta(2), eta(3), eta(4)};
}

void EfficiencySet::validate() const {
    for (double e : eta_prime) {
        if (!(e > 0.0)) throw ZeroEfficiency("eta' must be positive");
        if (e > 1.0) throw DomainError("eta' must be at most 1");
    }
    for (double e : {eta_s, eta_a}) {
        if (!(e > 0.0)) throw ZeroEfficiency("arm transmission must be positive");
        if (e > 1.0) throw DomainError("arm transmission must be at most 1");
    }
    // A photon exits the beamsplitter toward at most one detector.
    if (eta(1) + eta(2) > 1.0) {
        throw DomainError("eta1 + eta2 exceeds 1");
    }
    if (eta(3) + eta(4) > 1.0) {
        throw DomainError("eta3 + eta4 exceeds 1");
    }
}

double gq_from_quadruplets(double c_q, const std::array<double, 4>& eta) {
    check_eta(eta);
    return c_q / (4.0 * eta[0] * eta[1] * eta[2] * eta[3]);
}

EstimateSummary gq_from_triplets(const std::array<double, 4>& c_triple,
                                 const std::array<double, 4>& eta) {
    check_eta(eta);
    EstimateSummary s;
    for (int t = 0; t < 4; ++t) {
        const double ei = eta[kCompleteArm[t][0] - 1];
        const double ej = eta[kCompleteArm[t][1] - 1];
        const double el = eta[kLonely[t] - 1];
        s.estimates[t] = c_triple[t] / (2.0 * ei * ej * el * (2.0 - el));
    }
    finalize(s);
    return s;
}

EstimateSummary gp_from_pairs(const std::array<double, 4>& c_pair_cross,
                              double g_q,
                              const std::array<double, 4>& eta) {
    check_eta(eta);
    EstimateSummary s;
    for (int p = 0; p < 4; ++p) {
        const double ei = eta[kCrossPairs[p][0] - 1];
        const double ej = eta[kCrossPairs[p][1] - 1];
        s.estimates[p] =
            c_pair_cross[p] / (ei * ej) - g_q * (2.0 - ei) * (2.0 - ej);
    }
    finalize(s);
    return s;
}

SynthesizedRates synthesize_rates(const GenerationRates& gen,
                                  const std::array<double, 4>& eta) {
    check_eta(eta);
    SynthesizedRates out;
    for (int p = 0; p < 4; ++p) {
        const double ei = eta[kCrossPairs[p][0] - 1];
        const double ej = eta[kCrossPairs[p][1] - 1];
        out.c_pair_cross[p] =
            ei * ej * (gen.g_p + gen.g_q * (2.0 - ei) * (2.0 - ej));
    }
    for (int t = 0; t < 4; ++t) {
        const double ei = eta[kCompleteArm[t][0] - 1];
        const double ej = eta[kCompleteArm[t][1] - 1];
        const double el = eta[kLonely[t] - 1];
        out.c_triple[t] = 2.0 * gen.g_q * ei * ej * el * (2.0 - el);
    }
    out.c_q = 4.0 * gen.g_q * eta[0] * eta[1] * eta[2] * eta[3];
    return out;
}

namespace {

// Nine model rates and their Jacobian with respect to x = (s, a, gp, gq),
// where s and a are the arm transmissions.
void eval_model(const std::array<double, 4>& ep, const Eigen::Vector4d& x,
                Eigen::Matrix<double, 9, 1>& m,
                Eigen::Matrix<double, 9, 4>* jac) {
    const double s = x[0];
    const double a = x[1];
    const double gp = x[2];
    const double gq = x[3];
    auto eta_of = [&](int ch) {
        return (ch <= 2 ? s : a) * ep[ch - 1];
    };

    for (int p = 0; p < 4; ++p) {
        const double ei = eta_of(kCrossPairs[p][0]);  // Stokes channel
        const double ej = eta_of(kCrossPairs[p][1]);  // anti-Stokes channel
        m[p] = ei * ej * gp + gq * ei * (2.0 - ei) * ej * (2.0 - ej);
        if (jac) {
            (*jac)(p, 0) = (ei / s) * ej * gp +
                           gq * (2.0 - 2.0 * ei) * (ei / s) * ej * (2.0 - ej);
            (*jac)(p, 1) = ei * (ej / a) * gp +
                           gq * ei * (2.0 - ei) * (2.0 - 2.0 * ej) * (ej / a);
            (*jac)(p, 2) = ei * ej;
            (*jac)(p, 3) = ei * (2.0 - ei) * ej * (2.0 - ej);
        }
    }
    for (int t = 0; t < 4; ++t) {
        const int lonely = kLonely[t];
        const double ei = eta_of(kCompleteArm[t][0]);
        const double ej = eta_of(kCompleteArm[t][1]);
        const double el = eta_of(lonely);
        const double u = ei * ej;
        const double w = el * (2.0 - el);
        const int row = 4 + t;
        m[row] = 2.0 * gq * u * w;
        if (jac) {
            const bool stokes_complete = kCompleteArm[t][0] <= 2;
            const double t_complete = stokes_complete ? s : a;
            const double t_other = stokes_complete ? a : s;
            const double d_complete = 2.0 * gq * w * 2.0 * u / t_complete;
            const double d_other =
                2.0 * gq * u * (2.0 - 2.0 * el) * (el / t_other);
            (*jac)(row, 0) = stokes_complete ? d_complete : d_other;
            (*jac)(row, 1) = stokes_complete ? d_other : d_complete;
            (*jac)(row, 2) = 0.0;
            (*jac)(row, 3) = 2.0 * u * w;
        }
    }
    const double prod = eta_of(1) * eta_of(2) * eta_of(3) * eta_of(4);
    m[8] = 4.0 * gq * prod;
    if (jac) {
        (*jac)(8, 0) = 2.0 * m[8] / s;
        (*jac)(8, 1) = 2.0 * m[8] / a;
        (*jac)(8, 2) = 0.0;
        (*jac)(8, 3) = 4.0 * prod;
    }
}

}  // namespace

LossFit fit_arm_losses(const std::array<double, 4>& c_pair_cross,
                       const std::array<double, 4>& c_triple,
                       double c_q,
                       const std::array<double, 4>& eta_prime) {
    for (double e : eta_prime) {
        if (!(e > 0.0)) throw ZeroEfficiency("eta' must be positive");
    }
    Eigen::Matrix<double, 9, 1> target;
    for (int p = 0; p < 4; ++p) target[p] = c_pair_cross[p];
    for (int t = 0; t < 4; ++t) target[4 + t] = c_triple[t];
    target[8] = c_q;
    for (int k = 0; k < 9; ++k) {
        if (!(target[k] > 0.0) || !std::isfinite(target[k])) {
            throw DegenerateInput(
                "all nine corrected rates must be positive for the fit");
        }
    }

    // Initial guess: mid-range arm transmissions, then the closed-form
    // quadruplet and pair inversions for the generation rates.
    const double s0 = 0.5;
    const double a0 = 0.5;
    std::array<double, 4> eta0;
    for (int k = 0; k < 4; ++k) {
        eta0[k] = (k < 2 ? s0 : a0) * eta_prime[k];
    }
    double gq0 = gq_from_quadruplets(c_q, eta0);
    double gp0 = gp_from_pairs(c_pair_cross, gq0, eta0).mean;
    if (!(gp0 > 0.0)) gp0 = gq0;

    // Work in coordinates scaled by the initial guess so the normal
    // equations stay well conditioned despite g >> eta.
    const Eigen::Vector4d scale(s0, a0, gp0, gq0);
    Eigen::Vector4d u = Eigen::Vector4d::Ones();

    auto residual_at = [&](const Eigen::Vector4d& uu,
                           Eigen::Matrix<double, 9, 1>& r) {
        const Eigen::Vector4d x = scale.cwiseProduct(uu);
        if (!(x[0] > 0.0) || !(x[1] > 0.0)) return false;
        Eigen::Matrix<double, 9, 1> m;
        eval_model(eta_prime, x, m, nullptr);
        r = m.cwiseQuotient(target) -
            Eigen::Matrix<double, 9, 1>::Ones();
        return true;
    };

    Eigen::Matrix<double, 9, 1> r;
    residual_at(u, r);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    constexpr int kMaxIterations = 200;
    constexpr double kStepTol = 1e-9;
    bool converged = false;
    int iterations = 0;

    while (iterations < kMaxIterations && !converged) {
        ++iterations;
        const Eigen::Vector4d x = scale.cwiseProduct(u);
        Eigen::Matrix<double, 9, 1> m;
        Eigen::Matrix<double, 9, 4> jx;
        eval_model(eta_prime, x, m, &jx);
        Eigen::Matrix<double, 9, 4> j = jx;
        for (int col = 0; col < 4; ++col) {
            j.col(col) = jx.col(col).cwiseQuotient(target) * scale[col];
        }
        const Eigen::Matrix4d jtj = j.transpose() * j;
        const Eigen::Vector4d grad = j.transpose() * r;

        bool accepted = false;
        Eigen::Vector4d step = Eigen::Vector4d::Zero();
        for (int tries = 0; tries < 40 && !accepted; ++tries) {
            Eigen::Matrix4d damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal() +
                                 Eigen::Vector4d::Constant(1e-30);
            step = damped.ldlt().solve(-grad);
            const Eigen::Vector4d u_try = u + step;
            Eigen::Matrix<double, 9, 1> r_try;
            if (residual_at(u_try, r_try)) {
                const double cost_try = r_try.squaredNorm();
                if (cost_try <= cost) {
                    u = u_try;
                    r = r_try;
                    cost = cost_try;
                    lambda = std::max(lambda * 0.25, 1e-12);
                    accepted = true;
                }
            }
            if (!accepted) lambda *= 4.0;
        }
        if (step.lpNorm<Eigen::Infinity>() < kStepTol) {
            converged = true;
        } else if (!accepted) {
            break;
        }
    }
    if (!converged) {
        throw NoConvergence("arm-loss fit did not reach the step tolerance");
    }

    LossFit fit;
    const Eigen::Vector4d x = scale.cwiseProduct(u);
    fit.eta_s = x[0];
    fit.eta_a = x[1];
    fit.g_p = x[2];
    fit.g_q = x[3];
    fit.iterations = iterations;
    if (fit.g_p < 0.0) {
        fit.g_p = 0.0;
        fit.clamped = true;
    }
    if (fit.g_q < 0.0) {
        fit.g_q = 0.0;
        fit.clamped = true;
    }
    Eigen::Matrix<double, 9, 1> m_final;
    eval_model(eta_prime,
               Eigen::Vector4d(fit.eta_s, fit.eta_a, fit.g_p, fit.g_q),
               m_final, nullptr);
    fit.residual_norm =
        (m_final.cwiseQuotient(target) -
         Eigen::Matrix<double, 9, 1>::Ones())
            .norm();
    return fit;
}

InferenceInputs inference_inputs(const CorrectedRates& corrected) {
    InferenceInputs in;
    in.c_pair_cross = {corrected.c_ij(1, 3), corrected.c_ij(1, 4),
                       corrected.c_ij(2, 3), corrected.c_ij(2, 4)};
    in.c_triple = corrected.c_triple;
    in.c_q = corrected.c_1234;
    return in;
}

InferenceResult infer_rates(const InferenceInputs& in,
                            const std::array<double, 4>& eta_prime) {
    InferenceResult res;
    res.fit = fit_arm_losses(in.c_pair_cross, in.c_triple, in.c_q, eta_prime);
    EfficiencySet eff;
    eff.eta_prime = eta_prime;
    eff.eta_s = res.fit.eta_s;
    eff.eta_a = res.fit.eta_a;
    res.eta_total = eff.totals();
    res.gq_quad = gq_from_quadruplets(in.c_q, res.eta_total);
    res.gq_triplets = gq_from_triplets(in.c_triple, res.eta_total);
    res.gp_pairs = gp_from_pairs(in.c_pair_cross, res.fit.g_q, res.eta_total);
    return res;
}

void write_inference_report(std::ostream& os, const InferenceInputs& in,
                            const std::array<double, 4>& eta_prime,
                            const InferenceResult& res) {
    os << std::setprecision(17);
    static constexpr std::array<const char*, 4> kPairNames{"13", "14", "23",
                                                           "24"};
    static constexpr std::array<const char*, 4> kTripleNames{"123", "124",
                                                             "134", "234"};
    for (int p = 0; p < 4; ++p) {
        os << "input.c" << kPairNames[p] << " = " << in.c_pair_cross[p]
           << "\n";
    }
    for (int t = 0; t < 4; ++t) {
        os << "input.c" << kTripleNames[t] << " = " << in.c_triple[t] << "\n";
    }
    os << "input.c1234 = " << in.c_q << "\n";
    for (int k = 0; k < 4; ++k) {
        os << "input.eta_prime." << (k + 1) << " = " << eta_prime[k] << "\n";
    }
    os << "fit.eta_s = " << res.fit.eta_s << "\n";
    os << "fit.eta_a = " << res.fit.eta_a << "\n";
    os << "fit.g_p = " << res.fit.g_p << "\n";
    os << "fit.g_q = " << res.fit.g_q << "\n";
    os << "fit.residual_norm = " << res.fit.residual_norm << "\n";
    os << "fit.iterations = " << res.fit.iterations << "\n";
    os << "fit.clamped = " << (res.fit.clamped ? 1 : 0) << "\n";
    for (int k = 0; k < 4; ++k) {
        os << "eta." << (k + 1) << " = " << res.eta_total[k] << "\n";
    }
    os << "estimate.g_q.quadruplets = " << res.gq_quad << "\n";
    for (int t = 0; t < 4; ++t) {
        os << "estimate.g_q.triplet." << kTripleNames[t] << " = "
           << res.gq_triplets.estimates[t] << "\n";
    }
    os << "estimate.g_q.triplets.mean = " << res.gq_triplets.mean << "\n";
    os << "estimate.g_q.triplets.spread = " << res.gq_triplets.spread << "\n";
    for (int p = 0; p < 4; ++p) {
        os << "estimate.g_p.pair." << kPairNames[p] << " = "
           << res.gp_pairs.estimates[p] << "\n";
    }
    os << "estimate.g_p.pairs.mean = " << res.gp_pairs.mean << "\n";
    os << "estimate.g_p.pairs.spread = " << res.gp_pairs.spread << "\n";
}

}  // namespace quadcorr
