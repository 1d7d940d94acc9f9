#include "support/gaussian_mc.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "quadcorr/errors.hpp"
#include "quadcorr/random.hpp"

namespace quadcorr::testing {

namespace {

// Sampling transform A with A A^T = cov.  Eigendecomposition instead of
// Cholesky: coincident detection times make the covariance singular
// (perfectly correlated samples), which is legitimate here.
Eigen::Matrix4d sampling_transform(const Eigen::Matrix4d& cov) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(cov);
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::Vector4d lambda = es.eigenvalues();
    for (int k = 0; k < 4; ++k) {
        if (lambda(k) < -1e-9 * scale)
            throw DomainError("field covariance is not positive semidefinite");
        lambda(k) = std::sqrt(std::max(lambda(k), 0.0));
    }
    return es.eigenvectors() * lambda.asDiagonal();
}

}  // namespace

// The field vector (a1, a2, a3, a4) at the four detection times is a
// zero-mean complex Gaussian with
//   <a_i* a_j> = Gamma_ij   (same-arm: R(t_i - t_j); cross-arm: 0)
//   <a_i  a_j> = Pi_ij      (cross-arm: C(t_anti - t_stokes); same-arm: 0)
// Both matrices are real here, so the real and imaginary parts are
// independent 4-D Gaussians with covariances (Gamma + Pi) / 2 and
// (Gamma - Pi) / 2, and I_k = Re_k^2 + Im_k^2.
G4Sample mc_g4_rate(const CorrelationModel& model, const std::array<double, 4>& t,
                    std::size_t samples, std::uint64_t seed) {
    Eigen::Matrix4d gamma = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d pi = Eigen::Matrix4d::Zero();

    gamma(0, 0) = gamma(1, 1) = model.r0;
    gamma(2, 2) = gamma(3, 3) = model.r0;
    gamma(0, 1) = gamma(1, 0) = auto_amplitude(model, t[0] - t[1], Arm::stokes);
    gamma(2, 3) = gamma(3, 2) = auto_amplitude(model, t[2] - t[3], Arm::anti);

    for (int s = 0; s < 2; ++s) {
        for (int a = 2; a < 4; ++a) {
            pi(s, a) = pi(a, s) = cross_amplitude(model, t[a] - t[s]);
        }
    }

    const Eigen::Matrix4d l_re = sampling_transform(0.5 * (gamma + pi));
    const Eigen::Matrix4d l_im = sampling_transform(0.5 * (gamma - pi));

    Rng rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    Eigen::Vector4d z_re, z_im;
    for (std::size_t n = 0; n < samples; ++n) {
        for (int k = 0; k < 4; ++k) z_re(k) = rng.normal();
        for (int k = 0; k < 4; ++k) z_im(k) = rng.normal();
        const Eigen::Vector4d re = l_re * z_re;
        const Eigen::Vector4d im = l_im * z_im;
        double product = 1.0;
        for (int k = 0; k < 4; ++k) product *= re(k) * re(k) + im(k) * im(k);
        sum += product;
        sum_sq += product * product;
    }

    G4Sample out;
    const double n = static_cast<double>(samples);
    out.value = sum / n;
    const double var = (sum_sq - sum * sum / n) / (n - 1.0);
    out.std_error = std::sqrt(var / n);
    return out;
}

}  // namespace quadcorr::testing
