#include "quadcorr/gaussian_oracle.hpp"

namespace quadcorr {

double pn_squeezed(double zeta, int n) {
    if (zeta < 0.0) throw DomainError("zeta must be >= 0");
    if (n < 0) throw DomainError("n must be >= 0");
    const double beta = std::cosh(zeta);
    if (n == 0) return 1.0 / (beta * beta);
    const double alpha = std::tanh(zeta);
    if (alpha == 0.0) return 0.0;
    // tanh^(2n) / cosh^2 in log space to stay finite for large n.
    return std::exp(2.0 * n * std::log(alpha) - 2.0 * std::log(beta));
}

double pn_poisson(double mu, int n) {
    if (mu < 0.0) throw DomainError("mu must be >= 0");
    if (n < 0) throw DomainError("n must be >= 0");
    if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0));
}

}  // namespace quadcorr
