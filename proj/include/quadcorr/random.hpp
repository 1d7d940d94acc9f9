#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace quadcorr {

// splitmix64 step: used to derive statistically independent seeds from a
// master seed plus a position key, so parallel generation is order-free.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_kind,
                                 std::uint64_t position) {
    std::uint64_t h = splitmix64(master ^ 0x6a09e667f3bcc908ULL);
    h = splitmix64(h ^ stream_kind);
    h = splitmix64(h ^ position);
    return h;
}

// Thin wrapper over mt19937_64 with hand-rolled samplers.  std::<distribution>
// algorithms are implementation-defined, which would break byte-identical
// output across standard libraries; these samplers are pinned.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log argument.
    double uniform_pos() { return 1.0 - uniform(); }

    // Exponential with mean `tau`.
    double exponential(double tau) { return -tau * std::log(uniform_pos()); }

    // Two-sided (Laplace) with scale `tau`: density exp(-|x|/tau) / (2 tau).
    double two_sided_exponential(double tau) {
        const double mag = exponential(tau);
        return (engine_() & 1ULL) ? mag : -mag;
    }

    // Standard normal via Box-Muller; one spare value is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double theta = 6.283185307179586476925286766559 * uniform();
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Poisson count with mean `mu` (inversion for small mu, PTRS-free
    // normal-approximation-free exact chaining for the rest via gamma trick
    // is unnecessary here: stream generation uses exponential gaps instead).
    std::uint64_t poisson(double mu) {
        std::uint64_t n = 0;
        double t = exponential(1.0);
        while (t < mu) {
            ++n;
            t += exponential(1.0);
        }
        return n;
    }

   private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace quadcorr
