#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "quadcorr/errors.hpp"
#include "quadcorr/tagstream.hpp"

namespace quadcorr {

// Poisson cluster model of the photon-pair source.  Pair events arrive at
// rate g_p: each emits a Stokes photon at t and an anti-Stokes photon at
// t + tau_0 + Exp(tau_c).  Double-pair events arrive at rate g_q: each emits
// two such pairs with seed times t and t + Laplace(tau_b), the anti-Stokes
// delays drawn independently per pair.  Background photons are uncorrelated
// Poisson processes per arm and are thinned like source photons; dark counts
// fire directly on each detector.  eta_k is the total probability that a
// photon of the corresponding arm clicks detector k (transmission x 50:50
// split x quantum efficiency), so eta1+eta2 <= 1 and eta3+eta4 <= 1.
struct SimConfig {
    double g_p = 0.0;  // pair events per second
    double g_q = 0.0;  // double-pair events per second
    double tau_c_ns = 16.0;
    double tau_0_ns = 8.0;
    double tau_b_ns = 16.0;
    double bg_s = 0.0;  // background photons/s on the Stokes arm
    double bg_a = 0.0;  // background photons/s on the anti-Stokes arm
    std::array<double, 4> dark{};  // dark counts/s per detector
    std::array<double, 4> eta{1.0, 1.0, 1.0, 1.0};
    std::uint64_t dead_time_ticks = 0;  // non-paralyzable, 0 = off
    double duration_s = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t tick_ps = TagStream::kDefaultTickPs;

    void validate() const;  // throws InvalidConfig
    std::uint64_t t_m_ticks() const;
};

// Deterministic for a given config+seed; output is sorted, quantized to
// ticks, same-channel same-tick collisions merged (keep first), and
// optionally dead-time censored.
TagStream simulate(const SimConfig& config);

// Identical engine streaming straight to a tag file: byte-identical to
// write_tag_file(simulate(config), path) without holding the stream in
// memory.
void simulate_to_file(const SimConfig& config, const std::string& path);

// Same engine with double-pair emission disabled; quadruplets in the output
// then come only from coincidental independent pairs.
TagStream simulate_uncorrelated_pairs(SimConfig config);

// Pump-power scaling: g_p and arm backgrounds scale linearly with pump,
// g_q quadratically (second-order process); dark counts stay fixed.  Each
// level gets an independently derived seed.
SimConfig scaled_config(const SimConfig& base, double pump,
                        std::uint64_t level_index);

std::vector<TagStream> power_sweep(const SimConfig& base,
                                   const std::vector<double>& pump_levels);

}  // namespace quadcorr
