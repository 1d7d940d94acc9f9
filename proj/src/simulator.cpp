#include "quadcorr/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>

#include "quadcorr/parallel.hpp"
#include "quadcorr/random.hpp"

namespace quadcorr {

namespace {

constexpr double kSlabNs = 1e9;  // generation slab: one second

// Every photon the detectors can see belongs to exactly one of these event
// classes.  Detection is folded into the class rates up front (Poisson
// thinning), so only photons that actually click are ever drawn; each class
// is then an independent Poisson process seeded by (master, class, slab).
//
//   0..3   pair with both photons detected: (D1,D3) (D1,D4) (D2,D3) (D2,D4)
//   4..5   pair with only the Stokes photon detected, on D1 / D2
//   6..7   pair with only the anti-Stokes photon detected, on D3 / D4
//   8..22  double pair, indexed by the nonempty detected subset of
//          {s1, s2, a1, a2} (bits 1,2,4,8); detector choice within an arm
//          is drawn conditionally per photon
//   23..26 background + dark counts merged per detector
enum : int {
    kClassPairBoth = 0,
    kClassPairStokesOnly = 4,
    kClassPairAntiOnly = 6,
    kClassDouble = 8,
    kClassNoise = 23,
    kClassCount = 27,
};

constexpr unsigned kS1 = 1, kS2 = 2, kA1 = 4, kA2 = 8;

struct EngineParams {
    std::array<double, kClassCount> rate{};  // events per second
    double tau_0_ns = 0.0;
    double tau_c_ns = 0.0;
    double tau_b_ns = 0.0;
    double margin_ns = 0.0;  // hard bound on any photon offset from its seed
    double p_d1 = 0.0;       // P(D1 | Stokes photon detected)
    double p_d3 = 0.0;       // P(D3 | anti-Stokes photon detected)
};

EngineParams make_params(const SimConfig& cfg) {
    EngineParams ep;
    ep.tau_0_ns = cfg.tau_0_ns;
    ep.tau_c_ns = cfg.tau_c_ns;
    ep.tau_b_ns = cfg.tau_b_ns;
    ep.margin_ns = std::max({1000.0, cfg.tau_0_ns + 40.0 * cfg.tau_c_ns,
                             40.0 * cfg.tau_b_ns});
    const double q_s = cfg.eta[0] + cfg.eta[1];
    const double q_a = cfg.eta[2] + cfg.eta[3];
    ep.p_d1 = q_s > 0.0 ? cfg.eta[0] / q_s : 0.0;
    ep.p_d3 = q_a > 0.0 ? cfg.eta[2] / q_a : 0.0;

    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            ep.rate[kClassPairBoth + 2 * i + j] =
                cfg.g_p * cfg.eta[i] * cfg.eta[2 + j];
        }
        ep.rate[kClassPairStokesOnly + i] = cfg.g_p * cfg.eta[i] * (1.0 - q_a);
        ep.rate[kClassPairAntiOnly + i] = cfg.g_p * (1.0 - q_s) * cfg.eta[2 + i];
    }
    for (unsigned mask = 1; mask <= 15; ++mask) {
        double p = 1.0;
        p *= (mask & kS1) ? q_s : 1.0 - q_s;
        p *= (mask & kS2) ? q_s : 1.0 - q_s;
        p *= (mask & kA1) ? q_a : 1.0 - q_a;
        p *= (mask & kA2) ? q_a : 1.0 - q_a;
        ep.rate[kClassDouble + static_cast<int>(mask) - 1] = cfg.g_q * p;
    }
    for (int k = 0; k < 4; ++k) {
        const double bg = k < 2 ? cfg.bg_s : cfg.bg_a;
        ep.rate[kClassNoise + k] = bg * cfg.eta[k] + cfg.dark[k];
    }
    return ep;
}

double anti_delay(Rng& rng, const EngineParams& ep) {
    return std::min(ep.tau_0_ns + rng.exponential(ep.tau_c_ns), ep.margin_ns);
}

double seed_spread(Rng& rng, const EngineParams& ep) {
    return std::clamp(rng.two_sided_exponential(ep.tau_b_ns), -ep.margin_ns,
                      ep.margin_ns);
}

int pick_stokes(Rng& rng, const EngineParams& ep) {
    return rng.uniform() < ep.p_d1 ? 1 : 2;
}

int pick_anti(Rng& rng, const EngineParams& ep) {
    return rng.uniform() < ep.p_d3 ? 3 : 4;
}

// Generates one class over one slab, quantizes, and appends the surviving
// records as format words (ticks << 4 | one-hot channel).  Draw order within
// an event is fixed, so output is reproducible independent of scheduling.
void generate_class_slab(const SimConfig& cfg, const EngineParams& ep,
                         int class_id, std::uint64_t slab_index,
                         double slab_start_ns, double slab_len_ns,
                         std::uint64_t t_m_ticks,
                         std::vector<std::uint64_t>& out) {
    const double rate = ep.rate[class_id];
    if (rate <= 0.0) return;
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(class_id),
                        slab_index));
    const double mean_gap_ns = 1e9 / rate;
    const double ticks_per_ns = 1000.0 / static_cast<double>(cfg.tick_ps);
    const double t_m = static_cast<double>(t_m_ticks);

    auto emit = [&](double t_ns, int ch) {
        if (t_ns < 0.0) return;
        const double tick = std::floor(t_ns * ticks_per_ns);
        if (tick >= t_m) return;
        out.push_back((static_cast<std::uint64_t>(tick) << 4) |
                      (std::uint64_t{1} << (ch - 1)));
    };

    for (double t = rng.exponential(mean_gap_ns); t < slab_len_ns;
         t += rng.exponential(mean_gap_ns)) {
        const double at = slab_start_ns + t;
        if (class_id < kClassPairStokesOnly) {
            const int idx = class_id - kClassPairBoth;
            emit(at, 1 + idx / 2);
            emit(at + anti_delay(rng, ep), 3 + idx % 2);
        } else if (class_id < kClassPairAntiOnly) {
            emit(at, 1 + class_id - kClassPairStokesOnly);
        } else if (class_id < kClassDouble) {
            emit(at + anti_delay(rng, ep), 3 + class_id - kClassPairAntiOnly);
        } else if (class_id < kClassNoise) {
            const unsigned mask =
                static_cast<unsigned>(class_id - kClassDouble) + 1;
            double dt2 = 0.0;
            if (mask & (kS2 | kA2)) dt2 = seed_spread(rng, ep);
            if (mask & kS1) emit(at, pick_stokes(rng, ep));
            if (mask & kS2) emit(at + dt2, pick_stokes(rng, ep));
            if (mask & kA1) emit(at + anti_delay(rng, ep), pick_anti(rng, ep));
            if (mask & kA2) {
                emit(at + dt2 + anti_delay(rng, ep), pick_anti(rng, ep));
            }
        } else {
            emit(at, 1 + class_id - kClassNoise);
        }
    }
}

// Runs the full generation pipeline, delivering final records to `sink` in
// canonical order (ticks ascending, channel ascending on ties).  Photons can
// trail their event seed by at most margin_ns (samplers are clamped), so
// once every slab up to some boundary has been generated, everything older
// than boundary - margin is final and can be flushed.
template <typename Sink>
void run_engine(const SimConfig& cfg, Sink&& sink) {
    cfg.validate();
    const std::uint64_t t_m = cfg.t_m_ticks();
    const EngineParams ep = make_params(cfg);
    const double total_ns = cfg.duration_s * 1e9;
    const std::uint64_t slabs = static_cast<std::uint64_t>(
        std::max(1.0, std::ceil(total_ns / kSlabNs)));
    const double ticks_per_ns = 1000.0 / static_cast<double>(cfg.tick_ps);

    // Per-channel censoring state, shared across flushes.  Records closer
    // than min_sep ticks to the previous accepted record on their channel
    // are dropped; with dead time off this reduces to the same-tick merge.
    const std::uint64_t min_sep = std::max<std::uint64_t>(cfg.dead_time_ticks, 1);
    std::array<std::uint64_t, 4> last{};
    std::array<bool, 4> seen{};
    auto deliver = [&](const std::uint64_t* begin, const std::uint64_t* end) {
        for (const std::uint64_t* p = begin; p != end; ++p) {
            const int ch = std::countr_zero(*p & 0xF);
            const std::uint64_t tick = *p >> 4;
            if (seen[ch] && tick < last[ch] + min_sep) continue;
            seen[ch] = true;
            last[ch] = tick;
            sink(*p);
        }
    };

    std::array<std::vector<std::uint64_t>, kClassCount> class_words;
    std::vector<std::uint64_t> pending;
    const int threads = max_threads();

    for (std::uint64_t slab = 0; slab < slabs; ++slab) {
        const double slab_start = static_cast<double>(slab) * kSlabNs;
        const double slab_len = std::min(kSlabNs, total_ns - slab_start);

#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (int c = 0; c < kClassCount; ++c) {
            class_words[c].clear();
            generate_class_slab(cfg, ep, c, slab, slab_start, slab_len, t_m,
                                class_words[c]);
        }
        for (int c = 0; c < kClassCount; ++c) {
            pending.insert(pending.end(), class_words[c].begin(),
                           class_words[c].end());
        }

        const double boundary_ns = slab_start + slab_len - ep.margin_ns;
        if (slab + 1 < slabs && boundary_ns > 0.0) {
            const std::uint64_t boundary_tick = static_cast<std::uint64_t>(
                std::floor(boundary_ns * ticks_per_ns));
            const std::uint64_t limit = boundary_tick << 4;
            auto mid = std::partition(pending.begin(), pending.end(),
                                      [&](std::uint64_t w) { return w < limit; });
            std::sort(pending.begin(), mid);
            deliver(pending.data(), pending.data() + (mid - pending.begin()));
            pending.erase(pending.begin(), mid);
        }
    }
    std::sort(pending.begin(), pending.end());
    deliver(pending.data(), pending.data() + pending.size());
}

}  // namespace

void SimConfig::validate() const {
    auto nonneg = [](double v, const char* what) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InvalidConfig(std::string(what) + " must be finite and >= 0");
        }
    };
    nonneg(g_p, "g_p");
    nonneg(g_q, "g_q");
    nonneg(bg_s, "bg_s");
    nonneg(bg_a, "bg_a");
    for (double d : dark) nonneg(d, "dark rate");
    for (double e : eta) {
        nonneg(e, "eta");
        if (e > 1.0) throw InvalidConfig("eta must be at most 1");
    }
    if (eta[0] + eta[1] > 1.0) throw InvalidConfig("eta1 + eta2 exceeds 1");
    if (eta[2] + eta[3] > 1.0) throw InvalidConfig("eta3 + eta4 exceeds 1");
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
        throw InvalidConfig("duration must be positive");
    }
    if (tick_ps < 1) throw InvalidConfig("tick duration must be at least 1 ps");
    if (!(tau_c_ns > 0.0) || !std::isfinite(tau_c_ns)) {
        throw InvalidConfig("tau_c must be positive");
    }
    if (!(tau_b_ns > 0.0) || !std::isfinite(tau_b_ns)) {
        throw InvalidConfig("tau_b must be positive");
    }
    if (!(tau_0_ns >= 0.0) || !std::isfinite(tau_0_ns)) {
        throw InvalidConfig("tau_0 must be finite and >= 0");
    }
}

std::uint64_t SimConfig::t_m_ticks() const {
    return static_cast<std::uint64_t>(
        std::floor(duration_s * 1e12 / static_cast<double>(tick_ps)));
}

TagStream simulate(const SimConfig& config) {
    TagStream out(config.tick_ps, config.t_m_ticks());
    run_engine(config, [&](std::uint64_t word) {
        out.append(word >> 4, std::countr_zero(word & 0xF) + 1);
    });
    out.validate();
    return out;
}

void simulate_to_file(const SimConfig& config, const std::string& path) {
    TagFileHeader h;
    h.tick_duration_ps = config.tick_ps;
    h.t_m_ticks = config.t_m_ticks();
    TagFileWriter writer(path, h);
    run_engine(config, [&](std::uint64_t word) {
        writer.write(word >> 4, std::countr_zero(word & 0xF) + 1);
    });
    writer.close();
}

TagStream simulate_uncorrelated_pairs(SimConfig config) {
    config.g_q = 0.0;
    return simulate(config);
}

SimConfig scaled_config(const SimConfig& base, double pump,
                        std::uint64_t level_index) {
    if (!(pump >= 0.0) || !std::isfinite(pump)) {
        throw InvalidConfig("pump scale must be finite and >= 0");
    }
    SimConfig c = base;
    c.g_p = base.g_p * pump;
    c.g_q = base.g_q * pump * pump;
    c.bg_s = base.bg_s * pump;
    c.bg_a = base.bg_a * pump;
    c.seed = derive_seed(base.seed, 1000, level_index);
    return c;
}

std::vector<TagStream> power_sweep(const SimConfig& base,
                                   const std::vector<double>& pump_levels) {
    std::vector<TagStream> out;
    out.reserve(pump_levels.size());
    for (std::size_t i = 0; i < pump_levels.size(); ++i) {
        out.push_back(simulate(scaled_config(base, pump_levels[i], i)));
    }
    return out;
}

}  // namespace quadcorr
