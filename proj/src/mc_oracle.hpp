#pragma once

#include "model.hpp"

#include <cstdint>

namespace nomasec {

enum class RateMode { NomaStrong, NomaWeak, OmaStrong, OmaWeak };

struct McEstimate {
    double mean;    // bits/s/Hz
    double std_err; // sample std / sqrt(n)
    std::uint64_t n;
};

struct McOptions {
    int threads = 0;                   // 0 = hardware concurrency (capped at 16)
    bool oma_estimation_noise = false; // opt-in sigma^2 shift of the OMA gains
};

// One channel realization (estimated gains, linear scale).
struct GainSample {
    double g_near;
    double g_far;
    double g_eve;
    double g_pr_max;
};

// Instantaneous ST transmit power: min(P_max, I_p / g_pr_max).
double transmit_power(double g_pr_max, double p_max, double i_peak);

// Instantaneous secrecy rate of one realization (bits/s/Hz, >= 0). Users are
// ordered by estimated gain inside: strong = max(g_near, g_far).
double instant_secrecy_rate(RateMode mode, const GainSample& g, double power, double a_s,
                            double sigma_eps2, bool oma_estimation_noise = false);

// Plain Monte Carlo estimate of the ergodic secrecy rate.
//
// Determinism contract: for fixed (cfg, mode, n, seed) the result is
// bit-identical regardless of thread count. Samples are drawn in chunks of
// 65536; chunk c uses an mt19937_64 engine seeded with
// splitmix64(seed ^ (c + 1) * 0x9E3779B97F4A7C15), uniforms are mapped to
// (0, 1] as ((r >> 11) + 1) * 2^-53, gains are -OmegaTilde * ln(u) drawn in
// the fixed order (near, far, eve, pr_1 .. pr_M), and per-chunk partial sums
// are reduced pairwise in chunk order.
McEstimate mc_esr(const SystemConfig& cfg, RateMode mode, std::uint64_t n, std::uint64_t seed,
                  const McOptions& options = {});

} // namespace nomasec
