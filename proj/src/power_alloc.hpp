#pragma once

#include "model.hpp"

namespace nomasec {

enum class BracketStatus { Converged, ClampedLow, ClampedHigh };

struct AllocationResult {
    double a_s;          // chosen strong-user fraction
    double a_w;          // 1 - a_s
    double achieved_gap; // |R_s(a_s) - R_{s,OMA}| in bits/s/Hz
    int iterations;      // bisection steps taken
    BracketStatus status;
    double oma_target;   // R_{s,OMA} the match was run against
};

// Picks a_s so the strong user's NOMA ESR equals its OMA ESR, leaving the
// rest to the weak user. The OMA target comes from the deterministic
// quadrature evaluator; bisection runs on [1e-6, 0.5 - 1e-6]. When the target
// is unreachable the result clamps to the nearer endpoint and reports the
// residual via achieved_gap / status.
//
// cfg.a_s is ignored (it is the unknown). Throws NonMonotoneError if a
// 9-point pre-scan finds the strong-user rate decreasing in a_s beyond
// tolerance, which would make equality matching meaningless.
//
// oma_estimation_noise selects the OMA baseline: false evaluates the printed
// formula (no sigma^2 on the gains), true applies the same estimation-noise
// shift the NOMA rates carry. The shifted baseline is what the reference
// curves reproduce; the printed one is the default everywhere else.
AllocationResult match_strong_user(const SystemConfig& cfg, double tol = 1e-6, int max_iter = 100,
                                   double oma_rel_tol = 1e-8, bool oma_estimation_noise = false);

} // namespace nomasec
