#include "power_alloc.hpp"

#include "closed_form.hpp"
#include "errors.hpp"
#include "quad_oracle.hpp"

#include <array>
#include <cmath>
#include <string>

namespace nomasec {

namespace {
constexpr double kBracketLo = 1e-6;
constexpr double kBracketHi = 0.5 - 1e-6;
} // namespace

AllocationResult match_strong_user(const SystemConfig& cfg, double tol, int max_iter,
                                   double oma_rel_tol, bool oma_estimation_noise)
{
    if (!(tol >= 1e-8))
        throw ModelError("match_strong_user: tol must be >= 1e-8 bits/s/Hz");
    if (max_iter < 1)
        throw ModelError("match_strong_user: max_iter must be >= 1");

    SystemConfig probe = cfg;
    probe.a_s = 0.25; // placeholder; the field under search is ignored
    probe.validate();

    const double target = quad_oma_esr(probe, User::Strong, oma_rel_tol, oma_estimation_noise);
    auto gap = [&](double a) {
        probe.a_s = a;
        return esr_strong(probe).total - target;
    };

    // Monotonicity pre-scan; R_s should be nondecreasing in a_s.
    constexpr int kScan = 9;
    std::array<double, kScan> a_grid, g_grid;
    for (int i = 0; i < kScan; ++i) {
        a_grid[i] = kBracketLo + (kBracketHi - kBracketLo) * i / (kScan - 1);
        g_grid[i] = gap(a_grid[i]);
    }
    const double slack = std::max(tol, 1e-9);
    for (int i = 0; i + 1 < kScan; ++i)
        if (g_grid[i + 1] < g_grid[i] - slack)
            throw NonMonotoneError(
                "match_strong_user: strong-user ESR decreases between a_s = " +
                std::to_string(a_grid[i]) + " and " + std::to_string(a_grid[i + 1]) +
                "; equality matching is ill-posed for this configuration");

    auto result_at = [&](double a, int iters, BracketStatus st) {
        return AllocationResult{a, 1.0 - a, std::fabs(gap(a)), iters, st, target};
    };

    if (g_grid[0] > 0.0)
        return result_at(kBracketLo, 0, BracketStatus::ClampedLow);
    if (g_grid[kScan - 1] < 0.0)
        return result_at(kBracketHi, 0, BracketStatus::ClampedHigh);

    // Narrow to the scan cell with the sign change, then bisect.
    double lo = a_grid[0], hi = a_grid[kScan - 1];
    double g_lo = g_grid[0];
    for (int i = 0; i + 1 < kScan; ++i) {
        if (g_grid[i] <= 0.0 && g_grid[i + 1] >= 0.0) {
            lo = a_grid[i];
            hi = a_grid[i + 1];
            g_lo = g_grid[i];
            break;
        }
    }

    int iters = 0;
    double mid = 0.5 * (lo + hi);
    while (iters < max_iter) {
        mid = 0.5 * (lo + hi);
        const double g_mid = gap(mid);
        ++iters;
        if (std::fabs(g_mid) <= tol)
            return AllocationResult{mid, 1.0 - mid, std::fabs(g_mid), iters,
                                    BracketStatus::Converged, target};
        if ((g_mid < 0.0) == (g_lo < 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    // With max_iter >= ~60 this is unreachable for a continuous gap function.
    throw ConvergenceError("match_strong_user: |gap| still " + std::to_string(std::fabs(gap(mid))) +
                           " after " + std::to_string(iters) + " bisection steps (tol " +
                           std::to_string(tol) + ")");
}

} // namespace nomasec
