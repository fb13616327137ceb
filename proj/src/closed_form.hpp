#pragma once

#include "model.hpp"

namespace nomasec {

// One ergodic secrecy rate with its four integral components:
//   total = components[0] + components[1] - components[2] - components[3].
// Totals in [-1e-9, 0) are floating-point cancellation residue of a provably
// nonnegative quantity; they are reported as 0 with `clamped` set. Anything
// below -1e-9 throws InternalError.
struct EsrBreakdown {
    double total = 0.0;
    std::array<double, 4> components{};
    bool clamped = false;
};

// J1 kernel: Omega * J1(Omega) = int_{s2}^inf ln(1 + P_max x) e^{-x/Omega} dx.
// Evaluated as e^{-s2/Omega} [ln(1 + s2 P_max) + e1_scaled((1/P_max + s2)/Omega)]
// so nothing overflows for small Omega.
double j1(double omega, double p_max, double sigma_eps2);

// J2 kernel:
//   Omega * J2(Omega; B) =
//     int_Theta^inf B e^{-B y} [int_{s2}^inf ln(1 + (I_p/y) x) e^{-x/Omega} dx] dy.
// The removable singularity at B = 1/(I_p Omega) is handled by evaluating at
// B(1 +- 1e-6) and averaging whenever |1 - I_p Omega B| < 1e-8.
double j2(double omega, double b_eta, double theta, double i_peak, double sigma_eps2);

// Exact closed-form ESRs (bits/s/Hz).
EsrBreakdown esr_strong(const SystemConfig& cfg);
EsrBreakdown esr_weak(const SystemConfig& cfg);
double essr(const SystemConfig& cfg);

// Large-I_p limit. Independent of i_peak, the PR count and the PR distances
// by construction (they never enter the expressions).
struct AsymptoticEsr {
    double strong;
    double weak;
    double sum() const { return strong + weak; }
};
AsymptoticEsr esr_asymptotic(const SystemConfig& cfg);
double essr_asymptotic(const SystemConfig& cfg);

} // namespace nomasec
