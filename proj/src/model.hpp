#pragma once

#include <array>
#include <span>
#include <vector>

namespace nomasec {

// Full scenario description. Everything is linear and noise-normalized
// (AWGN power = 1); dB conversion is a CLI-boundary concern.
struct SystemConfig {
    std::vector<double> pr_distances{200.0, 205.0, 210.0, 215.0}; // d_m [m]
    double d_near = 30.0;   // [m]
    double d_far = 100.0;   // [m]
    double d_eve = 150.0;   // [m]
    double alpha = 2.0;     // path-loss exponent
    double sigma_eps2 = 2e-5; // estimation-error variance (linear)
    double p_max = 1e5;     // max ST transmit power (linear)
    double i_peak = 10.0;   // peak tolerable interference (linear)
    double a_s = 0.2;       // strong-user power fraction, in (0, 0.5)

    int pr_count() const { return static_cast<int>(pr_distances.size()); }
    double a_w() const { return 1.0 - a_s; }

    // Throws ModelError naming the offending field or link.
    void validate() const;
};

// Derived statistics in the Theorem-1 notation.
struct ChannelStats {
    double omega_near, omega_far, omega_eve;      // Omega_i = d_i^-alpha
    std::vector<double> omega_pr;
    double omega_t_near, omega_t_far, omega_t_eve; // tilde Omega_i = Omega_i - sigma^2
    std::vector<double> omega_t_pr;
    std::array<double, 3> xi;   // Xi_1 = ot_near, Xi_2 = (ot_near^-1 + ot_far^-1)^-1, Xi_3 = ot_far
    std::array<double, 3> xi_e; // Xi_{l,e} = (Xi_l^-1 + ot_eve^-1)^-1
    double theta;               // I_p / P_max
};

ChannelStats derive_stats(const SystemConfig& cfg);

// Signed exponential expansion of the max primary-link gain:
//   f(x) = -sum_eta kappa_eta * B_eta * exp(-B_eta x)
// over all nonzero binary vectors eta of length M.
struct PhiTerm {
    double kappa; // product of (-1)^eta_m; +-1 per term, summed when grouped
    double b;     // sum of eta_m / ot_m
};

struct PhiExpansion {
    // All 2^M - 1 terms, lexicographic in eta (eta_1 most significant).
    std::vector<PhiTerm> terms;
    // Terms with bit-identical b merged (kappa summed), ascending b. Same sums,
    // far fewer terms when PR distances repeat.
    std::vector<PhiTerm> grouped;
};

// M = omega_tilde_pr.size() must be in [1, 20]; 2^M - 1 terms are materialized.
PhiExpansion phi_expansion(std::span<const double> omega_tilde_pr);

// Coefficient families of the distribution expansions. The check-e pair is
// fixed by the same sigma^2-shift transformation that produces c_hat_e.
struct CoefficientSet {
    std::array<double, 3> a_hat;     // (-1)^{l+1}/(a_s Xi_l) exp(sigma^2/(a_s Xi_l))
    std::array<double, 3> a_hat_cal; // a_s Xi_l a_hat_l
    double a_check;                  // (1/Xi_2) exp(sigma^2/Xi_2)
    double a_check_cal;              // Xi_2 a_check
    double c_hat_e;                  // (1/(a_s ot_e)) exp(sigma^2/(a_s ot_e))
    double c_hat_scr_e;              // a_s ot_e c_hat_e
    double c_check_e;                // (1/ot_e) exp(sigma^2/ot_e)
    double c_check_scr_e;            // ot_e c_check_e
};

CoefficientSet coefficient_set(const ChannelStats& stats, double a_s, double sigma_eps2);

} // namespace nomasec
