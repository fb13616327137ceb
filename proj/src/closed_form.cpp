#include "closed_form.hpp"

#include "errors.hpp"
#include "special_fn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nomasec {

namespace {

constexpr double kLog2E = 1.4426950408889634073599246810019;
// exp() underflows to 0 below roughly -745; skip the bracket entirely there.
constexpr double kExpUnderflow = -745.0;
// Relative distance from the removable J2 singularity at which we switch to
// symmetric perturbation averaging.
constexpr double kSingularWindow = 1e-8;
constexpr double kSingularNudge = 1e-6;

void require_positive(double v, const char* name)
{
    if (!std::isfinite(v) || v <= 0.0)
        throw std::domain_error(std::string(name) + " must be finite and > 0, got " +
                                std::to_string(v));
}

void require_nonnegative(double v, const char* name)
{
    if (!std::isfinite(v) || v < 0.0)
        throw std::domain_error(std::string(name) + " must be finite and >= 0, got " +
                                std::to_string(v));
}

// Shifted kernels: jt1(Omega) = e^{+s2/Omega} J1(Omega) and likewise for J2.
// Every closed-form product pairs a coefficient carrying e^{+s2/scale} with a
// kernel carrying e^{-s2/scale}; cancelling the pair analytically keeps all
// intermediate values bounded (the raw coefficients overflow for small
// a_s * Xi, e.g. near the allocation bracket edge).
double j1_shifted(double omega, double p_max, double sigma_eps2)
{
    const double u = (1.0 / p_max + sigma_eps2) / omega;
    return std::log1p(sigma_eps2 * p_max) + special_fn::e1_scaled(u);
}

double j2_shifted(double omega, double b_eta, double theta, double i_peak, double sigma_eps2)
{
    if (std::fabs(1.0 - i_peak * omega * b_eta) < kSingularWindow) {
        return 0.5 * (j2_shifted(omega, b_eta * (1.0 + kSingularNudge), theta, i_peak, sigma_eps2) +
                      j2_shifted(omega, b_eta * (1.0 - kSingularNudge), theta, i_peak, sigma_eps2));
    }
    const double bt = b_eta * theta;
    if (-bt < kExpUnderflow)
        return 0.0;
    const double beta = 1.0 / (i_peak * omega);
    const double c = i_peak * sigma_eps2; // I_p sigma^2; note beta * c = sigma^2 / Omega
    const double ratio = 1.0 / (b_eta - beta);
    const double bracket = std::log1p(c / theta) - special_fn::e1_scaled(bt) +
                           b_eta * ratio * special_fn::e1_scaled(beta * (theta + c)) -
                           beta * ratio * special_fn::e1_scaled(b_eta * (theta + c));
    return std::exp(-bt) * bracket;
}

struct Prepared {
    ChannelStats stats;
    PhiExpansion phi;
    double a_s;
    double sigma_eps2;
    double p_max;
    double i_peak;
    double theta;
    // sum_eta kappa_eta {1 - e^{-B_eta Theta}}; shared by the region-1 terms.
    double phi_bracket;
};

Prepared prepare(const SystemConfig& cfg)
{
    Prepared p{derive_stats(cfg), {}, cfg.a_s, cfg.sigma_eps2, cfg.p_max, cfg.i_peak, 0.0, 0.0};
    p.theta = p.stats.theta;
    p.phi = phi_expansion(p.stats.omega_t_pr);
    double bracket = 0.0;
    for (const PhiTerm& t : p.phi.grouped) {
        const double bt = t.b * p.theta;
        bracket += t.kappa * (1.0 - ((-bt > kExpUnderflow) ? std::exp(-bt) : 0.0));
    }
    p.phi_bracket = bracket;
    return p;
}

EsrBreakdown finalize(double i1, double i2, double i3, double i4, const char* what)
{
    EsrBreakdown out;
    out.components = {i1, i2, i3, i4};
    double total = i1 + i2 - i3 - i4;
    if (total < 0.0) {
        if (total < -1e-9)
            throw InternalError(std::string(what) + ": total " + std::to_string(total) +
                                " is below -1e-9; the ESR is provably nonnegative");
        total = 0.0;
        out.clamped = true;
    }
    out.total = total;
    if (!std::isfinite(total))
        throw InternalError(std::string(what) + ": non-finite total");
    return out;
}

} // namespace

double j1(double omega, double p_max, double sigma_eps2)
{
    require_positive(omega, "j1: omega");
    require_positive(p_max, "j1: p_max");
    require_nonnegative(sigma_eps2, "j1: sigma_eps2");
    const double shift = -sigma_eps2 / omega;
    if (shift < kExpUnderflow)
        return 0.0;
    return std::exp(shift) * j1_shifted(omega, p_max, sigma_eps2);
}

double j2(double omega, double b_eta, double theta, double i_peak, double sigma_eps2)
{
    require_positive(omega, "j2: omega");
    require_positive(b_eta, "j2: b_eta");
    require_positive(theta, "j2: theta");
    require_positive(i_peak, "j2: i_peak");
    require_nonnegative(sigma_eps2, "j2: sigma_eps2");
    const double shift = -sigma_eps2 / omega;
    if (shift < kExpUnderflow)
        return 0.0;
    return std::exp(shift) * j2_shifted(omega, b_eta, theta, i_peak, sigma_eps2);
}

EsrBreakdown esr_strong(const SystemConfig& cfg)
{
    const Prepared p = prepare(cfg);
    const double a_s = p.a_s;
    const auto& xi = p.stats.xi;
    const auto& xi_e = p.stats.xi_e;
    const double ot_e = p.stats.omega_t_eve;

    // Coefficient-times-kernel products with the exp(sigma^2/scale) factors
    // cancelled analytically:
    //   A_hat_l Xi_l J1(a_s Xi_l)              = sgn_l / a_s * jt1(a_s Xi_l)
    //   A_hat_l Cscr_e Xi_le J1(a_s Xi_le)     = sgn_l Xi_le / (a_s Xi_l) * jt1(a_s Xi_le)
    //   C_hat_e Acal_l Xi_le J1(a_s Xi_le)     = sgn_l Xi_le / (a_s ot_e) * jt1(a_s Xi_le)
    // (Xi_le^-1 = Xi_l^-1 + ot_e^-1 makes the exponent sums telescope.)
    auto jt1 = [&](double om) { return j1_shifted(om, p.p_max, p.sigma_eps2); };
    auto jt2 = [&](double om, double b) {
        return j2_shifted(om, b, p.theta, p.i_peak, p.sigma_eps2);
    };

    double sum1 = 0.0, sum3 = 0.0, i2 = 0.0, i4 = 0.0;
    for (int l = 0; l < 3; ++l) {
        const double sgn = (l % 2 == 0) ? 1.0 : -1.0;
        const double jt1_xi = jt1(a_s * xi[l]);
        const double jt1_xie = jt1(a_s * xi_e[l]);
        sum1 += sgn / a_s * (jt1_xi - xi_e[l] / xi[l] * jt1_xie);
        sum3 += sgn * xi_e[l] / (a_s * ot_e) * jt1_xie;
        double acc2 = 0.0, acc4 = 0.0;
        for (const PhiTerm& t : p.phi.grouped) {
            const double jt2_xi = jt2(a_s * xi[l], t.b);
            const double jt2_xie = jt2(a_s * xi_e[l], t.b);
            acc2 += t.kappa * (jt2_xi - xi_e[l] / xi[l] * jt2_xie);
            acc4 += t.kappa * jt2_xie;
        }
        i2 += sgn / a_s * acc2;
        i4 += sgn * xi_e[l] / (a_s * ot_e) * acc4;
    }

    const double i1 = -kLog2E * a_s * sum1 * p.phi_bracket;
    const double i3 = -kLog2E * a_s * sum3 * p.phi_bracket;
    i2 *= -kLog2E * a_s;
    i4 *= -kLog2E * a_s;
    return finalize(i1, i2, i3, i4, "esr_strong");
}

EsrBreakdown esr_weak(const SystemConfig& cfg)
{
    const Prepared p = prepare(cfg);
    const double a_s = p.a_s;
    const double x2 = p.stats.xi[1];
    const double x2e = p.stats.xi_e[1];
    const double ot_e = p.stats.omega_t_eve;

    auto jt1 = [&](double om) { return j1_shifted(om, p.p_max, p.sigma_eps2); };
    auto jt2 = [&](double om, double b) {
        return j2_shifted(om, b, p.theta, p.i_peak, p.sigma_eps2);
    };

    // Check-family terms keep the (Xi_2, Xi_2e) scales, hat-family terms the
    // (a_s Xi_2, a_s Xi_2e) scales; A_hat_2 carries sign -1.
    const double w1 = jt1(x2) - x2e / x2 * jt1(x2e) - jt1(a_s * x2) + x2e / x2 * jt1(a_s * x2e);
    const double w3 = x2e / ot_e * (jt1(x2e) - jt1(a_s * x2e));
    const double i1 = -kLog2E * p.phi_bracket * w1;
    const double i3 = -kLog2E * p.phi_bracket * w3;

    double i2 = 0.0, i4 = 0.0;
    for (const PhiTerm& t : p.phi.grouped) {
        i2 += t.kappa * (jt2(x2, t.b) - x2e / x2 * jt2(x2e, t.b) - jt2(a_s * x2, t.b) +
                         x2e / x2 * jt2(a_s * x2e, t.b));
        i4 += t.kappa * x2e / ot_e * (jt2(x2e, t.b) - jt2(a_s * x2e, t.b));
    }
    i2 *= -kLog2E;
    i4 *= -kLog2E;
    return finalize(i1, i2, i3, i4, "esr_weak");
}

double essr(const SystemConfig& cfg)
{
    return esr_strong(cfg).total + esr_weak(cfg).total;
}

AsymptoticEsr esr_asymptotic(const SystemConfig& cfg)
{
    const ChannelStats stats = derive_stats(cfg);
    const double a_s = cfg.a_s;
    const auto& xi = stats.xi;
    const auto& xi_e = stats.xi_e;
    const double ot_e = stats.omega_t_eve;
    auto jt1 = [&](double om) { return j1_shifted(om, cfg.p_max, cfg.sigma_eps2); };

    double strong = 0.0;
    for (int l = 0; l < 3; ++l) {
        const double sgn = (l % 2 == 0) ? 1.0 : -1.0;
        const double jt1_xie = jt1(a_s * xi_e[l]);
        strong += sgn * (jt1(a_s * xi[l]) / a_s - xi_e[l] / (a_s * xi[l]) * jt1_xie -
                         xi_e[l] / (a_s * ot_e) * jt1_xie);
    }
    strong *= kLog2E * a_s;

    const double x2 = xi[1];
    const double x2e = xi_e[1];
    double weak = jt1(x2) - x2e / x2 * jt1(x2e) - jt1(a_s * x2) + x2e / x2 * jt1(a_s * x2e) -
                  x2e / ot_e * jt1(x2e) + x2e / ot_e * jt1(a_s * x2e);
    weak *= kLog2E;

    return {strong, weak};
}

double essr_asymptotic(const SystemConfig& cfg)
{
    return esr_asymptotic(cfg).sum();
}

} // namespace nomasec
