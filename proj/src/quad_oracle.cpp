#include "quad_oracle.hpp"

#include "errors.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace nomasec {

namespace {

constexpr double kLog2E = 1.4426950408889634073599246810019;
// Exponential envelopes are truncated 40 decay constants out (e^-40 < 1e-17).
constexpr double kTailFolds = 40.0;

void check_rel_tol(double rel_tol)
{
    if (!(rel_tol >= 1e-10 && rel_tol <= 1e-4))
        throw ModelError("quadrature oracle: rel_tol must lie in [1e-10, 1e-4], got " +
                         std::to_string(rel_tol));
}

// Density of the max of the M primary-link gains, product form:
//   f_p(y) = sum_m (1/ot_m) e^{-y/ot_m} prod_{j != m} (1 - e^{-y/ot_j}).
double max_gain_pdf(const std::vector<double>& ot, double y)
{
    double total = 0.0;
    for (std::size_t m = 0; m < ot.size(); ++m) {
        double term = std::exp(-y / ot[m]) / ot[m];
        for (std::size_t j = 0; j < ot.size(); ++j)
            if (j != m)
                term *= -std::expm1(-y / ot[j]);
        total += term;
    }
    return total;
}

// Upper bound on P(g_p > y); used only to decide whether the y > Theta region
// can contribute at all.
double max_gain_ccdf_bound(const std::vector<double>& ot, double y)
{
    double total = 0.0;
    for (double o : ot)
        total += std::exp(-y / o);
    return total;
}

// Signed x-integrand bracket [f_k * F_e - f_e * ccdf_k](x) for one user, with
// the distribution support starting at `support`. Both regimes share it.
struct EsrIntegrand {
    std::function<double(double)> bracket; // in the shifted variable t = x - support
    double support;
    double x_scale; // slowest decay constant of the bracket envelope
};

EsrIntegrand strong_noma_integrand(const ChannelStats& s, double a_s, double sigma_eps2)
{
    const double a = s.omega_t_near;
    const double b = s.omega_t_far;
    const double e = s.omega_t_eve;
    auto bracket = [a, b, e, a_s](double t) {
        const double u = t / a_s; // back to the unscaled max-gain variable
        const double qa = std::exp(-u / a);
        const double qb = std::exp(-u / b);
        const double f_max = (qa * (1.0 - qb) / a + qb * (1.0 - qa) / b) / a_s;
        const double partial_cdf_e = -std::expm1(-u / e);
        const double f_e = std::exp(-u / e) / (a_s * e);
        const double ccdf_max = 1.0 - (1.0 - qa) * (1.0 - qb);
        return f_max * partial_cdf_e - f_e * ccdf_max;
    };
    return {bracket, sigma_eps2, a_s * std::max({a, b, e})};
}

EsrIntegrand weak_noma_integrand(const ChannelStats& s, double a_s, double sigma_eps2)
{
    // Term-for-term mirror of the printed check/hat mixture families.
    const double x2 = s.xi[1];
    const double e = s.omega_t_eve;
    auto bracket = [x2, e, a_s](double t) {
        const double f_cw = std::exp(-t / x2) / x2;
        const double pcdf_ce = -std::expm1(-t / e);
        const double f_hw = std::exp(-t / (a_s * x2)) / (a_s * x2);
        const double pcdf_he = -std::expm1(-t / (a_s * e));
        const double f_ce = std::exp(-t / e) / e;
        const double ccdf_cw = std::exp(-t / x2);
        const double f_he = std::exp(-t / (a_s * e)) / (a_s * e);
        const double ccdf_hw = std::exp(-t / (a_s * x2));
        return (f_cw * pcdf_ce - f_hw * pcdf_he) - (f_ce * ccdf_cw - f_he * ccdf_hw);
    };
    return {bracket, sigma_eps2, std::max(x2, e)};
}

EsrIntegrand oma_integrand(const ChannelStats& s, User user, double support)
{
    const double a = s.omega_t_near;
    const double b = s.omega_t_far;
    const double e = s.omega_t_eve;
    const double x2 = s.xi[1];
    std::function<double(double)> bracket;
    if (user == User::Strong) {
        bracket = [a, b, e](double t) {
            const double qa = std::exp(-t / a);
            const double qb = std::exp(-t / b);
            const double f_k = qa * (1.0 - qb) / a + qb * (1.0 - qa) / b;
            const double ccdf_k = 1.0 - (1.0 - qa) * (1.0 - qb);
            const double cdf_e = -std::expm1(-t / e);
            const double f_e = std::exp(-t / e) / e;
            // 0.5: each OMA user occupies half the resource block
            return 0.5 * (f_k * cdf_e - f_e * ccdf_k);
        };
    } else {
        bracket = [x2, e](double t) {
            const double f_k = std::exp(-t / x2) / x2;
            const double ccdf_k = std::exp(-t / x2);
            const double cdf_e = -std::expm1(-t / e);
            const double f_e = std::exp(-t / e) / e;
            return 0.5 * (f_k * cdf_e - f_e * ccdf_k);
        };
    }
    return {std::move(bracket), support, std::max({a, b, e})};
}

double evaluate(const SystemConfig& cfg, const EsrIntegrand& in, double rel_tol)
{
    const ChannelStats stats = derive_stats(cfg);
    const auto& ot_pr = stats.omega_t_pr;
    const double theta = stats.theta;
    const double x_hi = kTailFolds * in.x_scale; // in t = x - support

    // Region y in (0, Theta): P = P_max, so the x-integral factors out.
    QuadOptions x_opt{rel_tol / 3.0, 1e-14, 3000};
    const double x1 = integrate(
        [&](double t) {
            return kLog2E * std::log1p(cfg.p_max * (t + in.support)) * in.bracket(t);
        },
        0.0, x_hi, x_opt);

    double ot_pr_max = 0.0;
    for (double o : ot_pr)
        ot_pr_max = std::max(ot_pr_max, o);
    const double y_tail = kTailFolds * ot_pr_max;

    QuadOptions w_opt{rel_tol / 3.0, 1e-16, 3000};
    const double w1 =
        integrate([&](double y) { return max_gain_pdf(ot_pr, y); }, 0.0, std::min(theta, y_tail),
                  w_opt);
    const double region1 = w1 * x1;

    // Region y > Theta: P = I_p / y; genuinely nested.
    if (max_gain_ccdf_bound(ot_pr, theta) < 1e-16)
        return region1;

    QuadOptions inner_opt{std::max(1e-11, rel_tol * 1e-3), 1e-13 * (1.0 + std::fabs(x1)), 3000};
    auto inner = [&](double y) {
        return integrate(
            [&](double t) {
                return kLog2E * std::log1p((cfg.i_peak / y) * (t + in.support)) * in.bracket(t);
            },
            0.0, x_hi, inner_opt);
    };
    QuadOptions outer_opt{rel_tol / 2.0, std::max(1e-13, 0.25 * rel_tol * std::fabs(region1)),
                          3000};
    const double region2 = integrate(
        [&](double y) { return max_gain_pdf(ot_pr, y) * inner(y); }, theta, theta + y_tail,
        outer_opt);

    return region1 + region2;
}

} // namespace

double quad_esr_strong(const SystemConfig& cfg, double rel_tol)
{
    check_rel_tol(rel_tol);
    const ChannelStats stats = derive_stats(cfg);
    return evaluate(cfg, strong_noma_integrand(stats, cfg.a_s, cfg.sigma_eps2), rel_tol);
}

double quad_esr_weak(const SystemConfig& cfg, double rel_tol)
{
    check_rel_tol(rel_tol);
    const ChannelStats stats = derive_stats(cfg);
    return evaluate(cfg, weak_noma_integrand(stats, cfg.a_s, cfg.sigma_eps2), rel_tol);
}

double quad_oma_esr(const SystemConfig& cfg, User user, double rel_tol, bool estimation_noise)
{
    check_rel_tol(rel_tol);
    const ChannelStats stats = derive_stats(cfg);
    const double support = estimation_noise ? cfg.sigma_eps2 : 0.0;
    return evaluate(cfg, oma_integrand(stats, user, support), rel_tol);
}

} // namespace nomasec
