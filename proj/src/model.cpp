#include "model.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nomasec {

namespace {

double path_gain(double distance, double alpha)
{
    return std::pow(distance, -alpha);
}

void check_link(double omega, double sigma_eps2, const std::string& link)
{
    if (omega <= sigma_eps2)
        throw ModelError("model invalid: link '" + link + "' has Omega = " +
                         std::to_string(omega) + " <= sigma_eps2 = " + std::to_string(sigma_eps2) +
                         " (effective variance would be non-positive)");
}

} // namespace

void SystemConfig::validate() const
{
    if (pr_distances.empty())
        throw ModelError("config invalid: need at least one primary receiver (m_prs >= 1)");
    if (pr_count() > 20)
        throw ModelError("config invalid: m_prs = " + std::to_string(pr_count()) +
                         " exceeds the supported maximum of 20 (2^M - 1 expansion terms)");
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ModelError(std::string("config invalid: ") + name + " must be > 0, got " +
                             std::to_string(v));
    };
    positive(d_near, "d_near");
    positive(d_far, "d_far");
    positive(d_eve, "d_eve");
    for (std::size_t m = 0; m < pr_distances.size(); ++m) {
        if (!(pr_distances[m] > 0.0) || !std::isfinite(pr_distances[m]))
            throw ModelError("config invalid: d_pr[" + std::to_string(m) + "] must be > 0, got " +
                             std::to_string(pr_distances[m]));
    }
    positive(alpha, "alpha");
    positive(p_max, "p_max");
    positive(i_peak, "i_peak");
    if (!(sigma_eps2 >= 0.0) || !std::isfinite(sigma_eps2))
        throw ModelError("config invalid: sigma_eps2 must be >= 0, got " + std::to_string(sigma_eps2));
    if (!(a_s > 0.0 && a_s < 0.5))
        throw ModelError("config invalid: a_s must lie in (0, 0.5) so that a_s < a_w, got " +
                         std::to_string(a_s));

    check_link(path_gain(d_near, alpha), sigma_eps2, "near");
    check_link(path_gain(d_far, alpha), sigma_eps2, "far");
    check_link(path_gain(d_eve, alpha), sigma_eps2, "eve");
    for (std::size_t m = 0; m < pr_distances.size(); ++m)
        check_link(path_gain(pr_distances[m], alpha), sigma_eps2, "pr[" + std::to_string(m) + "]");
}

ChannelStats derive_stats(const SystemConfig& cfg)
{
    cfg.validate();

    ChannelStats s;
    s.omega_near = path_gain(cfg.d_near, cfg.alpha);
    s.omega_far = path_gain(cfg.d_far, cfg.alpha);
    s.omega_eve = path_gain(cfg.d_eve, cfg.alpha);
    s.omega_t_near = s.omega_near - cfg.sigma_eps2;
    s.omega_t_far = s.omega_far - cfg.sigma_eps2;
    s.omega_t_eve = s.omega_eve - cfg.sigma_eps2;
    s.omega_pr.reserve(cfg.pr_distances.size());
    s.omega_t_pr.reserve(cfg.pr_distances.size());
    for (double d : cfg.pr_distances) {
        const double om = path_gain(d, cfg.alpha);
        s.omega_pr.push_back(om);
        s.omega_t_pr.push_back(om - cfg.sigma_eps2);
    }

    const double harmonic = 1.0 / (1.0 / s.omega_t_near + 1.0 / s.omega_t_far);
    s.xi = {s.omega_t_near, harmonic, s.omega_t_far};
    for (int l = 0; l < 3; ++l)
        s.xi_e[l] = 1.0 / (1.0 / s.xi[l] + 1.0 / s.omega_t_eve);
    s.theta = cfg.i_peak / cfg.p_max;
    return s;
}

PhiExpansion phi_expansion(std::span<const double> omega_tilde_pr)
{
    const int m_prs = static_cast<int>(omega_tilde_pr.size());
    if (m_prs < 1)
        throw ModelError("phi_expansion: need at least one primary receiver");
    if (m_prs > 20)
        throw ModelError("phi_expansion: M = " + std::to_string(m_prs) +
                         " exceeds the supported maximum of 20");
    for (double ot : omega_tilde_pr)
        if (!(ot > 0.0))
            throw ModelError("phi_expansion: all effective variances must be > 0");

    PhiExpansion phi;
    const std::uint64_t count = (std::uint64_t{1} << m_prs) - 1;
    phi.terms.reserve(count);
    // Lexicographic over eta = [eta_1 ... eta_M] with eta_1 most significant.
    for (std::uint64_t mask = 1; mask <= count; ++mask) {
        double b = 0.0;
        int ones = 0;
        for (int j = 0; j < m_prs; ++j) {
            if (mask & (std::uint64_t{1} << (m_prs - 1 - j))) {
                b += 1.0 / omega_tilde_pr[j];
                ++ones;
            }
        }
        phi.terms.push_back({(ones % 2 == 0) ? 1.0 : -1.0, b});
    }

    phi.grouped = phi.terms;
    std::sort(phi.grouped.begin(), phi.grouped.end(),
              [](const PhiTerm& l, const PhiTerm& r) { return l.b < r.b; });
    std::vector<PhiTerm> merged;
    for (const PhiTerm& t : phi.grouped) {
        if (!merged.empty() && merged.back().b == t.b)
            merged.back().kappa += t.kappa;
        else
            merged.push_back(t);
    }
    std::erase_if(merged, [](const PhiTerm& t) { return t.kappa == 0.0; });
    phi.grouped = std::move(merged);
    return phi;
}

CoefficientSet coefficient_set(const ChannelStats& stats, double a_s, double sigma_eps2)
{
    if (!(a_s > 0.0 && a_s < 0.5))
        throw ModelError("coefficient_set: a_s must lie in (0, 0.5)");

    CoefficientSet c;
    for (int l = 0; l < 3; ++l) {
        const double sign = (l % 2 == 0) ? 1.0 : -1.0; // (-1)^{l+1}, 1-based l
        const double scale = a_s * stats.xi[l];
        c.a_hat[l] = sign / scale * std::exp(sigma_eps2 / scale);
        c.a_hat_cal[l] = scale * c.a_hat[l];
    }
    c.a_check = 1.0 / stats.xi[1] * std::exp(sigma_eps2 / stats.xi[1]);
    c.a_check_cal = stats.xi[1] * c.a_check;
    const double se = a_s * stats.omega_t_eve;
    c.c_hat_e = 1.0 / se * std::exp(sigma_eps2 / se);
    c.c_hat_scr_e = se * c.c_hat_e;
    c.c_check_e = 1.0 / stats.omega_t_eve * std::exp(sigma_eps2 / stats.omega_t_eve);
    c.c_check_scr_e = stats.omega_t_eve * c.c_check_e;
    return c;
}

} // namespace nomasec
