#include "nomasec.h"

#include "closed_form.hpp"
#include "errors.hpp"
#include "mc_oracle.hpp"
#include "model.hpp"
#include "power_alloc.hpp"
#include "quad_oracle.hpp"

#include <new>
#include <stdexcept>
#include <string>

struct noma_config {
    nomasec::SystemConfig cfg;
};

namespace {

thread_local std::string g_last_error;

noma_status fail(noma_status code, const char* what)
{
    g_last_error = what;
    return code;
}

template <class Fn>
noma_status guarded(Fn&& fn)
{
    try {
        fn();
        return NOMA_OK;
    } catch (const nomasec::ModelError& e) {
        return fail(NOMA_ERR_MODEL, e.what());
    } catch (const nomasec::ConvergenceError& e) {
        return fail(NOMA_ERR_CONVERGENCE, e.what());
    } catch (const nomasec::NonMonotoneError& e) {
        return fail(NOMA_ERR_NON_MONOTONE, e.what());
    } catch (const std::domain_error& e) {
        return fail(NOMA_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(NOMA_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(NOMA_ERR_INTERNAL, e.what());
    }
}

noma_status require(bool ok, const char* what)
{
    return ok ? NOMA_OK : fail(NOMA_ERR_INVALID_ARGUMENT, what);
}

noma_esr_breakdown to_c(const nomasec::EsrBreakdown& b)
{
    noma_esr_breakdown out;
    out.total = b.total;
    for (int i = 0; i < 4; ++i)
        out.components[i] = b.components[i];
    out.clamped = b.clamped ? 1 : 0;
    return out;
}

} // namespace

extern "C" {

const char* noma_version(void)
{
    return "1.0.0";
}

const char* noma_status_name(noma_status status)
{
    switch (status) {
    case NOMA_OK: return "ok";
    case NOMA_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case NOMA_ERR_MODEL: return "model-invalid";
    case NOMA_ERR_CONVERGENCE: return "convergence-failure";
    case NOMA_ERR_NON_MONOTONE: return "non-monotone";
    case NOMA_ERR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

const char* noma_last_error(void)
{
    return g_last_error.c_str();
}

noma_config* noma_config_create(void)
{
    return new (std::nothrow) noma_config{};
}

noma_config* noma_config_clone(const noma_config* cfg)
{
    if (cfg == nullptr)
        return nullptr;
    return new (std::nothrow) noma_config{*cfg};
}

void noma_config_destroy(noma_config* cfg)
{
    delete cfg;
}

noma_status noma_config_set_user_distances(noma_config* cfg, double d_near, double d_far)
{
    if (auto st = require(cfg != nullptr, "null config"); st != NOMA_OK)
        return st;
    cfg->cfg.d_near = d_near;
    cfg->cfg.d_far = d_far;
    return NOMA_OK;
}

noma_status noma_config_set_eve_distance(noma_config* cfg, double d_eve)
{
    if (auto st = require(cfg != nullptr, "null config"); st != NOMA_OK)
        return st;
    cfg->cfg.d_eve = d_eve;
    return NOMA_OK;
}

noma_status noma_config_set_pr_distances(noma_config* cfg, const double* d, size_t count)
{
    if (auto st = require(cfg != nullptr && (d != nullptr || count == 0),
                          "null config or distance array");
        st != NOMA_OK)
        return st;
    cfg->cfg.pr_distances.assign(d, d + count);
    return NOMA_OK;
}

noma_status noma_config_set_alpha(noma_config* cfg, double alpha)
{
    if (auto st = require(cfg != nullptr, "null config"); st != NOMA_OK)
        return st;
    cfg->cfg.alpha = alpha;
    return NOMA_OK;
}

noma_status noma_config_set_sigma_eps2(noma_config* cfg, double sigma_eps2)
{
    if (auto st = require(cfg != nullptr, "null config"); st != NOMA_OK)
        return st;
    cfg->cfg.sigma_eps2 = sigma_eps2;
    return NOMA_OK;
}

noma_status noma_config_set_p_max(noma_config* cfg, double p_max_linear)
{
    if (auto st = require(cfg != nullptr, "null config"); st != NOMA_OK)
        return st;
    cfg->cfg.p_max = p_max_linear;
    return NOMA_OK;
}

noma_status noma_config_set_i_peak(noma_config* cfg, double i_peak_linear)
{
    if (auto st = require(cfg != nullptr, "null config"); st != NOMA_OK)
        return st;
    cfg->cfg.i_peak = i_peak_linear;
    return NOMA_OK;
}

noma_status noma_config_set_power_split(noma_config* cfg, double a_s)
{
    if (auto st = require(cfg != nullptr, "null config"); st != NOMA_OK)
        return st;
    cfg->cfg.a_s = a_s;
    return NOMA_OK;
}

double noma_config_d_near(const noma_config* cfg) { return cfg ? cfg->cfg.d_near : 0.0; }
double noma_config_d_far(const noma_config* cfg) { return cfg ? cfg->cfg.d_far : 0.0; }
double noma_config_d_eve(const noma_config* cfg) { return cfg ? cfg->cfg.d_eve : 0.0; }

size_t noma_config_pr_count(const noma_config* cfg)
{
    return cfg ? cfg->cfg.pr_distances.size() : 0;
}

double noma_config_pr_distance(const noma_config* cfg, size_t index)
{
    if (cfg == nullptr || index >= cfg->cfg.pr_distances.size())
        return 0.0;
    return cfg->cfg.pr_distances[index];
}

double noma_config_alpha(const noma_config* cfg) { return cfg ? cfg->cfg.alpha : 0.0; }
double noma_config_sigma_eps2(const noma_config* cfg) { return cfg ? cfg->cfg.sigma_eps2 : 0.0; }
double noma_config_p_max(const noma_config* cfg) { return cfg ? cfg->cfg.p_max : 0.0; }
double noma_config_i_peak(const noma_config* cfg) { return cfg ? cfg->cfg.i_peak : 0.0; }
double noma_config_power_split(const noma_config* cfg) { return cfg ? cfg->cfg.a_s : 0.0; }

noma_status noma_config_validate(const noma_config* cfg)
{
    if (auto st = require(cfg != nullptr, "null config"); st != NOMA_OK)
        return st;
    return guarded([&] { cfg->cfg.validate(); });
}

noma_status noma_esr_strong(const noma_config* cfg, noma_esr_breakdown* out)
{
    if (auto st = require(cfg != nullptr && out != nullptr, "null argument"); st != NOMA_OK)
        return st;
    return guarded([&] { *out = to_c(nomasec::esr_strong(cfg->cfg)); });
}

noma_status noma_esr_weak(const noma_config* cfg, noma_esr_breakdown* out)
{
    if (auto st = require(cfg != nullptr && out != nullptr, "null argument"); st != NOMA_OK)
        return st;
    return guarded([&] { *out = to_c(nomasec::esr_weak(cfg->cfg)); });
}

noma_status noma_essr(const noma_config* cfg, double* out)
{
    if (auto st = require(cfg != nullptr && out != nullptr, "null argument"); st != NOMA_OK)
        return st;
    return guarded([&] { *out = nomasec::essr(cfg->cfg); });
}

noma_status noma_essr_asymptotic(const noma_config* cfg, double* out)
{
    if (auto st = require(cfg != nullptr && out != nullptr, "null argument"); st != NOMA_OK)
        return st;
    return guarded([&] { *out = nomasec::essr_asymptotic(cfg->cfg); });
}

noma_status noma_esr_asymptotic_split(const noma_config* cfg, double* strong, double* weak)
{
    if (auto st = require(cfg != nullptr && strong != nullptr && weak != nullptr, "null argument");
        st != NOMA_OK)
        return st;
    return guarded([&] {
        const auto split = nomasec::esr_asymptotic(cfg->cfg);
        *strong = split.strong;
        *weak = split.weak;
    });
}

noma_status noma_mc_esr(const noma_config* cfg, noma_rate_mode mode, uint64_t n, uint64_t seed,
                        int threads, int oma_estimation_noise, noma_mc_estimate* out)
{
    if (auto st = require(cfg != nullptr && out != nullptr, "null argument"); st != NOMA_OK)
        return st;
    if (auto st = require(mode >= NOMA_RATE_NOMA_STRONG && mode <= NOMA_RATE_OMA_WEAK,
                          "bad rate mode");
        st != NOMA_OK)
        return st;
    return guarded([&] {
        nomasec::McOptions opt;
        opt.threads = threads;
        opt.oma_estimation_noise = oma_estimation_noise != 0;
        const auto est = nomasec::mc_esr(cfg->cfg, static_cast<nomasec::RateMode>(mode), n, seed, opt);
        *out = {est.mean, est.std_err, est.n};
    });
}

noma_status noma_quad_esr_strong(const noma_config* cfg, double rel_tol, double* out)
{
    if (auto st = require(cfg != nullptr && out != nullptr, "null argument"); st != NOMA_OK)
        return st;
    return guarded([&] { *out = nomasec::quad_esr_strong(cfg->cfg, rel_tol); });
}

noma_status noma_quad_esr_weak(const noma_config* cfg, double rel_tol, double* out)
{
    if (auto st = require(cfg != nullptr && out != nullptr, "null argument"); st != NOMA_OK)
        return st;
    return guarded([&] { *out = nomasec::quad_esr_weak(cfg->cfg, rel_tol); });
}

noma_status noma_quad_oma_esr(const noma_config* cfg, noma_user user, double rel_tol,
                              int estimation_noise, double* out)
{
    if (auto st = require(cfg != nullptr && out != nullptr, "null argument"); st != NOMA_OK)
        return st;
    if (auto st = require(user == NOMA_USER_STRONG || user == NOMA_USER_WEAK, "bad user");
        st != NOMA_OK)
        return st;
    return guarded([&] {
        *out = nomasec::quad_oma_esr(cfg->cfg,
                                     user == NOMA_USER_STRONG ? nomasec::User::Strong
                                                              : nomasec::User::Weak,
                                     rel_tol, estimation_noise != 0);
    });
}

noma_status noma_match_strong_user(const noma_config* cfg, double tol, int max_iter,
                                   double oma_rel_tol, int oma_estimation_noise,
                                   noma_allocation_result* out)
{
    if (auto st = require(cfg != nullptr && out != nullptr, "null argument"); st != NOMA_OK)
        return st;
    return guarded([&] {
        const auto r = nomasec::match_strong_user(cfg->cfg, tol, max_iter, oma_rel_tol,
                                                  oma_estimation_noise != 0);
        out->a_s = r.a_s;
        out->a_w = r.a_w;
        out->achieved_gap = r.achieved_gap;
        out->iterations = r.iterations;
        out->status = static_cast<noma_alloc_status>(r.status);
        out->oma_target = r.oma_target;
    });
}

} // extern "C"
