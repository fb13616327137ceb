#include "runner.hpp"

#include "config_file.hpp"
#include "nomasec.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

namespace cli {

namespace {

double db_to_linear(double x_db)
{
    return std::pow(10.0, x_db / 10.0);
}

// 6 significant digits everywhere in the CSV body.
std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

int status_exit_code(noma_status st)
{
    switch (st) {
    case NOMA_OK:
        return kExitOk;
    case NOMA_ERR_INVALID_ARGUMENT:
    case NOMA_ERR_MODEL:
        return kExitConfig;
    default:
        return kExitNumeric;
    }
}

void ensure(noma_status st, const std::string& context)
{
    if (st != NOMA_OK)
        throw CliError(status_exit_code(st), context + ": " + noma_last_error());
}

using ConfigHandle = std::unique_ptr<noma_config, decltype(&noma_config_destroy)>;

ConfigHandle build_handle(const ScenarioOpts& sc)
{
    ConfigHandle h(noma_config_create(), &noma_config_destroy);
    if (!h)
        throw CliError(kExitNumeric, "out of memory creating config");
    ensure(noma_config_set_user_distances(h.get(), sc.d_near, sc.d_far), "d_near/d_far");
    ensure(noma_config_set_eve_distance(h.get(), sc.d_eve), "d_eve");
    ensure(noma_config_set_pr_distances(h.get(), sc.d_pr.data(), sc.d_pr.size()), "d_pr");
    ensure(noma_config_set_alpha(h.get(), sc.alpha), "alpha");
    ensure(noma_config_set_sigma_eps2(h.get(), sc.sigma_eps2), "sigma_eps2");
    ensure(noma_config_set_p_max(h.get(), db_to_linear(sc.pmax_db)), "pmax_db");
    ensure(noma_config_set_i_peak(h.get(), db_to_linear(sc.ip_db)), "ip_db");
    // placeholder split keeps validation meaningful when allocation resolves it later
    ensure(noma_config_set_power_split(h.get(), sc.a_s.value_or(0.25)), "a_s");
    ensure(noma_config_validate(h.get()), "scenario validation");
    return h;
}

struct SplitResult {
    double a_s;
    std::string status; // fixed | converged | clamped_low | clamped_high
};

const char* alloc_status_name(noma_alloc_status st)
{
    switch (st) {
    case NOMA_ALLOC_CONVERGED:
        return "converged";
    case NOMA_ALLOC_CLAMPED_LOW:
        return "clamped_low";
    case NOMA_ALLOC_CLAMPED_HIGH:
        return "clamped_high";
    }
    return "unknown";
}

SplitResult resolve_split(const ConfigHandle& h, const ScenarioOpts& sc, const OracleOpts& oracle)
{
    if (sc.a_s) {
        ensure(noma_config_set_power_split(h.get(), *sc.a_s), "a_s");
        return {*sc.a_s, "fixed"};
    }
    noma_allocation_result r{};
    ensure(noma_match_strong_user(h.get(), 1e-6, 100, oracle.quad_tol,
                                  oracle.oma_estimation_noise ? 1 : 0, &r),
           "power allocation");
    ensure(noma_config_set_power_split(h.get(), r.a_s), "a_s");
    return {r.a_s, alloc_status_name(r.status)};
}

// ---------------------------------------------------------------------------
// scenario resolution: defaults <- preset <- config file <- flags

struct Resolved {
    ScenarioOpts scenario;
    OracleOpts oracle;
    std::optional<SweepOpts> sweep;
};

Resolved resolve(const FlagOverrides& flags)
{
    Resolved r;
    if (flags.preset && *flags.preset != "paper-defaults")
        throw CliError(kExitConfig, "unknown preset '" + *flags.preset +
                                        "' (available: paper-defaults)");
    // ScenarioOpts defaults already are the paper-defaults preset.

    if (flags.config_path) {
        ConfigFile file = ConfigFile::parse_file(*flags.config_path);
        auto load_double = [&](const char* key, double& target) {
            if (auto e = file.lookup("scenario", key))
                target = file.get_double("scenario", key, *e);
        };
        load_double("d_near", r.scenario.d_near);
        load_double("d_far", r.scenario.d_far);
        load_double("d_eve", r.scenario.d_eve);
        if (auto e = file.lookup("scenario", "d_pr"))
            r.scenario.d_pr = file.get_double_list("scenario", "d_pr", *e);
        load_double("alpha", r.scenario.alpha);
        load_double("sigma_eps2", r.scenario.sigma_eps2);
        load_double("pmax_db", r.scenario.pmax_db);
        load_double("ip_db", r.scenario.ip_db);
        if (auto e = file.lookup("scenario", "a_s"))
            r.scenario.a_s = file.get_double("scenario", "a_s", *e);
        if (auto e = file.lookup("scenario", "allocate"))
            r.scenario.allocate = file.get_bool("scenario", "allocate", *e);

        if (auto e = file.lookup("oracle", "mc_samples"))
            r.oracle.mc_samples = static_cast<std::uint64_t>(file.get_double("oracle", "mc_samples", *e));
        if (auto e = file.lookup("oracle", "seed"))
            r.oracle.seed = static_cast<std::uint64_t>(file.get_double("oracle", "seed", *e));
        if (auto e = file.lookup("oracle", "quad_tol"))
            r.oracle.quad_tol = file.get_double("oracle", "quad_tol", *e);

        if (file.has_section("sweep")) {
            SweepOpts sweep;
            if (auto e = file.lookup("sweep", "axis"))
                sweep.axis = e->value;
            else
                throw CliError(kExitConfig, *flags.config_path + ": [sweep] needs an 'axis' key");
            if (auto e = file.lookup("sweep", "values")) {
                sweep.values = file.get_double_list("sweep", "values", *e);
            } else {
                const auto from = file.lookup("sweep", "from");
                const auto to = file.lookup("sweep", "to");
                const auto step = file.lookup("sweep", "step");
                if (!from || !to || !step)
                    throw CliError(kExitConfig, *flags.config_path +
                                                    ": [sweep] needs 'values' or from/to/step");
                const double f = file.get_double("sweep", "from", *from);
                const double t = file.get_double("sweep", "to", *to);
                const double s = file.get_double("sweep", "step", *step);
                if (!(s > 0.0) || t < f)
                    throw CliError(kExitConfig, *flags.config_path + ": bad sweep range");
                for (double v = f; v <= t + 1e-12 * std::fabs(s); v += s)
                    sweep.values.push_back(v);
            }
            if (auto e = file.lookup("sweep", "pr_equal_distance"))
                sweep.pr_equal_distance = file.get_double("sweep", "pr_equal_distance", *e);
            r.sweep = std::move(sweep);
        }
    }

    if (flags.ip_db)
        r.scenario.ip_db = *flags.ip_db;
    if (flags.pmax_db)
        r.scenario.pmax_db = *flags.pmax_db;
    if (flags.sigma_eps2)
        r.scenario.sigma_eps2 = *flags.sigma_eps2;
    if (flags.alpha)
        r.scenario.alpha = *flags.alpha;
    if (flags.a_s)
        r.scenario.a_s = *flags.a_s;
    if (flags.allocate) {
        r.scenario.allocate = true;
        r.scenario.a_s.reset();
    }
    if (flags.mc_samples)
        r.oracle.mc_samples = *flags.mc_samples;
    if (flags.seed)
        r.oracle.seed = *flags.seed;
    if (flags.quad_tol)
        r.oracle.quad_tol = *flags.quad_tol;
    r.oracle.oma_estimation_noise = flags.oma_estimation_noise;

    if (r.scenario.allocate)
        r.scenario.a_s.reset();
    if (!r.scenario.a_s && !r.scenario.allocate)
        throw CliError(kExitConfig,
                       "power split unspecified: pass --as F or --allocate (or set a_s/allocate "
                       "in the [scenario] section)");
    if (r.scenario.a_s && !(*r.scenario.a_s > 0.0 && *r.scenario.a_s < 0.5))
        throw CliError(kExitConfig, "a_s must lie in (0, 0.5), got " + fmt(*r.scenario.a_s));
    return r;
}

// ---------------------------------------------------------------------------
// output plumbing

void emit_config_block(std::ostream& os, const std::string& command, const ScenarioOpts& sc,
                       const OracleOpts* oracle)
{
    os << "# config: " << command << "\n";
    os << "# d_near = " << fmt(sc.d_near) << "\n";
    os << "# d_far = " << fmt(sc.d_far) << "\n";
    os << "# d_eve = " << fmt(sc.d_eve) << "\n";
    os << "# d_pr =";
    for (std::size_t i = 0; i < sc.d_pr.size(); ++i)
        os << (i ? ", " : " ") << fmt(sc.d_pr[i]);
    os << "\n";
    os << "# alpha = " << fmt(sc.alpha) << "\n";
    os << "# sigma_eps2 = " << fmt(sc.sigma_eps2) << "\n";
    os << "# pmax_db = " << fmt(sc.pmax_db) << "\n";
    os << "# ip_db = " << fmt(sc.ip_db) << "\n";
    if (sc.a_s)
        os << "# a_s = " << fmt(*sc.a_s) << "\n";
    else
        os << "# allocate = true\n";
    if (oracle) {
        os << "# mc_samples = " << oracle->mc_samples << "\n";
        os << "# seed = " << oracle->seed << "\n";
        os << "# quad_tol = " << fmt(oracle->quad_tol) << "\n";
        if (oracle->oma_estimation_noise)
            os << "# oma_estimation_noise = true\n";
    }
}

void write_output(const FlagOverrides& flags, const std::string& content,
                  const std::string& default_name = "")
{
    std::string path = flags.out_path.value_or(default_name);
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary); // LF endings, verbatim bytes
    if (!out)
        throw CliError(kExitConfig, "cannot open output file '" + path + "'");
    out << content;
    if (!out)
        throw CliError(kExitConfig, "failed writing output file '" + path + "'");
}

// Evaluate fn(i) for i in [0, n) on `workers` threads; results land in order.
void parallel_for_ordered(int workers, int n, const std::function<void(int)>& fn)
{
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<int> cursor{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    int first_error_code = kExitNumeric;
    std::mutex err_mutex;
    auto body = [&] {
        for (;;) {
            const int i = cursor.fetch_add(1);
            if (i >= n || failed.load())
                return;
            try {
                fn(i);
            } catch (const CliError& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!failed.exchange(true)) {
                    first_error = e.what();
                    first_error_code = e.exit_code;
                }
                return;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!failed.exchange(true)) {
                    first_error = e.what();
                    first_error_code = kExitNumeric;
                }
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min(workers, n);
    pool.reserve(count);
    for (int t = 0; t < count; ++t)
        pool.emplace_back(body);
    for (auto& t : pool)
        t.join();
    if (failed.load())
        throw CliError(first_error_code, first_error);
}

// ---------------------------------------------------------------------------
// per-point evaluation shared by eval and sweep

constexpr const char* kEvalHeader =
    "ip_db,pmax_db,sigma_eps2,alpha,m_prs,a_s,alloc_status,essr,esr_strong,esr_weak,"
    "essr_asymptotic,oma_esr_strong,oma_esr_weak,essr_oma";
constexpr const char* kCheckColumns =
    ",mc_strong,mc_strong_se,mc_weak,mc_weak_se,quad_strong,quad_weak";

std::string eval_point_row(const ScenarioOpts& sc, const OracleOpts& oracle, bool with_check,
                           int mc_threads)
{
    ConfigHandle h = build_handle(sc);
    const SplitResult split = resolve_split(h, sc, oracle);

    noma_esr_breakdown strong{}, weak{};
    ensure(noma_esr_strong(h.get(), &strong), "esr_strong");
    ensure(noma_esr_weak(h.get(), &weak), "esr_weak");
    double asym = 0.0;
    ensure(noma_essr_asymptotic(h.get(), &asym), "essr_asymptotic");
    double oma_s = 0.0, oma_w = 0.0;
    ensure(noma_quad_oma_esr(h.get(), NOMA_USER_STRONG, oracle.quad_tol,
                             oracle.oma_estimation_noise ? 1 : 0, &oma_s),
           "oma strong");
    ensure(noma_quad_oma_esr(h.get(), NOMA_USER_WEAK, oracle.quad_tol,
                             oracle.oma_estimation_noise ? 1 : 0, &oma_w),
           "oma weak");

    std::ostringstream row;
    row << fmt(sc.ip_db) << ',' << fmt(sc.pmax_db) << ',' << fmt(sc.sigma_eps2) << ','
        << fmt(sc.alpha) << ',' << sc.d_pr.size() << ',' << fmt(split.a_s) << ',' << split.status
        << ',' << fmt(strong.total + weak.total) << ',' << fmt(strong.total) << ','
        << fmt(weak.total) << ',' << fmt(asym) << ',' << fmt(oma_s) << ',' << fmt(oma_w) << ','
        << fmt(oma_s + oma_w);

    if (with_check) {
        noma_mc_estimate mc_s{}, mc_w{};
        ensure(noma_mc_esr(h.get(), NOMA_RATE_NOMA_STRONG, oracle.mc_samples, oracle.seed,
                           mc_threads, 0, &mc_s),
               "mc strong");
        ensure(noma_mc_esr(h.get(), NOMA_RATE_NOMA_WEAK, oracle.mc_samples, oracle.seed,
                           mc_threads, 0, &mc_w),
               "mc weak");
        double quad_s = 0.0, quad_w = 0.0;
        ensure(noma_quad_esr_strong(h.get(), oracle.quad_tol, &quad_s), "quad strong");
        ensure(noma_quad_esr_weak(h.get(), oracle.quad_tol, &quad_w), "quad weak");
        row << ',' << fmt(mc_s.mean) << ',' << fmt(mc_s.std_err) << ',' << fmt(mc_w.mean) << ','
            << fmt(mc_w.std_err) << ',' << fmt(quad_s) << ',' << fmt(quad_w);
    }
    row << '\n';
    return row.str();
}

} // namespace

int run_eval(const FlagOverrides& flags)
{
    const Resolved r = resolve(flags);
    const auto start = std::chrono::steady_clock::now();

    std::ostringstream out;
    emit_config_block(out, "eval", r.scenario, flags.check ? &r.oracle : nullptr);
    out << kEvalHeader << (flags.check ? kCheckColumns : "") << "\n";
    out << eval_point_row(r.scenario, r.oracle, flags.check, 0);
    write_output(flags, out.str());

    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    std::cerr << "eval: " << elapsed.count() << " ms\n";
    return kExitOk;
}

int run_sweep(const FlagOverrides& flags)
{
    const Resolved r = resolve(flags);
    if (!r.sweep)
        throw CliError(kExitConfig, "sweep needs a --config file with a [sweep] section");
    const SweepOpts& sweep = *r.sweep;

    for (std::size_t i = 1; i < sweep.values.size(); ++i)
        if (!(sweep.values[i] > sweep.values[i - 1]))
            throw CliError(kExitConfig, "sweep values must be strictly increasing");

    auto scenario_at = [&](double v) {
        ScenarioOpts sc = r.scenario;
        if (sweep.axis == "i_peak_db") {
            sc.ip_db = v;
        } else if (sweep.axis == "p_max_db") {
            sc.pmax_db = v;
        } else if (sweep.axis == "sigma_eps2") {
            sc.sigma_eps2 = v;
        } else if (sweep.axis == "m_prs") {
            const int m = static_cast<int>(v);
            if (m < 1 || std::fabs(v - m) > 1e-9)
                throw CliError(kExitConfig, "m_prs sweep values must be positive integers");
            if (static_cast<std::size_t>(m) <= r.scenario.d_pr.size())
                sc.d_pr.assign(r.scenario.d_pr.begin(), r.scenario.d_pr.begin() + m);
            else
                sc.d_pr.assign(m, sweep.pr_equal_distance);
        } else {
            throw CliError(kExitConfig, "unknown sweep axis '" + sweep.axis +
                                            "' (i_peak_db, p_max_db, sigma_eps2, m_prs)");
        }
        return sc;
    };

    const int n = static_cast<int>(sweep.values.size());
    std::vector<std::string> rows(n);
    const int mc_threads = flags.parallel > 1 ? 1 : 0;
    parallel_for_ordered(flags.parallel, n, [&](int i) {
        rows[i] = eval_point_row(scenario_at(sweep.values[i]), r.oracle, flags.check, mc_threads);
    });

    std::ostringstream out;
    emit_config_block(out, "sweep over " + sweep.axis, r.scenario,
                      flags.check ? &r.oracle : nullptr);
    out << kEvalHeader << (flags.check ? kCheckColumns : "") << "\n";
    for (const auto& row : rows)
        out << row;
    write_output(flags, out.str());
    return kExitOk;
}

namespace {

std::vector<double> default_ip_grid()
{
    std::vector<double> grid;
    for (int db = -10; db <= 20; ++db)
        grid.push_back(static_cast<double>(db));
    return grid;
}

struct FigurePoint {
    ScenarioOpts scenario;
    std::string prefix; // leading CSV cells specific to the figure
};

std::string figure_row(const FigurePoint& pt, const OracleOpts& oracle, int figure)
{
    ConfigHandle h = build_handle(pt.scenario);
    const SplitResult split = resolve_split(h, pt.scenario, oracle);
    const int noise = oracle.oma_estimation_noise ? 1 : 0;

    std::ostringstream row;
    row << pt.prefix << fmt(split.a_s);
    if (figure == 2) {
        noma_esr_breakdown strong{}, weak{};
        ensure(noma_esr_strong(h.get(), &strong), "esr_strong");
        ensure(noma_esr_weak(h.get(), &weak), "esr_weak");
        double oma_s = 0.0, oma_w = 0.0;
        ensure(noma_quad_oma_esr(h.get(), NOMA_USER_STRONG, oracle.quad_tol, noise, &oma_s), "oma");
        ensure(noma_quad_oma_esr(h.get(), NOMA_USER_WEAK, oracle.quad_tol, noise, &oma_w), "oma");
        double asym_s = 0.0, asym_w = 0.0;
        ensure(noma_esr_asymptotic_split(h.get(), &asym_s, &asym_w), "asymptotic");
        row << ',' << fmt(strong.total) << ',' << fmt(weak.total) << ',' << fmt(oma_s) << ','
            << fmt(oma_w) << ',' << fmt(asym_s) << ',' << fmt(asym_w);
    } else if (figure == 5) {
        double sum = 0.0;
        ensure(noma_essr(h.get(), &sum), "essr");
        row << ',' << fmt(sum);
    } else {
        double sum = 0.0;
        ensure(noma_essr(h.get(), &sum), "essr");
        double oma_s = 0.0, oma_w = 0.0;
        ensure(noma_quad_oma_esr(h.get(), NOMA_USER_STRONG, oracle.quad_tol, noise, &oma_s), "oma");
        ensure(noma_quad_oma_esr(h.get(), NOMA_USER_WEAK, oracle.quad_tol, noise, &oma_w), "oma");
        row << ',' << fmt(sum) << ',' << fmt(oma_s + oma_w);
    }
    row << '\n';
    return row.str();
}

} // namespace

int run_figure(int figure, const FlagOverrides& flags)
{
    // Figures reproduce the reference scenario; only oracle/output/parallel
    // flags apply.
    FlagOverrides base = flags;
    base.a_s.reset();
    base.allocate = true; // per-point power allocation everywhere
    Resolved r = resolve(base);
    // The reference curves pair the NOMA rates with the estimation-noise
    // consistent OMA baseline; the printed no-shift form inverts the weak
    // user's NOMA/OMA ordering at moderate interference caps.
    r.oracle.oma_estimation_noise = true;

    std::vector<FigurePoint> points;
    std::string header;
    const std::vector<double> ip_grid = default_ip_grid();

    auto scenario_base = [&]() {
        ScenarioOpts sc = r.scenario;
        sc.a_s.reset();
        sc.allocate = true;
        return sc;
    };

    if (figure == 2) {
        header = "ip_db,a_s,noma_esr_strong,noma_esr_weak,oma_esr_strong,oma_esr_weak,"
                 "asymp_esr_strong,asymp_esr_weak";
        for (double ip : ip_grid) {
            ScenarioOpts sc = scenario_base();
            sc.pmax_db = 50.0;
            sc.ip_db = ip;
            points.push_back({sc, fmt(ip) + ","});
        }
    } else if (figure == 3) {
        header = "pmax_db,ip_db,a_s,noma_essr,oma_essr";
        for (double pmax : {40.0, 50.0, 60.0}) {
            for (double ip : ip_grid) {
                ScenarioOpts sc = scenario_base();
                sc.pmax_db = pmax;
                sc.ip_db = ip;
                points.push_back({sc, fmt(pmax) + "," + fmt(ip) + ","});
            }
        }
    } else if (figure == 4) {
        header = "sigma_eps2,ip_db,pmax_db,a_s,noma_essr,oma_essr";
        // sigma^2 axis stays below the smallest path gain in the scenario
        // (2.5e-5 at 200 m) so every link keeps a positive effective variance.
        const std::vector<double> sigma_grid = {0.0,     2.5e-6, 5e-6,    7.5e-6, 1e-5,
                                                1.25e-5, 1.5e-5, 1.75e-5, 2e-5};
        const std::pair<double, double> pairs[] = {{0.0, 50.0}, {0.0, 60.0}, {10.0, 50.0},
                                                   {10.0, 60.0}};
        for (const auto& [ip, pmax] : pairs) {
            for (double s2 : sigma_grid) {
                ScenarioOpts sc = scenario_base();
                sc.ip_db = ip;
                sc.pmax_db = pmax;
                sc.sigma_eps2 = s2;
                points.push_back({sc, fmt(s2) + "," + fmt(ip) + "," + fmt(pmax) + ","});
            }
        }
    } else if (figure == 5) {
        header = "scenario,m_prs,pmax_db,ip_db,a_s,noma_essr";
        struct Case {
            const char* name;
            std::vector<double> d_pr;
        };
        const Case cases[] = {{"I", std::vector<double>(2, 200.0)},
                              {"II", {200.0, 205.0, 210.0, 215.0}},
                              {"III", std::vector<double>(10, 200.0)}};
        for (const auto& c : cases) {
            for (double pmax : {40.0, 60.0}) {
                for (double ip : ip_grid) {
                    ScenarioOpts sc = scenario_base();
                    sc.d_pr = c.d_pr;
                    sc.pmax_db = pmax;
                    sc.ip_db = ip;
                    points.push_back({sc, std::string(c.name) + "," +
                                              std::to_string(c.d_pr.size()) + "," + fmt(pmax) +
                                              "," + fmt(ip) + ","});
                }
            }
        }
    } else {
        throw CliError(kExitConfig, "figure must be 2, 3, 4 or 5");
    }

    const int n = static_cast<int>(points.size());
    std::vector<std::string> rows(n);
    parallel_for_ordered(flags.parallel, n,
                         [&](int i) { rows[i] = figure_row(points[i], r.oracle, figure); });

    std::ostringstream out;
    emit_config_block(out, "figure " + std::to_string(figure), r.scenario, nullptr);
    out << header << "\n";
    for (const auto& row : rows)
        out << row;
    write_output(flags, out.str(), "figure" + std::to_string(figure) + ".csv");
    return kExitOk;
}

int run_allocate(const FlagOverrides& flags)
{
    FlagOverrides base = flags;
    base.a_s.reset();
    base.allocate = true;
    const Resolved r = resolve(base);

    ConfigHandle h = build_handle(r.scenario);
    noma_allocation_result alloc{};
    ensure(noma_match_strong_user(h.get(), 1e-6, 100, r.oracle.quad_tol,
                                  r.oracle.oma_estimation_noise ? 1 : 0, &alloc),
           "power allocation");

    std::ostringstream out;
    emit_config_block(out, "allocate", r.scenario, nullptr);
    out << "ip_db,pmax_db,a_s,a_w,achieved_gap,iterations,status,oma_target\n";
    out << fmt(r.scenario.ip_db) << ',' << fmt(r.scenario.pmax_db) << ',' << fmt(alloc.a_s) << ','
        << fmt(alloc.a_w) << ',' << fmt(alloc.achieved_gap) << ',' << alloc.iterations << ','
        << alloc_status_name(alloc.status) << ',' << fmt(alloc.oma_target) << "\n";
    write_output(flags, out.str());
    return kExitOk;
}

int run_check(const FlagOverrides& flags)
{
    const Resolved r = resolve(flags);
    ConfigHandle h = build_handle(r.scenario);
    const SplitResult split = resolve_split(h, r.scenario, r.oracle);

    noma_esr_breakdown strong{}, weak{};
    ensure(noma_esr_strong(h.get(), &strong), "esr_strong");
    ensure(noma_esr_weak(h.get(), &weak), "esr_weak");
    double quad_s = 0.0, quad_w = 0.0, quad_os = 0.0, quad_ow = 0.0;
    ensure(noma_quad_esr_strong(h.get(), r.oracle.quad_tol, &quad_s), "quad strong");
    ensure(noma_quad_esr_weak(h.get(), r.oracle.quad_tol, &quad_w), "quad weak");
    const int noise = r.oracle.oma_estimation_noise ? 1 : 0;
    ensure(noma_quad_oma_esr(h.get(), NOMA_USER_STRONG, r.oracle.quad_tol, noise, &quad_os),
           "quad oma strong");
    ensure(noma_quad_oma_esr(h.get(), NOMA_USER_WEAK, r.oracle.quad_tol, noise, &quad_ow),
           "quad oma weak");

    struct Row {
        const char* metric;
        double closed; // NaN when no closed form exists
        double quad;
        noma_rate_mode mode;
    };
    const Row spec_rows[] = {
        {"esr_strong", strong.total, quad_s, NOMA_RATE_NOMA_STRONG},
        {"esr_weak", weak.total, quad_w, NOMA_RATE_NOMA_WEAK},
        {"oma_esr_strong", std::nan(""), quad_os, NOMA_RATE_OMA_STRONG},
        {"oma_esr_weak", std::nan(""), quad_ow, NOMA_RATE_OMA_WEAK},
    };

    std::ostringstream out;
    emit_config_block(out, "check", r.scenario, &r.oracle);
    out << "# a_s = " << fmt(split.a_s) << " (" << split.status << ")\n";
    out << "metric,closed_form,quad,mc_mean,mc_stderr,closed_vs_quad_rel,mc_z,ok\n";

    bool all_ok = true;
    for (const Row& row : spec_rows) {
        noma_mc_estimate mc{};
        ensure(noma_mc_esr(h.get(), row.mode, r.oracle.mc_samples, r.oracle.seed, 0, noise, &mc),
               row.metric);
        const bool has_closed = !std::isnan(row.closed);
        const double anchor = has_closed ? row.closed : row.quad;
        const double rel =
            has_closed ? std::fabs(row.closed - row.quad) / std::max(row.quad, 1e-6) : 0.0;
        const double z = mc.std_err > 0.0 ? (anchor - mc.mean) / mc.std_err : 0.0;
        const bool ok = (!has_closed || rel <= 1e-5) &&
                        std::fabs(anchor - mc.mean) <= 4.0 * mc.std_err + 1e-7;
        all_ok = all_ok && ok;
        out << row.metric << ',' << (has_closed ? fmt(row.closed) : std::string()) << ','
            << fmt(row.quad) << ',' << fmt(mc.mean) << ',' << fmt(mc.std_err) << ','
            << (has_closed ? fmt(rel) : std::string()) << ',' << fmt(z) << ','
            << (ok ? "yes" : "no") << "\n";
    }
    out << "# verdict: " << (all_ok ? "agree" : "DISAGREE") << "\n";
    write_output(flags, out.str());
    return all_ok ? kExitOk : kExitNumeric;
}

} // namespace cli
