#include "config_file.hpp"
#include "runner.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

void add_scenario_flags(CLI::App* cmd, cli::FlagOverrides& f)
{
    cmd->add_option_function<std::string>(
           "--config", [&f](const std::string& v) { f.config_path = v; },
           "config file (flat key = value with [scenario]/[sweep]/[oracle] sections)");
    cmd->add_option_function<std::string>(
           "--preset", [&f](const std::string& v) { f.preset = v; },
           "named scenario preset (paper-defaults)");
    cmd->add_option_function<double>(
        "--ip-db", [&f](double v) { f.ip_db = v; }, "peak tolerable interference I_p [dB]");
    cmd->add_option_function<double>(
        "--pmax-db", [&f](double v) { f.pmax_db = v; }, "max transmit power P_max [dB]");
    cmd->add_option_function<double>(
        "--sigma-eps2", [&f](double v) { f.sigma_eps2 = v; },
        "channel estimation error variance (linear)");
    cmd->add_option_function<double>(
        "--alpha", [&f](double v) { f.alpha = v; }, "path loss exponent");
    auto* as_opt = cmd->add_option_function<double>(
        "--as", [&f](double v) { f.a_s = v; }, "strong-user power fraction in (0, 0.5)");
    auto* alloc_opt = cmd->add_flag("--allocate", f.allocate,
                                    "choose a_s so the strong user's ESR matches its OMA ESR");
    as_opt->excludes(alloc_opt);
    alloc_opt->excludes(as_opt);
}

void add_oracle_flags(CLI::App* cmd, cli::FlagOverrides& f)
{
    cmd->add_option_function<std::uint64_t>(
        "--mc-samples", [&f](std::uint64_t v) { f.mc_samples = v; },
        "Monte Carlo sample count (default 1000000)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&f](std::uint64_t v) { f.seed = v; }, "Monte Carlo master seed");
    cmd->add_option_function<double>(
        "--quad-tol", [&f](double v) { f.quad_tol = v; },
        "quadrature relative tolerance in [1e-10, 1e-4] (default 1e-7)");
    cmd->add_flag("--oma-estimation-noise", f.oma_estimation_noise,
                  "apply the estimation-noise shift to the OMA gains too");
}

void add_output_flags(CLI::App* cmd, cli::FlagOverrides& f)
{
    cmd->add_option_function<std::string>(
        "--out", [&f](const std::string& v) { f.out_path = v; },
        "output CSV path ('-' = stdout)");
    cmd->add_option("--parallel", f.parallel, "evaluate sweep/figure points on N worker threads");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ergodic secrecy rates for underlay spectrum-sharing downlink NOMA"};
    app.require_subcommand(1);

    cli::FlagOverrides eval_flags, sweep_flags, figure_flags, alloc_flags, check_flags;
    int figure_number = 0;

    CLI::App* eval = app.add_subcommand("eval", "evaluate one operating point");
    add_scenario_flags(eval, eval_flags);
    add_oracle_flags(eval, eval_flags);
    add_output_flags(eval, eval_flags);
    eval->add_flag("--check", eval_flags.check, "also run the MC and quadrature oracles");

    CLI::App* sweep = app.add_subcommand("sweep", "sweep one axis from the [sweep] config section");
    add_scenario_flags(sweep, sweep_flags);
    add_oracle_flags(sweep, sweep_flags);
    add_output_flags(sweep, sweep_flags);
    sweep->add_flag("--check", sweep_flags.check, "append oracle columns to every row");

    CLI::App* figure =
        app.add_subcommand("figure", "reproduce a reference parameter-sweep figure as CSV");
    figure->add_option("n", figure_number, "figure number (2-5)")
        ->required()
        ->check(CLI::Range(2, 5));
    add_oracle_flags(figure, figure_flags);
    add_output_flags(figure, figure_flags);

    CLI::App* allocate = app.add_subcommand("allocate", "run the power-allocation match only");
    add_scenario_flags(allocate, alloc_flags);
    add_oracle_flags(allocate, alloc_flags);
    add_output_flags(allocate, alloc_flags);

    CLI::App* check = app.add_subcommand("check", "oracle agreement report at one point");
    add_scenario_flags(check, check_flags);
    add_oracle_flags(check, check_flags);
    add_output_flags(check, check_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            app.exit(e);
            return cli::kExitOk;
        }
        std::cerr << e.what() << "\n";
        return cli::kExitConfig;
    }

    try {
        if (eval->parsed())
            return cli::run_eval(eval_flags);
        if (sweep->parsed())
            return cli::run_sweep(sweep_flags);
        if (figure->parsed())
            return cli::run_figure(figure_number, figure_flags);
        if (allocate->parsed())
            return cli::run_allocate(alloc_flags);
        if (check->parsed())
            return cli::run_check(check_flags);
    } catch (const cli::CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code;
    } catch (const cli::ConfigFileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitNumeric;
    }
    return cli::kExitOk;
}
