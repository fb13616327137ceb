#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;  // config/validation problems
inline constexpr int kExitNumeric = 3; // convergence or consistency failures

class CliError : public std::runtime_error {
public:
    CliError(int code, const std::string& message) : std::runtime_error(message), exit_code(code) {}
    int exit_code;
};

struct ScenarioOpts {
    double d_near = 30.0;
    double d_far = 100.0;
    double d_eve = 150.0;
    std::vector<double> d_pr{200.0, 205.0, 210.0, 215.0};
    double alpha = 2.0;
    double sigma_eps2 = 2e-5;
    double pmax_db = 50.0;
    double ip_db = 10.0;
    std::optional<double> a_s; // fixed power split; empty means "allocate"
    bool allocate = false;
};

struct OracleOpts {
    std::uint64_t mc_samples = 1000000;
    std::uint64_t seed = 12345;
    double quad_tol = 1e-7;
    bool oma_estimation_noise = false;
};

struct SweepOpts {
    std::string axis; // i_peak_db | p_max_db | sigma_eps2 | m_prs
    std::vector<double> values;
    double pr_equal_distance = 200.0; // used by the m_prs axis
};

// Values collected from command-line flags; only the ones the user actually
// passed are set, so file values survive unless overridden.
struct FlagOverrides {
    std::optional<std::string> config_path;
    std::optional<std::string> preset;
    std::optional<double> ip_db;
    std::optional<double> pmax_db;
    std::optional<double> sigma_eps2;
    std::optional<double> alpha;
    std::optional<double> a_s;
    bool allocate = false;
    std::optional<std::uint64_t> mc_samples;
    std::optional<std::uint64_t> seed;
    std::optional<double> quad_tol;
    int parallel = 0;
    std::optional<std::string> out_path;
    bool oma_estimation_noise = false;
    bool check = false; // eval only
};

int run_eval(const FlagOverrides& flags);
int run_sweep(const FlagOverrides& flags);
int run_figure(int figure, const FlagOverrides& flags);
int run_allocate(const FlagOverrides& flags);
int run_check(const FlagOverrides& flags);

} // namespace cli
