#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run_cli(const std::string& args)
{
    static int counter = 0;
    const fs::path base = fs::temp_directory_path() /
                          ("nomasec_cli_" + std::to_string(::getpid()) + "_" +
                           std::to_string(counter++));
    const fs::path out_path = base.string() + ".out";
    const fs::path err_path = base.string() + ".err";
    const std::string cmd = std::string(NOMASEC_CLI_PATH) + " " + args + " > " +
                            out_path.string() + " 2> " + err_path.string();
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    fs::remove(out_path);
    fs::remove(err_path);
    return r;
}

// data rows only (no comments, no header)
std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_skipped) {
            header_skipped = true;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::string csv_header(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#')
            return line;
    return "";
}

fs::path write_temp(const std::string& name, const std::string& content)
{
    const fs::path p = fs::temp_directory_path() /
                       (name + "_" + std::to_string(::getpid()) + ".cfg");
    std::ofstream out(p);
    out << content;
    return p;
}

} // namespace

TEST_CASE("eval emits one well-formed row")
{
    const RunResult r = run_cli("eval --preset paper-defaults --ip-db 10 --pmax-db 50 --as 0.2");
    REQUIRE(r.exit_code == 0);
    CHECK(csv_header(r.out) ==
          "ip_db,pmax_db,sigma_eps2,alpha,m_prs,a_s,alloc_status,essr,esr_strong,esr_weak,"
          "essr_asymptotic,oma_esr_strong,oma_esr_weak,essr_oma");
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].size() == 14);
    CHECK(std::stod(rows[0][7]) > 0.0);           // essr
    CHECK(rows[0][6] == "fixed");                 // alloc_status
    CHECK(r.out.find("# config: eval") != std::string::npos);
    CHECK(r.out.find("\r") == std::string::npos); // LF endings only
}

TEST_CASE("a vanishing interference cap yields a near-zero row")
{
    const RunResult r = run_cli("eval --ip-db -120 --as 0.2");
    REQUIRE(r.exit_code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 1);
    CHECK(std::stod(rows[0][7]) < 1e-6);
}

TEST_CASE("config validation failures exit with code 2 and name the link")
{
    const RunResult r = run_cli("eval --as 0.2 --sigma-eps2 3e-5");
    // sigma^2 = 3e-5 exceeds the 200 m PR path gain of 2.5e-5 (the eve link
    // at 150 m still clears it)
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("pr[0]") != std::string::npos);

    const auto cfg = write_temp("bad_eve", "[scenario]\nd_eve = 5000\na_s = 0.2\n");
    const RunResult r2 = run_cli("eval --config " + cfg.string());
    CHECK(r2.exit_code == 2);
    CHECK(r2.err.find("eve") != std::string::npos);
    fs::remove(cfg);
}

TEST_CASE("flag misuse exits with code 2")
{
    CHECK(run_cli("eval").exit_code == 2);                          // no a_s / allocate
    CHECK(run_cli("eval --as 0.2 --allocate").exit_code == 2);      // mutually exclusive
    CHECK(run_cli("eval --as 0.7").exit_code == 2);                 // out of range
    CHECK(run_cli("eval --as 0.2 --preset nope").exit_code == 2);   // unknown preset
    CHECK(run_cli("eval --as 0.2 --no-such-flag").exit_code == 2);  // unknown flag
    CHECK(run_cli("sweep --as 0.2").exit_code == 2);                // sweep without config
    CHECK(run_cli("figure 7").exit_code == 2);                      // bad figure number
}

TEST_CASE("config file errors carry the line number")
{
    const auto cfg = write_temp("bad_key", "[scenario]\nnot_a_key = 1\n");
    const RunResult r = run_cli("eval --config " + cfg.string() + " --as 0.2");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find(":2:") != std::string::npos);
    CHECK(r.err.find("not_a_key") != std::string::npos);
    fs::remove(cfg);
}

TEST_CASE("sweep over the interference cap is nondecreasing")
{
    const auto cfg = write_temp("sweep_ip",
                                "[scenario]\n"
                                "pmax_db = 40\n"
                                "a_s = 0.2\n"
                                "[sweep]\n"
                                "axis = i_peak_db\n"
                                "from = -10\n"
                                "to = 20\n"
                                "step = 2\n");
    const RunResult r = run_cli("sweep --config " + cfg.string());
    REQUIRE(r.exit_code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 16);
    double prev = -1.0;
    for (const auto& row : rows) {
        const double essr = std::stod(row[7]);
        CHECK(essr >= prev - 1e-9);
        prev = essr;
    }
    fs::remove(cfg);
}

TEST_CASE("sweep over sigma_eps2 is strictly decreasing")
{
    const auto cfg = write_temp("sweep_s2",
                                "[scenario]\n"
                                "a_s = 0.2\n"
                                "[sweep]\n"
                                "axis = sigma_eps2\n"
                                "values = 1e-6, 1e-5, 2e-5\n");
    const RunResult r = run_cli("sweep --config " + cfg.string());
    REQUIRE(r.exit_code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(std::stod(rows[0][7]) > std::stod(rows[1][7]));
    CHECK(std::stod(rows[1][7]) > std::stod(rows[2][7]));
    fs::remove(cfg);
}

TEST_CASE("m_prs sweep widens the PR set and the asymptote ignores it")
{
    const auto cfg = write_temp("sweep_m",
                                "[scenario]\n"
                                "ip_db = -10\n"
                                "pmax_db = 40\n"
                                "a_s = 0.2\n"
                                "[sweep]\n"
                                "axis = m_prs\n"
                                "values = 2, 4, 10\n"
                                "pr_equal_distance = 200\n");
    const RunResult r = run_cli("sweep --config " + cfg.string());
    REQUIRE(r.exit_code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][4] == "2");
    CHECK(rows[2][4] == "10");
    // more PRs hurt in the interference-constrained regime
    CHECK(std::stod(rows[0][7]) > std::stod(rows[2][7]));
    // asymptotic column identical across M
    CHECK(rows[0][10] == rows[1][10]);
    CHECK(rows[1][10] == rows[2][10]);
    fs::remove(cfg);
}

TEST_CASE("sweep values must increase")
{
    const auto cfg = write_temp("sweep_bad",
                                "[scenario]\na_s = 0.2\n[sweep]\naxis = i_peak_db\n"
                                "values = 10, 5\n");
    CHECK(run_cli("sweep --config " + cfg.string()).exit_code == 2);
    fs::remove(cfg);
}

TEST_CASE("allocate prints the allocation record")
{
    const RunResult r = run_cli("allocate --ip-db 10 --pmax-db 50");
    REQUIRE(r.exit_code == 0);
    CHECK(csv_header(r.out) == "ip_db,pmax_db,a_s,a_w,achieved_gap,iterations,status,oma_target");
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][6] == "converged");
    const double a_s = std::stod(rows[0][2]);
    CHECK(a_s > 0.0);
    CHECK(a_s < 0.5);
    CHECK(std::stod(rows[0][4]) <= 1e-6);
}

TEST_CASE("eval --check output is reproducible byte for byte")
{
    const std::string args = "eval --as 0.2 --check --mc-samples 100000 --seed 7";
    const RunResult a = run_cli(args);
    const RunResult b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(csv_rows(a.out)[0].size() == 20);
}

TEST_CASE("check reports agreement and exits zero")
{
    const RunResult r = run_cli("check --as 0.2 --mc-samples 200000 --seed 3");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("# verdict: agree") != std::string::npos);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 4);
    for (const auto& row : rows)
        CHECK(row.back() == "yes");
}

TEST_CASE("figure 3: NOMA beats OMA at every point")
{
    const fs::path out = fs::temp_directory_path() /
                         ("nomasec_fig3_" + std::to_string(::getpid()) + ".csv");
    const RunResult r = run_cli("figure 3 --parallel 4 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const std::string content = slurp(out);
    CHECK(csv_header(content) == "pmax_db,ip_db,a_s,noma_essr,oma_essr");
    const auto rows = csv_rows(content);
    REQUIRE(rows.size() == 93); // 3 power budgets x 31 interference caps
    for (const auto& row : rows)
        CHECK(std::stod(row[3]) >= std::stod(row[4]) - 1e-9);
    fs::remove(out);
}

TEST_CASE("figure 5: PR count matters only in the interference-constrained regime")
{
    const fs::path out = fs::temp_directory_path() /
                         ("nomasec_fig5_" + std::to_string(::getpid()) + ".csv");
    const RunResult r = run_cli("figure 5 --parallel 4 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const std::string content = slurp(out);
    CHECK(csv_header(content) == "scenario,m_prs,pmax_db,ip_db,a_s,noma_essr");
    const auto rows = csv_rows(content);
    REQUIRE(rows.size() == 186); // 3 cases x 2 power budgets x 31 caps

    auto essr_at = [&](const std::string& scenario, double pmax, double ip) {
        for (const auto& row : rows)
            if (row[0] == scenario && std::stod(row[2]) == pmax && std::stod(row[3]) == ip)
                return std::stod(row[5]);
        REQUIRE(false);
        return 0.0;
    };
    // more PRs hurt at small I_p
    CHECK(essr_at("III", 40.0, -10.0) < essr_at("I", 40.0, -10.0));
    // and stop mattering at large I_p
    const double i = essr_at("I", 40.0, 20.0);
    const double iii = essr_at("III", 40.0, 20.0);
    CHECK(std::fabs(i - iii) / std::min(i, iii) < 0.01);
    fs::remove(out);
}

TEST_CASE("figure 2 writes the per-user curves")
{
    const fs::path out = fs::temp_directory_path() /
                         ("nomasec_fig2_" + std::to_string(::getpid()) + ".csv");
    const RunResult r = run_cli("figure 2 --parallel 4 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const std::string content = slurp(out);
    CHECK(csv_header(content) ==
          "ip_db,a_s,noma_esr_strong,noma_esr_weak,oma_esr_strong,oma_esr_weak,"
          "asymp_esr_strong,asymp_esr_weak");
    const auto rows = csv_rows(content);
    REQUIRE(rows.size() == 31);
    for (const auto& row : rows) {
        // matching scheme keeps the strong user at its OMA rate
        CHECK(std::stod(row[2]) == doctest::Approx(std::stod(row[4])).epsilon(1e-3));
        // and the weak user above its OMA rate
        CHECK(std::stod(row[3]) >= std::stod(row[5]) - 1e-9);
    }
    fs::remove(out);
}
