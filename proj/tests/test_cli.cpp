#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks of the installed binary: exit codes, atomic
// outputs, and byte-identical reruns.

namespace {

const std::string kBin = LIUREG_BIN_PATH;

int run(const std::string& args) {
    return std::system((kBin + " " + args + " > cli_stdout.txt 2> cli_stderr.txt").c_str());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int exit_code(int system_status) {
#ifdef WEXITSTATUS
    return WEXITSTATUS(system_status);
#else
    return system_status;
#endif
}

}  // namespace

TEST_CASE("cli: dist cdf prints the chi-square(2) median") {
    REQUIRE(exit_code(run("dist cdf --v 2 --x 1.3862944")) == 0);
    const double v = std::stod(slurp("cli_stdout.txt"));
    CHECK(v == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("cli: missing config file reports the CONFIG category") {
    CHECK(exit_code(run("simulate --config missing.toml --out out.csv")) == 2);
    CHECK(slurp("cli_stderr.txt").find("category=CONFIG") != std::string::npos);
}

TEST_CASE("cli: unknown config keys are fatal") {
    {
        std::ofstream cfg("cli_cfg_bad.txt");
        cfg << "n = 30\nreps = 2\nnot_a_key = 1\n";
    }
    CHECK(exit_code(run("simulate --config cli_cfg_bad.txt --out out.csv")) == 2);
    CHECK(slurp("cli_stderr.txt").find("not_a_key") != std::string::npos);
}

TEST_CASE("cli: simulate reruns are byte identical for any worker count") {
    {
        std::ofstream cfg("cli_cfg.txt");
        cfg << "n = 30\np1 = 2\np2 = 3\nrho = [0.0, 0.3]\ndelta_star = [0.0, 1.0]\n"
            << "reps = 5\nseed = 17\nestimators = [LFM, LSM, LPT]\nscaled_fit = true\n";
    }
    REQUIRE(exit_code(run("simulate --config cli_cfg.txt --out cli_a.csv --jobs 1")) == 0);
    REQUIRE(exit_code(run("simulate --config cli_cfg.txt --out cli_b.csv --jobs 2")) == 0);
    CHECK(slurp("cli_a.csv") == slurp("cli_b.csv"));

    // --seed overrides the config seed
    REQUIRE(exit_code(run(
                "simulate --config cli_cfg.txt --out cli_c.csv --seed 99")) == 0);
    CHECK(slurp("cli_a.csv") != slurp("cli_c.csv"));

    // manifest written next to the CSV
    CHECK(!slurp("cli_a.csv.manifest.json").empty());
}

TEST_CASE("cli: risk emits a long-format curve") {
    REQUIRE(exit_code(run("risk --p1 3 --p2 5 --rho 0.3 --d 0.8 --delta-max 4 "
                          "--steps 4 --out cli_risk.csv")) == 0);
    const std::string text = slurp("cli_risk.csv");
    CHECK(text.find("delta,estimator,risk") == 0);
    CHECK(text.find("LPS") != std::string::npos);
}
