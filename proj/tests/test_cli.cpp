#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string cli = PLOM_CLI_PATH;

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const fs::path outfile = fs::temp_directory_path() / "plom_cli_test_out.txt";
    const std::string cmd = cli + " " + args + " >" + outfile.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(outfile);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream f(p);
    f << body;
    return p;
}

const char* kMoConfig =
    "# classical Marshall-Olkin window\n"
    "generator = identity\n"
    "marginal1 = exponential\nalpha1 = 2\n"
    "marginal2 = exponential\nalpha2 = 3\n"
    "lambda = 4.5\n";

const char* kParetoPowerConfig =
    "generator = power_exp_ratio\ntheta = 1.0\nbeta = 2.0\n"
    "marginal1 = pareto_ii\nalpha1 = 2\n"
    "marginal2 = pareto_ii\nalpha2 = 2\n"
    "lambda = 2.75\n";

const char* kParetoExpcompConfig =
    "generator = exp_complement\ntheta = -0.01\nbeta = 1.0\n"
    "marginal1 = pareto_ii\nalpha1 = 3\n"
    "marginal2 = pareto_ii\nalpha2 = 3\n"
    "lambda = 4.5\n";

}  // namespace

TEST_CASE("validate: classical MO window exits 0") {
    const fs::path cfg = write_config("mo.cfg", kMoConfig);
    const RunResult r = run("validate --config " + cfg.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("verdict=valid_on_grid") != std::string::npos);
    CHECK(r.out.find("rate_condition=pass") != std::string::npos);
}

TEST_CASE("validate: distortion dichotomy through the CLI") {
    const fs::path cfg = write_config("pareto_power.cfg", kParetoPowerConfig);
    const RunResult distorted = run("validate --config " + cfg.string());
    CHECK(distorted.exit_code == 0);
    const RunResult base = run("validate --undistorted --config " + cfg.string());
    CHECK(base.exit_code == 2);
    CHECK(base.out.find("verdict=invalid") != std::string::npos);
    // witness near the origin
    const auto pos = base.out.find("density_min_x=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(base.out.substr(pos + 14)) < 0.01);
}

TEST_CASE("validate: lambda above the rate bound exits 2") {
    const fs::path cfg = write_config("bad.cfg", std::string(kMoConfig) + "lambda = 5.5\n");
    const RunResult r = run("validate --config " + cfg.string());
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("rate_condition=fail") != std::string::npos);
}

TEST_CASE("sample: CSV schema, seed comment, reproducibility") {
    const fs::path cfg = write_config("mo.cfg", kMoConfig);
    const fs::path out1 = fs::temp_directory_path() / "s1.csv";
    const fs::path out2 = fs::temp_directory_path() / "s2.csv";
    const RunResult r1 =
        run("sample --config " + cfg.string() + " --n 500 --seed 7 --out " + out1.string());
    const RunResult r2 =
        run("sample --config " + cfg.string() + " --n 500 --seed 7 --out " + out2.string());
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    std::ifstream f1(out1), f2(out2);
    std::stringstream b1, b2;
    b1 << f1.rdbuf();
    b2 << f2.rdbuf();
    CHECK(b1.str() == b2.str());  // byte-identical for a fixed seed
    CHECK(b1.str().rfind("# seed=7", 0) == 0);
    CHECK(b1.str().find("x,y,tag\n") != std::string::npos);
    CHECK(b1.str().find("DIAGONAL") != std::string::npos);

    const RunResult r3 =
        run("sample --config " + cfg.string() + " --n 500 --seed 8 --out " + out1.string());
    CHECK(r3.exit_code == 0);
    std::ifstream f3(out1);
    std::stringstream b3;
    b3 << f3.rdbuf();
    CHECK(b1.str() != b3.str());
}

TEST_CASE("sample: n = 0 is a usage error; invalid distribution exits 2") {
    const fs::path cfg = write_config("mo.cfg", kMoConfig);
    CHECK(run("sample --config " + cfg.string() + " --n 0").exit_code == 1);
    const fs::path bad = write_config("bad2.cfg", std::string(kMoConfig) + "lambda = 6\n");
    CHECK(run("sample --config " + bad.string() + " --n 10").exit_code == 2);
}

TEST_CASE("kendall: analytic column, optional empirical column") {
    const fs::path cfg = write_config("mo.cfg", kMoConfig);
    const RunResult r = run("kendall --config " + cfg.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("t,K_analytic\n") != std::string::npos);
    const RunResult re = run("kendall --config " + cfg.string() + " --empirical 2000 --seed 3");
    CHECK(re.exit_code == 0);
    CHECK(re.out.find("t,K_analytic,K_empirical\n") != std::string::npos);
}

TEST_CASE("tau: emits curve and concordance estimates") {
    const fs::path cfg = write_config("mo.cfg", kMoConfig);
    const RunResult r = run("tau --config " + cfg.string() + " --n 20000 --seed 5");
    CHECK(r.exit_code == 0);
    const auto pos_c = r.out.find("tau_curve=");
    const auto pos_e = r.out.find("tau_empirical=");
    REQUIRE(pos_c != std::string::npos);
    REQUIRE(pos_e != std::string::npos);
    const double tc = std::stod(r.out.substr(pos_c + 10));
    const double te = std::stod(r.out.substr(pos_e + 14));
    CHECK(tc == Catch::Approx(1.0 / 9.0).margin(1e-3));
    CHECK(te == Catch::Approx(1.0 / 9.0).margin(0.03));
}

TEST_CASE("taildep: exp_complement/Pareto closed form and numeric estimate") {
    const fs::path cfg = write_config("pareto_expcomp.cfg", kParetoExpcompConfig);
    const RunResult r = run("taildep --config " + cfg.string());
    CHECK(r.exit_code == 0);
    const auto pos_u = r.out.find("upper=");
    REQUIRE(pos_u != std::string::npos);
    CHECK(std::stod(r.out.substr(pos_u + 6)) == Catch::Approx(0.5).margin(1e-9));
    const auto pos_n = r.out.find("upper_numeric=");
    REQUIRE(pos_n != std::string::npos);
    CHECK(std::stod(r.out.substr(pos_n + 14)) == Catch::Approx(0.5).margin(0.05));
}

TEST_CASE("atom: boundary lambda gives zero mass") {
    const fs::path cfg = write_config("bnd.cfg", std::string(kMoConfig) + "lambda = 5\n");
    const RunResult r = run("atom --config " + cfg.string());
    CHECK(r.exit_code == 0);
    const auto pos = r.out.find("atom=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(r.out.substr(pos + 5)) == Catch::Approx(0.0).margin(1e-12));
    CHECK(r.out.find("atom_tail[0.5]=") != std::string::npos);
}

TEST_CASE("atom: distorted-exponential configuration") {
    const fs::path cfg = write_config("distexp.cfg",
                                      "generator = exp_ratio\ntheta = 0.01\n"
                                      "marginal1 = exponential\nalpha1 = 0.5\n"
                                      "marginal2 = exponential\nalpha2 = 0.6\n"
                                      "lambda = 0.645\nmarginals_are = distorted\n");
    const RunResult r = run("atom --config " + cfg.string());
    CHECK(r.exit_code == 0);
    const auto pos = r.out.find("atom=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(r.out.substr(pos + 5)) == Catch::Approx(0.696928).margin(1e-5));
}

TEST_CASE("kendall honors the t_grid spec") {
    const fs::path cfg = write_config("tg.cfg", std::string(kMoConfig) + "t_grid = 0.1:0.9:5\n");
    const RunResult r = run("kendall --config " + cfg.string());
    CHECK(r.exit_code == 0);
    int rows = 0;
    std::stringstream ss(r.out);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#' && line[0] != 't') ++rows;
    CHECK(rows == 5);
    CHECK(r.out.find("0.1,") != std::string::npos);
    CHECK(r.out.find("0.9,") != std::string::npos);
}

TEST_CASE("taildep reports unstable corner exponents with exit 3") {
    // recip_exp decays faster than any power at 0: no regular-variation exponent
    const fs::path cfg = write_config("recip.cfg",
                                      "generator = recip_exp\ngamma = 1.0\n"
                                      "marginal1 = exponential\nalpha1 = 2\n"
                                      "marginal2 = exponential\nalpha2 = 2\nlambda = 3\n");
    CHECK(run("taildep --config " + cfg.string()).exit_code == 3);
}

TEST_CASE("unknown config keys and missing files are usage errors") {
    const fs::path cfg = write_config("unk.cfg", std::string(kMoConfig) + "bogus_key = 1\n");
    CHECK(run("validate --config " + cfg.string()).exit_code == 1);
    CHECK(run("validate --config /nonexistent/path.cfg").exit_code == 1);
    CHECK(run("nonsense-subcommand").exit_code != 0);
}
