#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ammfg/cli_runner.hpp"
#include "ammfg/run_config.hpp"

using namespace ammfg;
namespace fs = std::filesystem;

namespace {

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int const code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(std::string const& name)
{
    auto const dir = fs::temp_directory_path() / ("ammfg_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small enough for a unit test.
std::vector<std::string> fast()
{
    return {"--set", "grid.n_particles=1500", "--set", "grid.n_t=40",
            "--set", "grid.n_x=101",          "--set", "fixed_point.tol=0.02"};
}

std::vector<std::string> cat(std::vector<std::string> a, std::vector<std::string> const& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST_CASE("usage errors exit 1")
{
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"solve", "--bogus"}).code == 1);
    CHECK(run_cli({"frobnicate"}).code == 1);
    CHECK(run_cli({"solve", "--kind", "f3"}).code == 1);
    CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("validation lists every violation")
{
    auto const r = run_cli({"--set", "grid.n_x=1", "--set", "pool.phi=1.5", "--set",
                            "fixed_point.damping=0", "--set", "nonsense.key=1", "solve"});
    CHECK(r.code == 1);
    CHECK(r.err.find("grid.n_x") != std::string::npos);
    CHECK(r.err.find("pool.phi") != std::string::npos);
    CHECK(r.err.find("fixed_point.damping") != std::string::npos);
    CHECK(r.err.find("nonsense.key") != std::string::npos);

    auto const adm = run_cli({"--set", "control.a_max=150", "solve"});
    CHECK(adm.code == 1);
}

TEST_CASE("solve with a degenerate control set")
{
    auto const dir = scratch("solve");
    auto const r = run_cli(cat({"solve", "--kind", "f1", "--out", dir.string(), "--set",
                                "control.a_max=0"},
                               fast()));
    CHECK(r.code == 0);
    auto const doc = nlohmann::json::parse(slurp(dir / "solve.json"));
    CHECK(doc["converged"] == true);
    CHECK(doc["iterations"] == 1);
    CHECK(doc["meta"].contains("config_hash"));
    CHECK(doc["meta"]["config"]["control.a_max"] == "0");

    std::ifstream eq(dir / "equilibrium.csv");
    std::string line;
    std::getline(eq, line);
    CHECK(line.rfind("# config_hash=", 0) == 0);
    CHECK(line.find("seed=12345") != std::string::npos);
    std::getline(eq, line);
    CHECK(line == "t,m,C,R");
    std::size_t rows = 0;
    while (std::getline(eq, line))
    {
        ++rows;
        auto const c1 = line.find(',');
        CHECK(std::stod(line.substr(c1 + 1)) == 0.0);
    }
    CHECK(rows == 41);
    CHECK(slurp(dir / "policy.csv").rfind("# config_hash=", 0) == 0);
}

TEST_CASE("non-convergence exits 3 with partial outputs")
{
    auto const dir = scratch("nonconv");
    auto const r = run_cli(cat({"solve", "--kind", "f2", "--out", dir.string(), "--set",
                                "fixed_point.max_iters=1", "--set", "fixed_point.tol=1e-12"},
                               fast()));
    CHECK(r.code == 3);
    CHECK(fs::exists(dir / "equilibrium.csv"));
    CHECK(nlohmann::json::parse(slurp(dir / "solve.json"))["converged"] == false);
}

TEST_CASE("check on the default config")
{
    auto const dir = scratch("check");
    auto const r = run_cli({"check", "--samples", "5000", "--out", dir.string()});
    CHECK(r.code == 0);
    auto const doc = nlohmann::json::parse(slurp(dir / "check_report.json"));
    CHECK(doc["all_passed"] == true);
    std::vector<std::string> names;
    for (auto const& p : doc["properties"])
    {
        names.push_back(p["property"]);
        CHECK(p.contains("max_observed_slack"));
        CHECK(p["passed"] == true);
    }
    CHECK(names.size() == 6);
}

TEST_CASE("sweep writes one row per phi")
{
    auto const dir = scratch("sweep");
    auto const r = run_cli(cat({"sweep", "--phis", "0.9,0.99,0.997,1.0", "--out", dir.string(),
                                "--set", "fixed_point.max_iters=30"},
                               fast()));
    CHECK((r.code == 0 || r.code == 3));
    std::ifstream in(dir / "sweep.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# config_hash=", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("phi,spread_factor,", 0) == 0);
    std::vector<double> phis{0.9, 0.99, 0.997, 1.0};
    std::size_t i = 0;
    while (std::getline(in, line))
    {
        REQUIRE(i < phis.size());
        std::stringstream ss(line);
        std::string phi, spread;
        std::getline(ss, phi, ',');
        std::getline(ss, spread, ',');
        double const f = phis[i];
        CHECK(std::stod(phi) == f);
        CHECK(std::stod(spread) == doctest::Approx((1 - f) * (1 - f) / (2 * f)).epsilon(1e-15));
        ++i;
    }
    CHECK(i == 4);

    CHECK(run_cli({"sweep", "--phis", "0.9,abc"}).code == 1);
    CHECK(run_cli({"sweep", "--phis", "0.9,1.2"}).code == 1);
}

TEST_CASE("sandwich and simulate artifacts")
{
    auto const dir = scratch("sandwich");
    auto const s = run_cli(cat({"sandwich", "--out", dir.string()}, fast()));
    CHECK(s.code == 0);
    auto const doc = nlohmann::json::parse(slurp(dir / "sandwich.json"));
    CHECK(doc["ordering_holds"] == true);
    CHECK(doc["certificate"]["issued"] == true);
    CHECK(doc["meta"]["seed"] == 12345);

    auto const m = run_cli(cat({"simulate", "--n", "5", "--deviate", "--out", dir.string(),
                                "--set", "sim.n_reps=20"},
                               fast()));
    CHECK(m.code == 0);
    auto const sim = nlohmann::json::parse(slurp(dir / "sim_summary.json"));
    CHECK(sim["N"] == 5);
    CHECK(sim["n_reps"] == 20);
    CHECK(sim.contains("deviation_gain"));
    CHECK(slurp(dir / "sim_paths.csv").rfind("# config_hash=", 0) == 0);
}

TEST_CASE("outputs do not depend on the worker count")
{
    auto const a = scratch("w1");
    auto const b = scratch("w4");
    CHECK(run_cli(cat({"sandwich", "--workers", "1", "--out", a.string()}, fast())).code == 0);
    CHECK(run_cli(cat({"sandwich", "--workers", "4", "--out", b.string()}, fast())).code == 0);
    CHECK(slurp(a / "sandwich.json") == slurp(b / "sandwich.json"));
    CHECK(run_cli(cat({"solve", "--workers", "1", "--out", a.string()}, fast())).code == 0);
    CHECK(run_cli(cat({"solve", "--workers", "3", "--out", b.string()}, fast())).code == 0);
    for (char const* f : {"equilibrium.csv", "policy.csv", "solve.json"})
        CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("config file, overrides and the output directory variable")
{
    auto const dir = scratch("ini");
    fs::create_directories(dir);
    {
        std::ofstream ini(dir / "run.ini");
        ini << "; test config\n[grid]\nn_t = 40\nn_x = 101\nn_particles = 1500\n"
               "[control]\na_max = 0\n[reward]\ndenom_exp = 1\n";
    }
    auto const env_dir = dir / "from_env";
    ::setenv("AMMFG_OUT_DIR", env_dir.string().c_str(), 1);
    auto const r = run_cli({"--config", (dir / "run.ini").string(), "solve"});
    ::unsetenv("AMMFG_OUT_DIR");
    CHECK(r.code == 0);
    REQUIRE(fs::exists(env_dir / "solve.json"));
    auto const doc = nlohmann::json::parse(slurp(env_dir / "solve.json"));
    CHECK(doc["meta"]["config"]["reward.denom_exp"] == "1");
    CHECK(doc["meta"]["config"]["grid.n_t"] == "40");

    {
        std::ofstream bad(dir / "bad.ini");
        bad << "[grid]\nn_t = two\nwidth = 3\n";
    }
    auto const b = run_cli({"--config", (dir / "bad.ini").string(), "solve"});
    CHECK(b.code == 1);
    CHECK(b.err.find("grid.n_t") != std::string::npos);
    CHECK(b.err.find("grid.width") != std::string::npos);
    CHECK(run_cli({"--config", (dir / "missing.ini").string(), "solve"}).code == 1);
}

TEST_CASE("config hash tracks result-relevant settings only")
{
    RunConfig a, b;
    CHECK(a.hash() == b.hash());
    REQUIRE_FALSE(set_key(b, "pool.phi", "0.99"));
    CHECK(a.hash() != b.hash());
    RunConfig c;
    c.out_dir = "elsewhere";
    c.problem.workers = 7;
    CHECK(a.hash() == c.hash());
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}
