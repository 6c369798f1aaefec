#include "ammfg/cli_runner.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ammfg/errors.hpp"
#include "ammfg/run_config.hpp"

namespace ammfg {
namespace {

namespace fs = std::filesystem;

struct Artifacts
{
    fs::path dir;
    std::uint64_t hash;
    std::uint64_t seed;
    RunConfig const* cfg;

    std::string header() const
    {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "# config_hash=%016" PRIx64 " seed=%" PRIu64 "\n", hash, seed);
        return buf;
    }

    nlohmann::json meta() const
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
        nlohmann::json config;
        std::istringstream lines(cfg->canonical());
        for (std::string line; std::getline(lines, line);)
        {
            auto const eq = line.find('=');
            config[line.substr(0, eq)] = line.substr(eq + 1);
        }
        return {{"config_hash", buf}, {"seed", seed}, {"config", config}};
    }

    std::ofstream open(std::string const& name) const
    {
        fs::create_directories(dir);
        std::ofstream os(dir / name, std::ios::binary);
        if (!os)
            throw UsageError("cannot write " + (dir / name).string());
        return os;
    }

    template<class Writer>
    void csv(std::string const& name, Writer&& write) const
    {
        auto os = open(name);
        os << header();
        write(os);
    }

    void json(std::string const& name, nlohmann::json doc) const
    {
        doc["meta"] = meta();
        auto os = open(name);
        os << doc.dump(2) << '\n';
    }
};

std::vector<double> parse_list(std::string const& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
    {
        std::size_t used = 0;
        double v = std::stod(item, &used);
        if (used != item.size())
            throw UsageError("malformed number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

RewardVariant parse_kind(std::string const& s)
{
    if (s == "f")
        return RewardVariant::original;
    if (s == "f1")
        return RewardVariant::lower;
    if (s == "f2")
        return RewardVariant::upper;
    throw UsageError("unknown reward kind '" + s + "'");
}

int do_solve(RunConfig const& cfg, Artifacts const& art, std::string const& kind_name,
             std::ostream& out)
{
    RewardKind kind = cfg.reward;
    kind.variant = parse_kind(kind_name);
    auto const eq = solve_mfg(kind, cfg.fixed_point, cfg.problem);
    art.csv("equilibrium.csv", [&](std::ostream& os) { write_csv(os, eq.m_star); });
    art.csv("policy.csv", [&](std::ostream& os) { write_csv(os, eq.policy); });
    nlohmann::json doc;
    doc["kind"] = kind_name;
    doc["converged"] = eq.converged;
    doc["iterations"] = eq.iterations;
    doc["residuals"] = eq.residuals;
    doc["value"] = to_json(eq.value);
    doc["grid_warning"] = eq.grid_warning;
    if (eq.failure)
        doc["failure"] = *eq.failure;
    art.json("solve.json", doc);
    out << "solve " << kind_name << ": converged=" << eq.converged
        << " iterations=" << eq.iterations << " V=" << eq.value.mean
        << " +- " << eq.value.std_error << '\n';
    if (eq.failure)
        return exit_numerical;
    return eq.converged ? exit_ok : exit_not_converged;
}

int do_sandwich(RunConfig const& cfg, Artifacts const& art,
                std::optional<double> epsilon, std::ostream& out)
{
    auto const rep = sandwich_report(cfg.fixed_point, cfg.problem, cfg.reward);
    auto const cert = epsilon_nash_certificate(rep, epsilon);
    auto doc = to_json(rep);
    doc["certificate"] = to_json(cert);
    art.json("sandwich.json", doc);
    out << "sandwich: V_f1=" << (rep.V_f1 ? rep.V_f1->mean : NAN)
        << " V_f=" << (rep.V_f ? rep.V_f->mean : NAN)
        << " V_f2=" << (rep.V_f2 ? rep.V_f2->mean : NAN) << " gap=" << rep.gap
        << " ordering=" << (rep.ordering_holds ? "holds" : "VIOLATED") << '\n';
    if (!rep.complete() || !rep.ordering_holds)
        return exit_numerical;
    bool const converged = rep.lower->converged && rep.upper->converged;
    return converged ? exit_ok : exit_not_converged;
}

int do_sweep(RunConfig const& cfg, Artifacts const& art,
             std::vector<double> const& phis, std::ostream& out)
{
    for (double phi : phis)
    {
        PoolParams p = cfg.problem.pool;
        p.phi = phi;
        auto const bad = pool_violations(p, cfg.phi_floor);
        if (!bad.empty())
            throw DomainError("phi=" + std::to_string(phi) + ": " + bad.front());
    }
    auto const rows = phi_sweep(phis, cfg.fixed_point, cfg.problem, cfg.reward);
    art.csv("sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, rows); });
    int code = exit_ok;
    for (auto const& row : rows)
    {
        out << "phi=" << row.phi << " spread_factor=" << row.spread;
        if (!row.report || !row.report->complete())
        {
            out << " failed " << row.error << '\n';
            code = exit_numerical;
            continue;
        }
        out << " gap=" << row.report->gap << " gap_upper=" << row.report->gap_upper
            << '\n';
        if (code == exit_ok
            && !(row.report->lower->converged && row.report->upper->converged))
            code = exit_not_converged;
    }
    return code;
}

int do_simulate(RunConfig const& cfg, Artifacts const& art, std::size_t n,
                bool deviate, std::ostream& out)
{
    RewardKind kind = cfg.reward;
    kind.variant = RewardVariant::original;
    auto const eq = solve_mfg(kind, cfg.fixed_point, cfg.problem);
    SimConfig sc;
    sc.N = n;
    sc.seed = cfg.sim_seed;
    sc.policy = eq.policy;
    sc.use_mid_price = cfg.sim_use_mid_price;
    sc.mode = cfg.sim_mode;
    sc.p_min = cfg.sim_p_min;
    sc.n_reps = cfg.sim_reps;
    if (deviate)
        sc.deviant = own_impact_best_response(eq.m_star, kind, n, cfg.problem);
    auto const res = simulate(sc, cfg.problem);
    auto doc = to_json(res);
    doc["N"] = n;
    doc["mode"] = cfg.sim_mode == PriceMode::aggregate ? "aggregate" : "sequential";
    doc["policy_converged"] = eq.converged;
    art.json("sim_summary.json", doc);
    art.csv("sim_paths.csv", [&](std::ostream& os) {
        write_csv(os, res.first_paths, cfg.problem.grids.dt());
    });
    out << "simulate N=" << n << ": reps=" << res.n_reps << " aborted=" << res.aborted;
    if (res.deviation_gain)
        out << " deviation_gain=" << res.deviation_gain->mean << " +- "
            << res.deviation_gain->std_error;
    out << '\n';
    return eq.converged ? exit_ok : exit_not_converged;
}

int do_check(RunConfig const& cfg, Artifacts const& art, std::size_t samples,
             std::ostream& out)
{
    auto const domain = cfg.problem.sample_domain();
    std::uint64_t const seed = cfg.problem.grids.seed;
    nlohmann::json props = nlohmann::json::array();
    bool all = true;
    auto add = [&](std::string name, bool ok, double slack, nlohmann::json extra) {
        extra["property"] = name;
        extra["passed"] = ok;
        extra["max_observed_slack"] = slack;
        props.push_back(extra);
        all = all && ok;
        out << (ok ? "PASS " : "FAIL ") << name << " slack=" << slack << '\n';
    };

    for (auto v : {RewardVariant::original, RewardVariant::lower, RewardVariant::upper})
    {
        RewardKind k = cfg.reward;
        k.variant = v;
        auto const g = check_growth_bound(k, samples, seed, domain);
        add("growth_bound_" + to_string(v), g.ok(), 1.0 - g.max_ratio,
            {{"C", g.C}, {"max_ratio", g.max_ratio}});
    }
    auto const ord = check_ordering(cfg.reward, samples, seed, domain);
    add("ordering_f1_f_f2", ord.ok(), std::min(ord.min_lower_slack, ord.min_upper_slack),
        {{"min_f_minus_f1", ord.min_lower_slack},
         {"min_f2_minus_f", ord.min_upper_slack},
         {"violations", ord.violations}});
    auto const cc = check_concavity(cfg.reward, std::min<std::size_t>(samples, 1000),
                                    seed, domain);
    add("concavity_f1_f2", cc.ok(), std::max(cc.max_rel_err_lower, cc.max_abs_upper),
        {{"max_rel_err_f1", cc.max_rel_err_lower}, {"max_abs_d2_f2", cc.max_abs_upper}});

    // Strong vs change-of-measure value of the f2 best response to m = 0.
    RewardKind k2 = cfg.reward;
    k2.variant = RewardVariant::upper;
    auto const path = cfg.problem.constant_path(0.0);
    auto const policy = solve_hjb(path, k2, cfg.problem);
    auto const strong = evaluate(policy, path, k2, cfg.problem);
    auto const weak = girsanov_evaluate(policy, path, k2, cfg.problem);
    double const diff = std::abs(strong.mean - weak.value.mean);
    double const sig = combined_stderr(strong, weak.value);
    add("girsanov_agreement", diff <= 3.0 * sig, 3.0 * sig - diff,
        {{"strong", to_json(strong)}, {"weak", to_json(weak.value)},
         {"weight_mean", weak.weight_mean}});

    art.json("check_report.json", {{"properties", props}, {"all_passed", all}});
    return all ? exit_ok : exit_numerical;
}

}  // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Mean-field trading on a constant-product pool with fees"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_file;
    std::vector<std::string> overrides;
    std::string out_dir;
    unsigned workers = 0;
    app.add_option("--config", config_file, "INI configuration file");
    app.add_option("--set", overrides, "section.key=value override")->take_all();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker threads (default: all cores)");

    std::string kind = "f";
    auto* solve = app.add_subcommand("solve", "solve one mean field game");
    solve->add_option("--kind", kind, "f, f1 or f2")
        ->check(CLI::IsMember({"f", "f1", "f2"}));

    std::optional<double> epsilon;
    auto* sandwich = app.add_subcommand("sandwich", "values of f1, f, f2 and certificate");
    sandwich->add_option("--epsilon", epsilon, "target epsilon for the certificate");

    std::string phis = "0.9,0.99,0.997,0.9999,1.0";
    auto* sweep = app.add_subcommand("sweep", "sandwich gap across fee levels");
    sweep->add_option("--phis", phis, "comma-separated fee factors");

    std::size_t n_traders = 10;
    bool deviate = false;
    auto* sim = app.add_subcommand("simulate", "finite-N trader simulation");
    sim->add_option("--n", n_traders, "number of traders");
    sim->add_flag("--deviate", deviate, "trader 0 plays its own-impact best response");

    std::size_t samples = 100000;
    auto* check = app.add_subcommand("check", "property suites");
    check->add_option("--samples", samples, "samples per sampled property");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try
    {
        app.parse(argv_rev);
    }
    catch (CLI::CallForHelp const&)
    {
        out << app.help();
        return exit_ok;
    }
    catch (CLI::ParseError const& e)
    {
        err << "usage error: " << e.what() << '\n' << app.help();
        return exit_validation;
    }

    RunConfig cfg;
    std::vector<std::string> problems;
    if (!config_file.empty())
    {
        std::ifstream in(config_file);
        if (!in)
            problems.push_back("cannot open config file " + config_file);
        else
            for (auto& e : load_ini(cfg, in))
                problems.push_back(std::move(e));
    }
    for (auto const& o : overrides)
    {
        auto const eq = o.find('=');
        if (eq == std::string::npos)
        {
            problems.push_back("override '" + o + "' is not key=value");
            continue;
        }
        if (auto e = set_key(cfg, o.substr(0, eq), o.substr(eq + 1)))
            problems.push_back(*e);
    }
    cfg.sync_costs();
    for (auto& v : cfg.violations())
        problems.push_back(std::move(v));
    if (!problems.empty())
    {
        err << "invalid configuration:\n";
        for (auto const& p : problems)
            err << "  " << p << '\n';
        return exit_validation;
    }

    if (char const* env = std::getenv("AMMFG_OUT_DIR"); env && *env)
        cfg.out_dir = env;
    if (!out_dir.empty())
        cfg.out_dir = out_dir;
    if (workers > 0)
        cfg.problem.workers = workers;

    Artifacts art{cfg.out_dir, cfg.hash(), cfg.problem.grids.seed, &cfg};
    try
    {
        if (*solve)
            return do_solve(cfg, art, kind, out);
        if (*sandwich)
            return do_sandwich(cfg, art, epsilon, out);
        if (*sweep)
            return do_sweep(cfg, art, parse_list(phis), out);
        if (*sim)
            return do_simulate(cfg, art, n_traders, deviate, out);
        if (*check)
            return do_check(cfg, art, samples, out);
    }
    catch (UsageError const& e)
    {
        err << "usage error: " << e.what() << '\n';
        return exit_validation;
    }
    catch (DomainError const& e)
    {
        err << "validation error: " << e.what() << '\n';
        return exit_validation;
    }
    catch (AdmissibilityError const& e)
    {
        err << "validation error: " << e.what() << '\n';
        return exit_validation;
    }
    catch (std::invalid_argument const& e)
    {
        err << "usage error: " << e.what() << '\n';
        return exit_validation;
    }
    catch (Error const& e)
    {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_validation;
}

int run(int argc, char const* const* argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace ammfg
