#include "ammfg/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>

namespace ammfg {
namespace {

using Getter = std::function<std::string(RunConfig const&)>;
using Setter = std::function<bool(RunConfig&, std::string const&)>;

struct Field
{
    Getter get;
    Setter set;
};

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool parse(std::string const& s, double& out)
{
    char const* b = s.data();
    char const* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

template<class Int>
bool parse_int(std::string const& s, Int& out)
{
    char const* b = s.data();
    char const* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

bool parse_bool(std::string const& s, bool& out)
{
    if (s == "true" || s == "1" || s == "yes")
        out = true;
    else if (s == "false" || s == "0" || s == "no")
        out = false;
    else
        return false;
    return true;
}

template<class M>
Field real(M member)
{
    return {[member](RunConfig const& c) { return fmt(member(const_cast<RunConfig&>(c))); },
            [member](RunConfig& c, std::string const& v) { return parse(v, member(c)); }};
}

template<class M>
Field integer(M member)
{
    return {[member](RunConfig const& c) {
                return std::to_string(member(const_cast<RunConfig&>(c)));
            },
            [member](RunConfig& c, std::string const& v) {
                return parse_int(v, member(c));
            }};
}

std::map<std::string, Field> const& fields()
{
    static std::map<std::string, Field> const table = [] {
        std::map<std::string, Field> t;
        t["pool.X0"] = real([](RunConfig& c) -> double& { return c.problem.pool.X0; });
        t["pool.k0"] = real([](RunConfig& c) -> double& { return c.problem.pool.k0; });
        t["pool.phi"] = real([](RunConfig& c) -> double& { return c.problem.pool.phi; });
        t["pool.sigma0"] = real([](RunConfig& c) -> double& { return c.problem.pool.sigma0; });
        t["pool.phi_floor"] = real([](RunConfig& c) -> double& { return c.phi_floor; });
        t["costs.kappa"] = real([](RunConfig& c) -> double& { return c.kappa; });
        t["costs.gamma"] = real([](RunConfig& c) -> double& { return c.gamma; });
        t["costs.c1"] = {[](RunConfig const& c) {
                             return c.c1 ? fmt(*c.c1) : std::string("auto");
                         },
                         [](RunConfig& c, std::string const& v) {
                             if (v == "auto")
                             {
                                 c.c1.reset();
                                 return true;
                             }
                             double d;
                             if (!parse(v, d))
                                 return false;
                             c.c1 = d;
                             return true;
                         }};
        t["grid.T"] = real([](RunConfig& c) -> double& { return c.problem.grids.T; });
        t["grid.n_t"] = integer([](RunConfig& c) -> std::size_t& { return c.problem.grids.n_t; });
        t["grid.x_min"] = real([](RunConfig& c) -> double& { return c.problem.grids.x_min; });
        t["grid.x_max"] = real([](RunConfig& c) -> double& { return c.problem.grids.x_max; });
        t["grid.n_x"] = integer([](RunConfig& c) -> std::size_t& { return c.problem.grids.n_x; });
        t["grid.n_a"] = integer([](RunConfig& c) -> std::size_t& { return c.problem.grids.n_a; });
        t["grid.n_particles"] = integer([](RunConfig& c) -> std::size_t& {
            return c.problem.grids.n_particles;
        });
        t["grid.seed"] = integer([](RunConfig& c) -> std::uint64_t& { return c.problem.grids.seed; });
        t["grid.gh_nodes"] = integer([](RunConfig& c) -> std::size_t& { return c.problem.gh_nodes; });
        t["control.a_min"] = real([](RunConfig& c) -> double& { return c.problem.bounds.a_min; });
        t["control.a_max"] = real([](RunConfig& c) -> double& { return c.problem.bounds.a_max; });
        t["dynamics.sigma"] = real([](RunConfig& c) -> double& { return c.problem.sigma; });
        t["dynamics.x0_mean"] = real([](RunConfig& c) -> double& { return c.problem.law0.mean; });
        t["dynamics.x0_sd"] = real([](RunConfig& c) -> double& { return c.problem.law0.sd; });
        t["reward.young_eps"] = real([](RunConfig& c) -> double& { return c.reward.young_eps; });
        t["reward.denom_exp"] = integer([](RunConfig& c) -> int& { return c.reward.denom_exp; });
        t["fixed_point.damping"] = real([](RunConfig& c) -> double& { return c.fixed_point.damping; });
        t["fixed_point.max_iters"] = integer([](RunConfig& c) -> std::size_t& {
            return c.fixed_point.max_iters;
        });
        t["fixed_point.tol"] = real([](RunConfig& c) -> double& { return c.fixed_point.tol; });
        t["sim.N"] = integer([](RunConfig& c) -> std::size_t& { return c.sim_N; });
        t["sim.n_reps"] = integer([](RunConfig& c) -> std::size_t& { return c.sim_reps; });
        t["sim.use_mid_price"] = {[](RunConfig const& c) {
                                      return std::string(c.sim_use_mid_price ? "true" : "false");
                                  },
                                  [](RunConfig& c, std::string const& v) {
                                      return parse_bool(v, c.sim_use_mid_price);
                                  }};
        t["sim.mode"] = {[](RunConfig const& c) {
                             return std::string(c.sim_mode == PriceMode::aggregate
                                                    ? "aggregate"
                                                    : "sequential");
                         },
                         [](RunConfig& c, std::string const& v) {
                             if (v == "aggregate")
                                 c.sim_mode = PriceMode::aggregate;
                             else if (v == "sequential")
                                 c.sim_mode = PriceMode::sequential;
                             else
                                 return false;
                             return true;
                         }};
        t["sim.p_min"] = real([](RunConfig& c) -> double& { return c.sim_p_min; });
        t["sim.seed"] = integer([](RunConfig& c) -> std::uint64_t& { return c.sim_seed; });
        return t;
    }();
    return table;
}

}  // namespace

void RunConfig::sync_costs()
{
    problem.costs = CostSpec::quadratic(kappa, gamma);
    if (c1)
        problem.costs.c1 = *c1;
}

std::vector<std::string> RunConfig::violations() const
{
    auto out = problem_violations(problem, phi_floor);
    if (!(kappa >= 0.0))
        out.push_back("costs.kappa must be >= 0");
    if (!(gamma >= 0.0))
        out.push_back("costs.gamma must be >= 0");
    if (c1 && !(*c1 > 0.0))
        out.push_back("costs.c1 must be > 0");
    else if (c1 && (kappa > 0.0 || gamma > 0.0))
    {
        // (kappa + gamma) x^2 <= c1 exp(c1 |x|) on the state grid.
        auto const& g = problem.grids;
        for (std::size_t j = 0; j < std::max<std::size_t>(g.n_x, 2); ++j)
        {
            double const x = g.state(j);
            if ((kappa + gamma) * x * x > *c1 * std::exp(*c1 * std::abs(x)))
            {
                out.push_back("costs.c1 too small for the growth bound on the state grid");
                break;
            }
        }
    }
    for (auto& s : reward_kind_violations(reward))
        out.push_back(std::move(s));
    for (auto& s : fixed_point_violations(fixed_point))
        out.push_back(std::move(s));
    if (sim_N < 1)
        out.push_back("sim.N must be >= 1");
    if (sim_reps < 1)
        out.push_back("sim.n_reps must be >= 1");
    if (!(sim_p_min > 0.0))
        out.push_back("sim.p_min must be > 0");
    return out;
}

std::vector<std::string> const& config_keys()
{
    static std::vector<std::string> const keys = [] {
        std::vector<std::string> k;
        for (auto const& [name, f] : fields())
            k.push_back(name);
        return k;
    }();
    return keys;
}

std::string RunConfig::canonical() const
{
    std::ostringstream os;
    for (auto const& [name, f] : fields())
        os << name << '=' << f.get(*this) << '\n';
    return os.str();
}

std::uint64_t fnv1a64(std::string const& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t RunConfig::hash() const
{
    return fnv1a64(canonical());
}

std::optional<std::string> set_key(RunConfig& cfg,
                                   std::string const& key,
                                   std::string const& value)
{
    auto const it = fields().find(key);
    if (it == fields().end())
        return "unknown configuration key '" + key + "'";
    if (!it->second.set(cfg, value))
        return "malformed value '" + value + "' for " + key;
    if (key.rfind("costs.", 0) == 0)
        cfg.sync_costs();
    return std::nullopt;
}

std::vector<std::string> load_ini(RunConfig& cfg, std::istream& in)
{
    std::vector<std::string> errors;
    std::vector<CLI::ConfigItem> items;
    try
    {
        items = CLI::ConfigINI().from_config(in);
    }
    catch (CLI::Error const& e)
    {
        errors.push_back(std::string("config parse error: ") + e.what());
        return errors;
    }
    for (auto const& item : items)
    {
        if (item.name == "++" || item.name == "--")
            continue;
        if (item.inputs.size() != 1)
        {
            errors.push_back("expected one value for " + item.fullname());
            continue;
        }
        if (auto err = set_key(cfg, item.fullname(), item.inputs.front()))
            errors.push_back(*err);
    }
    return errors;
}

}  // namespace ammfg
