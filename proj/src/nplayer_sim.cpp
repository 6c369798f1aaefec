#include "ammfg/nplayer_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ammfg/errors.hpp"
#include "ammfg/random.hpp"

namespace ammfg {
namespace {

double clamp_control(Problem const& problem, double a)
{
    return std::min(std::max(a, problem.bounds.a_min), problem.bounds.a_max);
}

}  // namespace

Replication simulate_replication(SimConfig const& config,
                                 Problem const& problem,
                                 std::size_t rep,
                                 bool deviate)
{
    if (config.N < 1)
        throw UsageError("simulation needs N >= 1");
    if (deviate && !config.deviant)
        throw UsageError("deviation requested without a deviant policy");
    auto const& g = problem.grids;
    auto const& pool = problem.pool;
    std::size_t const N = config.N;
    double const dt = g.dt();
    double const sqdt = std::sqrt(dt);
    double const unit_factor = config.use_mid_price ? mid_price_factor(pool.phi) : 1.0;

    Replication out;
    out.profits.assign(N, 0.0);
    std::vector<double> x(N), y(N, 0.0), x0(N), cost(N, 0.0), a(N);
    std::vector<CounterRng> noise;
    noise.reserve(N);
    for (std::size_t i = 0; i < N; ++i)
    {
        CounterRng const init(config.seed, StreamTag::initial_state, rep, i + 1);
        x0[i] = x[i] = problem.law0.mean + problem.law0.sd * init.normal(0);
        noise.emplace_back(config.seed, StreamTag::increment, rep, i + 1);
    }
    CounterRng const price_rng(config.seed, StreamTag::price_noise, rep);

    PoolState state = PoolState::initial(pool);
    double flow = 0;  // aggregate Delta^X so far
    double shock = 0;
    double const p0 = pool.initial_price();
    double price = p0;
    double price_clean = p0;

    auto policy_for = [&](std::size_t i) -> Policy const& {
        return (deviate && i == 0) ? *config.deviant : config.policy;
    };
    auto record = [&](double m) {
        out.paths.X.push_back(state.X);
        out.paths.Y.push_back(state.Y);
        out.paths.k.push_back(state.k);
        out.paths.price.push_back(price);
        out.paths.mean_control.push_back(m);
    };

    try
    {
        for (std::size_t k = 0; k <= g.n_t; ++k)
        {
            double m = 0;
            for (std::size_t i = 0; i < N; ++i)
            {
                a[i] = clamp_control(problem, policy_for(i).control(k, x[i]));
                m += a[i];
            }
            m /= static_cast<double>(N);
            record(m);
            if (k == g.n_t)
                break;

            double const t = g.time(k);
            double const unit_cost = unit_factor * price;
            if (config.use_mid_price && price == price_clean)
            {
                double const mid = bid_ask_mid(price, pool.phi).mid;
                out.max_mid_error = std::max(out.max_mid_error,
                                             std::abs(unit_cost - mid) / mid);
            }
            for (std::size_t i = 0; i < N; ++i)
            {
                y[i] -= a[i] * unit_cost * dt;
                cost[i] += problem.costs.holding(t, x[i]) * dt;
                x[i] += a[i] * dt + problem.sigma * sqdt * noise[i].normal(k);
            }

            double const trade = -m * dt;
            flow += trade;
            double const k_before = state.k;
            if (config.mode == PriceMode::aggregate)
            {
                price_clean = price_after_aggregate(pool, flow);
                state.X = pool.X0 + flow;
                state.k = invariant_after_aggregate(pool, flow);
                state.Y = state.k / state.X;
            }
            else
            {
                state = execute_swap(state, trade, pool.phi).new_state;
                price_clean = spot_price(state);
                if (state.k < k_before * (1.0 - 1e-12))
                    out.k_monotone = false;
            }
            shock += pool.sigma0 * sqdt * price_rng.normal(k);
            price = price_clean + shock;
            if (price < config.p_min)
            {
                price = config.p_min;
                ++out.floor_events;
            }
        }
    }
    catch (ReserveDepletionError const&)
    {
        out.aborted = true;
        return out;
    }

    for (std::size_t i = 0; i < N; ++i)
        out.profits[i] = (y[i] + x[i] * price) - x0[i] * p0 - cost[i]
                         - problem.costs.terminal(x[i]);
    return out;
}

GainEstimate deviation_gain(SimConfig const& config,
                            std::size_t n_reps,
                            Problem const& problem)
{
    if (!config.deviant)
        throw UsageError("deviation gain needs a deviant policy");
    std::vector<double> gains(n_reps, 0.0);
    std::vector<char> ok(n_reps, 0);
    parallel_for(n_reps, problem.workers, [&](std::size_t r) {
        auto const dev = simulate_replication(config, problem, r, true);
        auto const conf = simulate_replication(config, problem, r, false);
        if (dev.aborted || conf.aborted)
            return;
        gains[r] = dev.profits[0] - conf.profits[0];
        ok[r] = 1;
    });

    GainEstimate est;
    double sum = 0;
    for (std::size_t r = 0; r < n_reps; ++r)
        if (ok[r])
        {
            sum += gains[r];
            ++est.n_reps;
        }
    est.aborted = n_reps - est.n_reps;
    if (est.n_reps == 0)
        return est;
    double const n = static_cast<double>(est.n_reps);
    est.mean = sum / n;
    double ss = 0;
    for (std::size_t r = 0; r < n_reps; ++r)
        if (ok[r])
            ss += (gains[r] - est.mean) * (gains[r] - est.mean);
    est.std_error = est.n_reps > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    est.ci_low = est.mean - 1.96 * est.std_error;
    est.ci_high = est.mean + 1.96 * est.std_error;
    return est;
}

SimResult simulate(SimConfig const& config, Problem const& problem)
{
    std::size_t const n = config.n_reps;
    std::vector<Replication> reps(n);
    parallel_for(n, problem.workers, [&](std::size_t r) {
        reps[r] = simulate_replication(config, problem, r, false);
    });

    SimResult res;
    res.n_reps = n;
    std::size_t const N = config.N;
    std::size_t const nodes = problem.grids.n_t + 1;
    res.mean_profits.assign(N, 0.0);
    res.profit_stderr.assign(N, 0.0);
    res.mean_control.assign(nodes, 0.0);
    std::size_t good = 0;
    for (auto const& r : reps)
    {
        res.floor_events += r.floor_events;
        res.k_monotone = res.k_monotone && r.k_monotone;
        res.max_mid_error = std::max(res.max_mid_error, r.max_mid_error);
        if (r.aborted)
        {
            ++res.aborted;
            continue;
        }
        ++good;
        for (std::size_t i = 0; i < N; ++i)
            res.mean_profits[i] += r.profits[i];
        for (std::size_t k = 0; k < nodes; ++k)
            res.mean_control[k] += r.paths.mean_control[k];
    }
    if (good > 0)
    {
        double const gd = static_cast<double>(good);
        for (auto& v : res.mean_profits)
            v /= gd;
        for (auto& v : res.mean_control)
            v /= gd;
        if (good > 1)
            for (std::size_t i = 0; i < N; ++i)
            {
                double ss = 0;
                for (auto const& r : reps)
                    if (!r.aborted)
                        ss += (r.profits[i] - res.mean_profits[i])
                              * (r.profits[i] - res.mean_profits[i]);
                res.profit_stderr[i] = std::sqrt(ss / (gd - 1.0) / gd);
            }
    }
    if (!reps.empty())
        res.first_paths = reps.front().paths;
    if (config.deviant)
        res.deviation_gain = deviation_gain(config, n, problem);
    return res;
}

Policy own_impact_best_response(MeanControlPath const& path,
                                RewardKind const& kind,
                                std::size_t N,
                                Problem const& problem)
{
    if (N < 1)
        throw UsageError("own-impact response needs N >= 1");
    auto const base = kind_reward(kind, path, problem);
    std::vector<double> unit(path.size());
    for (std::size_t k = 0; k < path.size(); ++k)
        unit[k] = gamma(PathPoint{1.0, path.node(k).C}, problem.pool, path.eps0());
    double const share = 1.0 / static_cast<double>(N);
    return solve_hjb(
        [&](std::size_t k, double x, double a) {
            return base(k, x, a) + x * a * unit[k] * share;
        },
        problem);
}

void write_csv(std::ostream& os, PoolPaths const& paths, double dt)
{
    os << "t,pool_X,pool_Y,k,P\n";
    char buf[160];
    for (std::size_t k = 0; k < paths.X.size(); ++k)
    {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      dt * static_cast<double>(k), paths.X[k], paths.Y[k],
                      paths.k[k], paths.price[k]);
        os << buf;
    }
}

nlohmann::json to_json(SimResult const& r)
{
    nlohmann::json j;
    j["n_reps"] = r.n_reps;
    j["aborted"] = r.aborted;
    j["price_floor_events"] = r.floor_events;
    j["k_monotone"] = r.k_monotone;
    j["max_mid_price_error"] = r.max_mid_error;
    j["mean_profits"] = r.mean_profits;
    j["profit_stderr"] = r.profit_stderr;
    j["mean_control"] = r.mean_control;
    if (r.deviation_gain)
    {
        auto const& g = *r.deviation_gain;
        j["deviation_gain"] = {{"mean", g.mean},     {"stderr", g.std_error},
                               {"ci_low", g.ci_low}, {"ci_high", g.ci_high},
                               {"n_reps", g.n_reps}, {"aborted", g.aborted}};
    }
    return j;
}

}  // namespace ammfg
