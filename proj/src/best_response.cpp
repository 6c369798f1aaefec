#include "ammfg/best_response.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "ammfg/errors.hpp"
#include "ammfg/quadrature.hpp"
#include "ammfg/random.hpp"

namespace ammfg {
namespace {

double clamp_to(double x, double lo, double hi)
{
    return std::min(std::max(x, lo), hi);
}

ValueReport summarize(std::vector<double> samples)
{
    ValueReport r;
    r.n_paths = samples.size();
    if (samples.empty())
        return r;
    double const n = static_cast<double>(samples.size());
    double sum = 0;
    for (double s : samples)
        sum += s;
    r.mean = sum / n;
    double ss = 0;
    for (double s : samples)
        ss += (s - r.mean) * (s - r.mean);
    r.std_error = samples.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    r.samples = std::move(samples);
    return r;
}

double initial_state(Problem const& problem, std::size_t p)
{
    CounterRng rng(problem.grids.seed, StreamTag::initial_state, p);
    return problem.law0.mean + problem.law0.sd * rng.normal(0);
}

double bounded_control(Policy const& policy, Problem const& problem,
                       std::size_t k, double x)
{
    return clamp_to(policy.control(k, x), problem.bounds.a_min,
                    problem.bounds.a_max);
}

void require_shape(Policy const& policy, Grids const& g)
{
    if (policy.n_t() != g.n_t || policy.n_x() != g.n_x)
        throw UsageError("policy table does not match the grid");
}

}  // namespace

StageReward kind_reward(RewardKind const& kind,
                        MeanControlPath const& path,
                        Problem const& problem)
{
    auto const& g = problem.grids;
    if (path.size() != g.n_t + 1)
        throw UsageError("mean path does not match the time grid");
    auto const bc = problem.bound_constants();
    std::vector<StageCoefficients> stages(g.n_t + 1);
    for (std::size_t k = 0; k <= g.n_t; ++k)
    {
        try
        {
            stages[k] = stage_coefficients(kind, g.time(k), path.node(k),
                                           problem.pool, bc);
        }
        catch (AdmissibilityError const& e)
        {
            throw AdmissibilityError(e.what(), k);
        }
    }
    return [stages = std::move(stages), costs = problem.costs](
               std::size_t k, double x, double a) {
        auto const& s = stages[k];
        return x * s.gamma + s.fee_term(a) - costs.holding(s.t, x);
    };
}

//---------------------------------------------------------------------------//

Policy::Policy(Grids const& g, std::vector<double> control, std::vector<double> value)
    : n_t_(g.n_t),
      n_x_(g.n_x),
      x_min_(g.x_min),
      dx_(g.dx()),
      dt_(g.dt()),
      control_(std::move(control)),
      value_(std::move(value))
{
    std::size_t const expect = (n_t_ + 1) * n_x_;
    if (control_.size() != expect || (!value_.empty() && value_.size() != expect))
        throw UsageError("policy table size does not match the grid");
}

Policy Policy::from_controls(Grids const& g, std::vector<double> control)
{
    return Policy(g, std::move(control), {});
}

Policy Policy::constant(Grids const& g, double a)
{
    return from_controls(g, std::vector<double>((g.n_t + 1) * g.n_x, a));
}

double Policy::interp(std::vector<double> const& table, std::size_t k, double x) const
{
    double const pos = (x - x_min_) / dx_;
    double const* row = table.data() + k * n_x_;
    if (!(pos > 0.0))
        return row[0];
    if (pos >= static_cast<double>(n_x_ - 1))
        return row[n_x_ - 1];
    auto const j = static_cast<std::size_t>(pos);
    double const w = pos - static_cast<double>(j);
    return row[j] + w * (row[j + 1] - row[j]);
}

void write_csv(std::ostream& os, Policy const& policy)
{
    os << "t,x,a,V\n";
    char buf[160];
    for (std::size_t k = 0; k <= policy.n_t_; ++k)
        for (std::size_t j = 0; j < policy.n_x_; ++j)
        {
            double const v = policy.has_values() ? policy.value_node(k, j)
                                                 : std::nan("");
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n",
                          policy.dt_ * static_cast<double>(k), policy.state(j),
                          policy.control_node(k, j), v);
            os << buf;
        }
}

double LawFlow::mean(std::size_t k) const
{
    double s = 0;
    for (std::size_t p = 0; p < n_particles; ++p)
        s += at(k, p);
    return s / static_cast<double>(n_particles);
}

double combined_stderr(ValueReport const& a, ValueReport const& b)
{
    return std::hypot(a.std_error, b.std_error);
}

PairedDifference paired_difference(ValueReport const& a, ValueReport const& b)
{
    if (a.samples.size() != b.samples.size() || a.samples.empty())
        throw UsageError("paired difference needs equal, non-empty sample sets");
    std::vector<double> d(a.samples.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = a.samples[i] - b.samples[i];
    auto const s = summarize(std::move(d));
    return {s.mean, s.std_error};
}

//---------------------------------------------------------------------------//

Policy solve_hjb(StageReward const& reward, Problem const& problem)
{
    auto const& g = problem.grids;
    auto const controls = problem.bounds.control_grid(g.n_a);
    // Search order realizes the tie-break: smallest |a|, then smallest a.
    std::vector<std::size_t> order(controls.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        double const ai = std::abs(controls[i]), aj = std::abs(controls[j]);
        return ai != aj ? ai < aj : controls[i] < controls[j];
    });

    GaussHermite const gh(problem.gh_nodes);
    std::size_t const nx = g.n_x;
    std::size_t const nq = gh.nodes.size();
    double const dt = g.dt();
    double const dx = g.dx();
    double const noise = problem.sigma * std::sqrt(dt);

    std::vector<double> value((g.n_t + 1) * nx);
    std::vector<double> control((g.n_t + 1) * nx);
    for (std::size_t j = 0; j < nx; ++j)
        value[g.n_t * nx + j] = terminal_reward(g.state(j), problem.costs);

    auto interp = [&](double const* row, double y) {
        double const pos = (y - g.x_min) / dx;
        if (!(pos > 0.0))
            return row[0];
        if (pos >= static_cast<double>(nx - 1))
            return row[nx - 1];
        auto const i = static_cast<std::size_t>(pos);
        double const w = pos - static_cast<double>(i);
        return row[i] + w * (row[i + 1] - row[i]);
    };

    for (std::size_t kk = g.n_t; kk-- > 0;)
    {
        double const* next = value.data() + (kk + 1) * nx;
        double* row = value.data() + kk * nx;
        double* arow = control.data() + kk * nx;
        for (std::size_t j = 0; j < nx; ++j)
        {
            double const x = g.state(j);
            double best = -std::numeric_limits<double>::infinity();
            double best_a = controls[order[0]];
            for (std::size_t idx : order)
            {
                double const a = controls[idx];
                double cont = 0;
                for (std::size_t q = 0; q < nq; ++q)
                    cont += gh.weights[q]
                            * interp(next, x + a * dt + noise * gh.nodes[q]);
                double const v = reward(kk, x, a) * dt + cont;
                if (v > best)
                {
                    best = v;
                    best_a = a;
                }
            }
            if (!std::isfinite(best))
                throw NumericalFailure("non-finite value in backward induction");
            row[j] = best;
            arow[j] = best_a;
        }
    }
    std::copy_n(control.data() + (g.n_t - 1) * nx, nx, control.data() + g.n_t * nx);
    return Policy(g, std::move(control), std::move(value));
}

Policy solve_hjb(MeanControlPath const& path,
                 RewardKind const& kind,
                 Problem const& problem)
{
    return solve_hjb(kind_reward(kind, path, problem), problem);
}

//---------------------------------------------------------------------------//

Propagation propagate(Policy const& policy, Problem const& problem)
{
    auto const& g = problem.grids;
    require_shape(policy, g);
    std::size_t const n = g.n_particles;
    std::size_t const nodes = g.n_t + 1;
    double const dt = g.dt();
    double const noise = problem.sigma * std::sqrt(dt);

    Propagation out;
    out.law.n_nodes = nodes;
    out.law.n_particles = n;
    out.law.particles.assign(nodes * n, 0.0);
    std::vector<double> actions(nodes * n);
    std::vector<std::size_t> clamps(n, 0);

    parallel_for(n, problem.workers, [&](std::size_t p) {
        CounterRng const rng(g.seed, StreamTag::increment, p);
        double x = initial_state(problem, p);
        for (std::size_t k = 0; k < nodes; ++k)
        {
            out.law.particles[k * n + p] = x;
            double const a = bounded_control(policy, problem, k, x);
            actions[k * n + p] = a;
            if (k + 1 == nodes)
                break;
            double y = x + a * dt + noise * rng.normal(k);
            if (y < g.x_min || y > g.x_max)
            {
                ++clamps[p];
                y = clamp_to(y, g.x_min, g.x_max);
            }
            x = y;
        }
    });

    std::vector<double> m(nodes, 0.0);
    for (std::size_t k = 0; k < nodes; ++k)
    {
        double s = 0;
        for (std::size_t p = 0; p < n; ++p)
            s += actions[k * n + p];
        m[k] = s / static_cast<double>(n);
    }
    std::size_t exited = 0;
    for (std::size_t c : clamps)
    {
        out.clamp_events += c;
        exited += c > 0;
    }
    out.exit_fraction = static_cast<double>(exited) / static_cast<double>(n);
    out.grid_warning = out.exit_fraction > 0.01;
    out.mean_path = problem.path(m);
    return out;
}

ValueReport evaluate(Policy const& policy,
                     StageReward const& reward,
                     Problem const& problem)
{
    auto const& g = problem.grids;
    require_shape(policy, g);
    std::size_t const n = g.n_particles;
    double const dt = g.dt();
    double const noise = problem.sigma * std::sqrt(dt);
    std::vector<double> samples(n);

    parallel_for(n, problem.workers, [&](std::size_t p) {
        CounterRng const rng(g.seed, StreamTag::increment, p);
        double x = initial_state(problem, p);
        double total = 0;
        for (std::size_t k = 0; k < g.n_t; ++k)
        {
            double const a = bounded_control(policy, problem, k, x);
            total += reward(k, x, a) * dt;
            x = clamp_to(x + a * dt + noise * rng.normal(k), g.x_min, g.x_max);
        }
        samples[p] = total + terminal_reward(x, problem.costs);
    });
    return summarize(std::move(samples));
}

ValueReport evaluate(Policy const& policy,
                     MeanControlPath const& path,
                     RewardKind const& kind,
                     Problem const& problem)
{
    return evaluate(policy, kind_reward(kind, path, problem), problem);
}

GirsanovReport girsanov_evaluate(Policy const& policy,
                                 StageReward const& reward,
                                 Problem const& problem)
{
    if (!(problem.sigma > 0.0))
        throw DomainError("change of measure needs sigma > 0");
    auto const& g = problem.grids;
    require_shape(policy, g);
    std::size_t const n = g.n_particles;
    double const dt = g.dt();
    double const sqdt = std::sqrt(dt);
    double const inv_sigma = 1.0 / problem.sigma;
    std::vector<double> weighted(n);
    std::vector<double> weights(n);

    parallel_for(n, problem.workers, [&](std::size_t p) {
        CounterRng const rng(g.seed, StreamTag::increment, p);
        double x = initial_state(problem, p);
        double total = 0;
        double log_w = 0;
        for (std::size_t k = 0; k < g.n_t; ++k)
        {
            double const a = bounded_control(policy, problem, k, x);
            total += reward(k, x, a) * dt;
            double const dw = sqdt * rng.normal(k);
            double const theta = a * inv_sigma;
            log_w += theta * dw - 0.5 * theta * theta * dt;
            x += problem.sigma * dw;
        }
        total += terminal_reward(x, problem.costs);
        double const w = std::exp(log_w);
        weights[p] = w;
        weighted[p] = w * total;
    });

    GirsanovReport out;
    auto const ws = summarize(std::move(weights));
    out.weight_mean = ws.mean;
    out.weight_stderr = ws.std_error;
    out.value = summarize(std::move(weighted));
    return out;
}

GirsanovReport girsanov_evaluate(Policy const& policy,
                                 MeanControlPath const& path,
                                 RewardKind const& kind,
                                 Problem const& problem)
{
    return girsanov_evaluate(policy, kind_reward(kind, path, problem), problem);
}

double grid_value(Policy const& policy, Problem const& problem)
{
    if (!policy.has_values())
        throw UsageError("policy has no value surface");
    if (problem.law0.sd == 0.0)
        return policy.value(0, problem.law0.mean);
    GaussHermite const gh(40);
    double v = 0;
    for (std::size_t q = 0; q < gh.nodes.size(); ++q)
        v += gh.weights[q]
             * policy.value(0, problem.law0.mean + problem.law0.sd * gh.nodes[q]);
    return v;
}

double grid_bias_budget(Policy const& policy, Problem const& problem)
{
    if (!policy.has_values())
        throw UsageError("policy has no value surface");
    auto const& g = problem.grids;
    double const dx = g.dx();
    double curv = 0;
    for (std::size_t k = 0; k <= g.n_t; ++k)
        for (std::size_t j = 1; j + 1 < g.n_x; ++j)
        {
            double const d2 = policy.value_node(k, j + 1) - 2.0 * policy.value_node(k, j)
                              + policy.value_node(k, j - 1);
            curv = std::max(curv, std::abs(d2) / (dx * dx));
        }
    return static_cast<double>(g.n_t) * dx * dx / 8.0 * curv;
}

}  // namespace ammfg
