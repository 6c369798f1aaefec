#include "ammfg/mfg_fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ammfg/errors.hpp"

namespace ammfg {

std::vector<std::string> fixed_point_violations(FixedPointConfig const& c)
{
    std::vector<std::string> out;
    if (!(c.damping > 0.0 && c.damping <= 1.0))
        out.push_back("fixed_point.damping must lie in (0, 1]");
    if (!(c.tol > 0.0))
        out.push_back("fixed_point.tol must be > 0");
    if (c.max_iters < 1)
        out.push_back("fixed_point.max_iters must be >= 1");
    return out;
}

double residual(MeanControlPath const& m, MeanControlPath const& m_hat)
{
    if (m.size() != m_hat.size() || m.dt() != m_hat.dt())
        throw UsageError("residual needs paths on the same grid");
    double r = 0;
    for (std::size_t k = 0; k < m.size(); ++k)
        r = std::max(r, std::abs(m.values()[k] - m_hat.values()[k]));
    return r;
}

EquilibriumResult solve_mfg(RewardFactory const& factory,
                            FixedPointConfig const& config,
                            Problem const& problem)
{
    auto const bad = fixed_point_violations(config);
    if (!bad.empty())
        throw UsageError(bad.front());

    auto const& g = problem.grids;
    std::vector<double> start = config.init;
    if (start.empty())
        start.assign(g.n_t + 1, 0.0);

    EquilibriumResult res;
    MeanControlPath m = problem.path(start);
    try
    {
        for (std::size_t it = 0; it < config.max_iters; ++it)
        {
            Policy policy = solve_hjb(factory(m), problem);
            auto const prop = propagate(policy, problem);
            res.grid_warning = prop.grid_warning;
            std::vector<double> next(m.size());
            for (std::size_t k = 0; k < m.size(); ++k)
                next[k] = (1.0 - config.damping) * m.values()[k]
                          + config.damping * prop.mean_path.values()[k];
            MeanControlPath m_next = problem.path(next);
            double const r = residual(m, m_next);
            res.residuals.push_back(r);
            res.iterations = it + 1;
            m = std::move(m_next);
            if (r <= config.tol)
            {
                res.converged = true;
                break;
            }
        }
    }
    catch (AdmissibilityError const& e)
    {
        std::ostringstream msg;
        msg << "iteration " << res.iterations << ": " << e.what();
        res.failure = msg.str();
    }
    res.m_star = m;
    try
    {
        auto const reward = factory(m);
        res.policy = solve_hjb(reward, problem);
        res.value = evaluate(res.policy, reward, problem);
    }
    catch (AdmissibilityError const& e)
    {
        if (!res.failure)
            res.failure = std::string("final iterate: ") + e.what();
    }
    return res;
}

EquilibriumResult solve_mfg(RewardKind const& kind,
                            FixedPointConfig const& config,
                            Problem const& problem)
{
    return solve_mfg(
        [&](MeanControlPath const& m) { return kind_reward(kind, m, problem); },
        config, problem);
}

}  // namespace ammfg
