#include "ammfg/problem.hpp"

namespace ammfg {

std::vector<std::string> problem_violations(Problem const& p, double phi_floor)
{
    auto out = pool_violations(p.pool, phi_floor);
    for (auto& s : grid_violations(p.grids))
        out.push_back(std::move(s));
    if (!(p.bounds.a_min <= p.bounds.a_max))
        out.push_back("control.a_min must be <= control.a_max");
    else if (p.pool.X0 > 0.0 && p.grids.T > 0.0
             && !admissible(p.bounds, p.pool.X0, p.grids.T).ok)
        out.push_back("control bound M must satisfy M < X0/T");
    if (!(p.sigma >= 0.0))
        out.push_back("dynamics.sigma must be >= 0");
    if (!(p.law0.sd >= 0.0))
        out.push_back("dynamics.x0_sd must be >= 0");
    if (p.gh_nodes < 1 || p.gh_nodes > 64)
        out.push_back("grid.gh_nodes must be in [1, 64]");
    if (!(p.costs.c1 > 0.0))
        out.push_back("costs.c1 must be > 0");
    return out;
}

}  // namespace ammfg
