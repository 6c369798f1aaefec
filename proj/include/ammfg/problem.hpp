#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ammfg/amm_core.hpp"
#include "ammfg/flow_grid.hpp"
#include "ammfg/parallel.hpp"
#include "ammfg/reward_model.hpp"

namespace ammfg {

/// Initial inventory law lambda_0: Normal(mean, sd^2); sd = 0 is a point mass.
struct InitialLaw
{
    double mean = 0.0;
    double sd = 0.5;
};

/// One representative-trader control problem: pool, costs, noise, grids.
struct Problem
{
    PoolParams pool;
    CostSpec costs = CostSpec::quadratic(0.5, 0.5);
    Grids grids;
    ControlBounds bounds;
    double sigma = 0.5;  ///< inventory volatility
    InitialLaw law0;
    std::size_t gh_nodes = 5;
    unsigned workers = default_workers();

    BoundConstants bound_constants() const
    {
        return make_bound_constants(pool, costs, bounds, grids.T);
    }

    SampleDomain sample_domain() const
    {
        return {pool, costs, grids, bounds, 32};
    }

    MeanControlPath path(std::vector<double> const& values) const
    {
        return make_path(values, grids, bounds, pool.X0);
    }

    MeanControlPath constant_path(double m) const
    {
        return ammfg::constant_path(m, grids, bounds, pool.X0);
    }
};

std::vector<std::string> problem_violations(Problem const& p,
                                            double phi_floor = default_phi_floor);

}  // namespace ammfg
