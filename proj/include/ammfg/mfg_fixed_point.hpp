#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ammfg/best_response.hpp"

namespace ammfg {

struct FixedPointConfig
{
    double damping = 0.5;
    std::size_t max_iters = 200;
    double tol = 1e-3;
    /// Starting mean path on the time nodes; empty means m = 0.
    std::vector<double> init;
};

std::vector<std::string> fixed_point_violations(FixedPointConfig const& c);

struct EquilibriumResult
{
    MeanControlPath m_star;
    Policy policy;  ///< best response to m_star
    std::vector<double> residuals;  ///< sup |m_{k+1} - m_k| per iteration
    bool converged = false;
    ValueReport value;
    std::size_t iterations = 0;
    bool grid_warning = false;
    std::optional<std::string> failure;  ///< admissibility failure, if any
};

/// Builds the running reward for a candidate mean path.
using RewardFactory = std::function<StageReward(MeanControlPath const&)>;

/// sup_k |m(t_k) - m_hat(t_k)|.
double residual(MeanControlPath const& m, MeanControlPath const& m_hat);

/// Damped Picard iteration m <- (1 - d) m + d Phi(m), Phi = propagate o
/// solve_hjb, with common random numbers across iterations. Never throws on
/// non-convergence.
EquilibriumResult solve_mfg(RewardFactory const& factory,
                            FixedPointConfig const& config,
                            Problem const& problem);

EquilibriumResult solve_mfg(RewardKind const& kind,
                            FixedPointConfig const& config,
                            Problem const& problem);

}  // namespace ammfg
