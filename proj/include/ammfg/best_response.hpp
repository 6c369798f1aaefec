#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "ammfg/problem.hpp"

namespace ammfg {

/// Running reward at time node k for inventory x and own control a.
using StageReward = std::function<double(std::size_t, double, double)>;

/// The running reward of `kind` against a fixed mean path.
StageReward kind_reward(RewardKind const& kind,
                        MeanControlPath const& path,
                        Problem const& problem);

/// Feedback control a*(t_k, x_j) and value V(t_k, x_j) on the grid; both are
/// linearly interpolated in x and clamped to the grid ends.
class Policy
{
  public:
    Policy() = default;
    Policy(Grids const& grids, std::vector<double> control, std::vector<double> value);

    /// A table without a value surface (fixed, non-optimized policies).
    static Policy from_controls(Grids const& grids, std::vector<double> control);
    static Policy constant(Grids const& grids, double a);

    std::size_t n_t() const { return n_t_; }
    std::size_t n_x() const { return n_x_; }
    bool has_values() const { return !value_.empty(); }

    double control_node(std::size_t k, std::size_t j) const
    {
        return control_[k * n_x_ + j];
    }
    double value_node(std::size_t k, std::size_t j) const
    {
        return value_[k * n_x_ + j];
    }
    double control(std::size_t k, double x) const { return interp(control_, k, x); }
    double value(std::size_t k, double x) const { return interp(value_, k, x); }

    double state(std::size_t j) const
    {
        return x_min_ + static_cast<double>(j) * dx_;
    }

  private:
    double interp(std::vector<double> const& table, std::size_t k, double x) const;

    std::size_t n_t_ = 0;
    std::size_t n_x_ = 0;
    double x_min_ = 0;
    double dx_ = 1;
    double dt_ = 1;
    std::vector<double> control_;
    std::vector<double> value_;

    friend void write_csv(std::ostream& os, Policy const& policy);
};

/// Columns: t, x, a, V.
void write_csv(std::ostream& os, Policy const& policy);

/// Particle ensemble per time node (node-major), plus likelihood weights when
/// produced by the change-of-measure simulator.
struct LawFlow
{
    std::size_t n_nodes = 0;
    std::size_t n_particles = 0;
    std::vector<double> particles;
    std::vector<double> weights;

    double at(std::size_t k, std::size_t p) const
    {
        return particles[k * n_particles + p];
    }
    double mean(std::size_t k) const;
};

struct Propagation
{
    LawFlow law;
    MeanControlPath mean_path;
    std::size_t clamp_events = 0;
    double exit_fraction = 0;  ///< particles clamped at least once
    bool grid_warning = false;  ///< exit_fraction above 1%
};

struct ValueReport
{
    double mean = 0;
    double std_error = 0;
    std::size_t n_paths = 0;
    std::vector<double> samples;  ///< per-path rewards, index = particle
};

double combined_stderr(ValueReport const& a, ValueReport const& b);

struct PairedDifference
{
    double mean = 0;
    double std_error = 0;
};

/// a - b on common random numbers.
PairedDifference paired_difference(ValueReport const& a, ValueReport const& b);

struct GirsanovReport
{
    ValueReport value;
    double weight_mean = 0;
    double weight_stderr = 0;
};

/// Backward induction with Gauss-Hermite expectations. Argmax ties go to the
/// control of smallest magnitude, then to the smaller control.
Policy solve_hjb(StageReward const& reward, Problem const& problem);
Policy solve_hjb(MeanControlPath const& path,
                 RewardKind const& kind,
                 Problem const& problem);

/// Euler-Maruyama dX = a*(t, X) dt + sigma dW from lambda_0; returns the law
/// and the induced mean control path.
Propagation propagate(Policy const& policy, Problem const& problem);

/// E[sum_k f(t_k, X_k, a_k) dt + g(X_T)] along the controlled dynamics.
ValueReport evaluate(Policy const& policy,
                     StageReward const& reward,
                     Problem const& problem);
ValueReport evaluate(Policy const& policy,
                     MeanControlPath const& path,
                     RewardKind const& kind,
                     Problem const& problem);

/// Same value by simulating dX = sigma dW and reweighting with the discrete
/// exponential martingale of a / sigma.
GirsanovReport girsanov_evaluate(Policy const& policy,
                                 StageReward const& reward,
                                 Problem const& problem);
GirsanovReport girsanov_evaluate(Policy const& policy,
                                 MeanControlPath const& path,
                                 RewardKind const& kind,
                                 Problem const& problem);

/// int V(0, x) lambda_0(dx) by Gauss-Hermite quadrature over lambda_0.
double grid_value(Policy const& policy, Problem const& problem);

/// Bias allowance between grid_value and a Monte Carlo value of the same
/// policy: each backward step interpolates linearly, costing at most
/// dx^2 / 8 * max |V_xx|, so n_t dx^2 / 8 * max |V_xx| over the surface.
double grid_bias_budget(Policy const& policy, Problem const& problem);

}  // namespace ammfg
