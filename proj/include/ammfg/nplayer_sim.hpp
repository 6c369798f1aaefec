#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "ammfg/best_response.hpp"

namespace ammfg {

enum class PriceMode
{
    aggregate,   ///< all flow so far treated as one transaction
    sequential,  ///< one execute_swap per time step
};

struct SimConfig
{
    std::size_t N = 10;
    std::uint64_t seed = 777;
    Policy policy;
    std::optional<Policy> deviant;  ///< trader 0's policy when deviating
    bool use_mid_price = true;
    PriceMode mode = PriceMode::aggregate;
    double p_min = 1e-6;
    std::size_t n_reps = 200;
};

struct PoolPaths
{
    std::vector<double> X, Y, k, price;
    std::vector<double> mean_control;  ///< (1/N) sum_i alpha^i at each node
};

struct Replication
{
    bool aborted = false;
    std::vector<double> profits;  ///< per trader
    PoolPaths paths;
    std::size_t floor_events = 0;
    bool k_monotone = true;
    double max_mid_error = 0;  ///< |unit cost - (bid + ask)/2| / mid
};

/// One replication; trader 0 follows the deviant policy when `deviate`.
Replication simulate_replication(SimConfig const& config,
                                 Problem const& problem,
                                 std::size_t rep,
                                 bool deviate);

struct GainEstimate
{
    double mean = 0;
    double std_error = 0;
    double ci_low = 0;
    double ci_high = 0;
    std::size_t n_reps = 0;
    std::size_t aborted = 0;
};

struct SimResult
{
    std::size_t n_reps = 0;
    std::size_t aborted = 0;
    std::size_t floor_events = 0;
    bool k_monotone = true;
    double max_mid_error = 0;
    std::vector<double> mean_profits;
    std::vector<double> profit_stderr;
    PoolPaths first_paths;
    std::vector<double> mean_control;  ///< averaged over replications
    std::optional<GainEstimate> deviation_gain;
};

SimResult simulate(SimConfig const& config, Problem const& problem);

/// Trader 0's profit gain from deviating, on paired replications.
GainEstimate deviation_gain(SimConfig const& config,
                            std::size_t n_reps,
                            Problem const& problem);

/// Best response that also prices the trader's own 1/N share of the
/// aggregate flow: adds x * a * Gamma(t; m = 1) / N to the running reward.
Policy own_impact_best_response(MeanControlPath const& path,
                                RewardKind const& kind,
                                std::size_t N,
                                Problem const& problem);

/// Columns: t, pool_X, pool_Y, k, P.
void write_csv(std::ostream& os, PoolPaths const& paths, double dt);

nlohmann::json to_json(SimResult const& r);

}  // namespace ammfg
