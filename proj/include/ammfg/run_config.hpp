#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ammfg/certification.hpp"
#include "ammfg/nplayer_sim.hpp"

namespace ammfg {

/// Everything a batch run needs. Loaded from an INI-style file with
/// [sections] and overridable key by key ("section.key=value").
struct RunConfig
{
    Problem problem;
    double kappa = 0.5;
    double gamma = 0.5;
    std::optional<double> c1;
    double phi_floor = default_phi_floor;
    RewardKind reward;
    FixedPointConfig fixed_point;

    std::size_t sim_N = 10;
    std::size_t sim_reps = 200;
    bool sim_use_mid_price = true;
    PriceMode sim_mode = PriceMode::aggregate;
    double sim_p_min = 1e-6;
    std::uint64_t sim_seed = 777;

    std::string out_dir = "out";

    /// Rebuilds problem.costs from kappa, gamma, c1.
    void sync_costs();

    /// Every violated invariant, not just the first.
    std::vector<std::string> violations() const;

    /// Sorted key=value lines of every setting that affects results.
    std::string canonical() const;
    std::uint64_t hash() const;
};

/// Known keys in canonical order.
std::vector<std::string> const& config_keys();

/// Set one key; returns an error message instead of throwing.
std::optional<std::string> set_key(RunConfig& cfg,
                                   std::string const& key,
                                   std::string const& value);

/// Parse INI text, collecting every unknown key or malformed value.
std::vector<std::string> load_ini(RunConfig& cfg, std::istream& in);

/// FNV-1a, used for the config hash embedded in every artifact.
std::uint64_t fnv1a64(std::string const& text);

}  // namespace ammfg
