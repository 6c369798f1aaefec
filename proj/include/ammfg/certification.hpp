#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ammfg/mfg_fixed_point.hpp"

namespace ammfg {

/// Best-response value of the original reward against one candidate flow.
struct CandidateValue
{
    std::string source;  ///< "f1_equilibrium", "f2_equilibrium", "f_fixed_point"
    MeanControlPath path;
    ValueReport value;
};

/// Values of the lower, original and upper problems. V_f is a best-response
/// value against candidate flows (a lower bound on the supremum), never an
/// equilibrium value.
struct SandwichReport
{
    Problem problem;
    RewardKind base;
    FixedPointConfig fixed_point;

    std::optional<EquilibriumResult> lower;
    std::optional<EquilibriumResult> upper;
    std::optional<EquilibriumResult> original;  ///< kept whatever its status

    std::vector<CandidateValue> f_candidates;
    std::size_t f_best = 0;

    std::optional<ValueReport> V_f1;
    std::optional<ValueReport> V_f;
    std::optional<ValueReport> V_f2;

    /// J_f of each auxiliary equilibrium control against its own flow, and
    /// the best-response value of f against that same flow.
    std::optional<ValueReport> J_f_alpha[2];
    std::optional<ValueReport> V_f_response[2];

    double gap = 0;
    double gap_upper = 0;
    double gap_lower = 0;
    double sigma_gap = 0;        ///< combined stderr of V_f1, V_f2
    double sigma_upper = 0;      ///< combined stderr of V_f, V_f2
    double sigma_lower = 0;      ///< combined stderr of V_f1, V_f
    double epsilon_certified = 0;
    std::vector<std::string> controls_certified;
    bool ordering_holds = false;

    std::vector<std::string> missing;
    std::vector<std::string> diagnostics;

    bool complete() const { return missing.empty(); }
};

SandwichReport sandwich_report(FixedPointConfig const& config,
                               Problem const& problem,
                               RewardKind const& base = {});

struct Certificate
{
    bool issued = false;
    std::string refusal;
    double epsilon_lemma = 0;  ///< gap + 3 sigma
    std::optional<double> epsilon_user;
    /// Controls certified at the user's epsilon (or at epsilon_lemma).
    std::vector<std::string> controls;
    double direct_bound[2] = {0, 0};  ///< V_f_br(m_i) - J_f(alpha_i; m_i)
    double direct_stderr[2] = {0, 0};
};

Certificate epsilon_nash_certificate(SandwichReport const& report,
                                     std::optional<double> user_epsilon = {});

/// sum_{k < n_t} D(t_k; m)^2 / (2 eps) dt: the a-free part of -Lambda_1 along m.
double young_residual(MeanControlPath const& path,
                      Problem const& problem,
                      RewardKind const& kind);

/// M c(phi) k0 (eps0^{-2e} + (X0 + T M)^{-2e}) (1 + T).
double upper_gap_bound(Problem const& problem, int denom_exp);

struct SweepRow
{
    double phi = 0;
    double spread = 0;
    std::optional<SandwichReport> report;
    std::string error;
};

using YoungRule = std::function<double(double phi)>;

/// One sandwich report per phi; rows are independent and run concurrently.
/// `young` picks young_eps per row (default: base.young_eps).
std::vector<SweepRow> phi_sweep(std::span<double const> phis,
                                FixedPointConfig const& config,
                                Problem const& problem,
                                RewardKind const& base = {},
                                YoungRule const& young = {});

/// phi, spread_factor, V_f1, V_f1_se, V_f, V_f_se, V_f2, V_f2_se, gap,
/// gap_upper, gap_lower, converged_f1, converged_f2
void write_sweep_csv(std::ostream& os, std::span<SweepRow const> rows);

nlohmann::json to_json(ValueReport const& v);
nlohmann::json to_json(SandwichReport const& r);
nlohmann::json to_json(Certificate const& c);

}  // namespace ammfg
