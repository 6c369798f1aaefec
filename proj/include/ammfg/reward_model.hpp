#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ammfg/amm_core.hpp"
#include "ammfg/flow_grid.hpp"

namespace ammfg {

/// Holding cost h(t, x), terminal cost l(x), and the growth constant c1 with
/// |h| + |l| <= c1 exp(c1 |x|).
struct CostSpec
{
    std::function<double(double, double)> holding;
    std::function<double(double)> terminal;
    double c1 = 1.0;

    /// h = kappa x^2, l = gamma x^2, c1 = max(1, kappa + gamma).
    static CostSpec quadratic(double kappa, double gamma);
    static CostSpec none() { return quadratic(0.0, 0.0); }

    double psi(double x) const;
};

enum class RewardVariant
{
    original,  ///< f
    lower,     ///< f1
    upper,     ///< f2
};

std::string to_string(RewardVariant v);

struct RewardKind
{
    RewardVariant variant = RewardVariant::original;
    /// Young scaling: a c D <= (eps (a c)^2 + D^2 / eps) / 2.
    double young_eps = 1.0;
    /// Exponent on the reserve factors of the fee term's density D.
    int denom_exp = 2;
};

std::vector<std::string> reward_kind_violations(RewardKind const& kind);

struct BoundConstants
{
    double T = 1.0;
    double M = 0.0;
    double eps0 = 0.0;
    double C = 0.0;
};

/// eps0 = X0 - T M and C filled in. Throws AdmissibilityError unless M < X0/T.
BoundConstants make_bound_constants(PoolParams const& params,
                                    CostSpec const& costs,
                                    ControlBounds const& bounds,
                                    double T);

/// max{c1, 2 k0 M (X0 + T M) / eps0^4, k0 M c(phi) / eps0^4}.
double bound_constant(PoolParams const& params,
                      CostSpec const& costs,
                      BoundConstants const& bounds);

/// Price drift per unit inventory. Independent of x and of the trader's own
/// control.
double gamma(PathPoint p, PoolParams const& params, double eps0);
double gamma(double t, MeanControlPath const& path, PoolParams const& params);

/// D = k0 / ((X0 - C)^e (X0 - phi C)^e).
double fee_density(PathPoint p, PoolParams const& params, int e, double eps0);

double lambda_orig(double t,
                   double a,
                   MeanControlPath const& path,
                   PoolParams const& params,
                   RewardKind const& kind);

double lambda_lower(double t,
                    double a,
                    MeanControlPath const& path,
                    PoolParams const& params,
                    RewardKind const& kind);

/// -a c(phi) k0 / (X0 + T M)^(2e): path-free.
double lambda_upper(double a,
                    PoolParams const& params,
                    BoundConstants const& bounds,
                    int denom_exp = 2);

/// Everything the running reward needs at one time node, with the fee term
/// written as a polynomial in the own control:
///   f(x, a) = x * gamma + lin * a + quad * a^2 + offset - h(t, x).
struct StageCoefficients
{
    double t = 0;
    double gamma = 0;
    double lin = 0;
    double quad = 0;
    double offset = 0;

    double fee_term(double a) const { return (quad * a + lin) * a + offset; }
};

StageCoefficients stage_coefficients(RewardKind const& kind,
                                     double t,
                                     PathPoint p,
                                     PoolParams const& params,
                                     BoundConstants const& bounds);

double reward(RewardKind const& kind,
              double t,
              double x,
              double a,
              MeanControlPath const& path,
              PoolParams const& params,
              CostSpec const& costs,
              BoundConstants const& bounds);

/// g = -l.
double terminal_reward(double x, CostSpec const& costs);

//---------------------------------------------------------------------------//
// Sampled property checks
//---------------------------------------------------------------------------//

/// Where the reward's arguments are drawn from.
struct SampleDomain
{
    PoolParams params;
    CostSpec costs;
    Grids grids;
    ControlBounds bounds;
    std::size_t n_paths = 32;
};

/// Random admissible mean paths: zero, full-rate, and piecewise-constant.
std::vector<MeanControlPath>
sample_paths(SampleDomain const& domain, std::uint64_t seed);

struct GrowthSample
{
    double t = 0;
    double x = 0;
    double a = 0;
    std::size_t path = 0;
    double lhs = 0;  ///< |g(x)| + |f(t, x, a)|
    double rhs = 0;  ///< C exp(C |x|)
};

struct GrowthReport
{
    double C = 0;
    double max_ratio = 0;
    std::size_t n_samples = 0;
    GrowthSample worst;
    std::optional<GrowthSample> violation;

    bool ok() const { return !violation; }
};

/// |g| + |f| <= C psi_C(x) on uniform samples of (t, x, a, path). With
/// `C_override` the stated constant replaces the computed one (negative
/// controls of the check use this).
GrowthReport check_growth_bound(RewardKind const& kind,
                                std::size_t n_samples,
                                std::uint64_t seed,
                                SampleDomain const& domain,
                                std::optional<double> C_override = {});

struct OrderingReport
{
    std::size_t n_samples = 0;
    double min_upper_slack = 0;  ///< min of f2 - f
    double min_lower_slack = 0;  ///< min of f - f1
    std::size_t violations = 0;

    bool ok() const { return violations == 0; }
};

/// f1 <= f <= f2 on samples with a drawn from A.
OrderingReport check_ordering(RewardKind const& base,
                              std::size_t n_samples,
                              std::uint64_t seed,
                              SampleDomain const& domain);

struct ConcavityReport
{
    std::size_t n_samples = 0;
    double max_rel_err_lower = 0;  ///< |d2f1 + eps c^2| / (eps c^2)
    double max_abs_upper = 0;      ///< |d2f2|

    bool ok(double rel_tol = 1e-6, double abs_tol = 1e-10) const
    {
        return max_rel_err_lower <= rel_tol && max_abs_upper <= abs_tol;
    }
};

/// Central second differences in a of f1 and f2.
ConcavityReport check_concavity(RewardKind const& base,
                                std::size_t n_samples,
                                std::uint64_t seed,
                                SampleDomain const& domain);

}  // namespace ammfg
