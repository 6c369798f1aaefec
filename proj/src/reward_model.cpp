#include "ammfg/reward_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ammfg/errors.hpp"
#include "ammfg/random.hpp"

namespace ammfg {
namespace {

double ipow(double base, int e)
{
    return e == 1 ? base : base * base;
}

void check_floor(PathPoint p, PoolParams const& params, double eps0)
{
    double const r = params.X0 - p.C;
    if (r < eps0 * (1.0 - 1e-12) || !(r > 0.0))
    {
        std::ostringstream msg;
        msg << "reserve " << r << " below floor eps0=" << eps0;
        throw AdmissibilityError(msg.str());
    }
}

}  // namespace

CostSpec CostSpec::quadratic(double kappa, double gamma)
{
    CostSpec c;
    c.holding = [kappa](double, double x) { return kappa * x * x; };
    c.terminal = [gamma](double x) { return gamma * x * x; };
    c.c1 = std::max(1.0, kappa + gamma);
    return c;
}

double CostSpec::psi(double x) const
{
    return std::exp(c1 * std::abs(x));
}

std::string to_string(RewardVariant v)
{
    switch (v)
    {
        case RewardVariant::original:
            return "f";
        case RewardVariant::lower:
            return "f1";
        case RewardVariant::upper:
            return "f2";
    }
    return "?";
}

std::vector<std::string> reward_kind_violations(RewardKind const& kind)
{
    std::vector<std::string> out;
    if (!(kind.young_eps > 0.0))
        out.push_back("reward.young_eps must be > 0");
    if (kind.denom_exp != 1 && kind.denom_exp != 2)
        out.push_back("reward.denom_exp must be 1 or 2");
    return out;
}

BoundConstants make_bound_constants(PoolParams const& params,
                                    CostSpec const& costs,
                                    ControlBounds const& bounds,
                                    double T)
{
    auto const adm = admissible(bounds, params.X0, T);
    if (!adm.ok)
        throw AdmissibilityError("control bound M must satisfy M < X0/T");
    BoundConstants b;
    b.T = T;
    b.M = bounds.M();
    b.eps0 = adm.eps0;
    b.C = bound_constant(params, costs, b);
    return b;
}

double bound_constant(PoolParams const& params,
                      CostSpec const& costs,
                      BoundConstants const& b)
{
    if (!(b.M < params.X0 / b.T) || !(b.eps0 > 0.0))
        throw AdmissibilityError("bound constant needs M < X0/T and eps0 > 0");
    double const e4 = std::pow(b.eps0, 4);
    double const drift_term = 2.0 * params.k0 * b.M * (params.X0 + b.T * b.M) / e4;
    double const fee_term = params.k0 * b.M * spread_factor(params.phi) / e4;
    return std::max({costs.c1, drift_term, fee_term});
}

double gamma(PathPoint p, PoolParams const& params, double eps0)
{
    check_floor(p, params, eps0);
    double const r = params.X0 - p.C;
    double const rphi = params.X0 - params.phi * p.C;
    return params.k0 * p.m
           * ((1.0 + params.phi) * params.X0 - 2.0 * params.phi * p.C)
           / (r * r * rphi * rphi);
}

double gamma(double t, MeanControlPath const& path, PoolParams const& params)
{
    return gamma(path.at(t), params, path.eps0());
}

double fee_density(PathPoint p, PoolParams const& params, int e, double eps0)
{
    check_floor(p, params, eps0);
    double const r = params.X0 - p.C;
    double const rphi = params.X0 - params.phi * p.C;
    return params.k0 / (ipow(r, e) * ipow(rphi, e));
}

double lambda_orig(double t,
                   double a,
                   MeanControlPath const& path,
                   PoolParams const& params,
                   RewardKind const& kind)
{
    double const D
        = fee_density(path.at(t), params, kind.denom_exp, path.eps0());
    return -a * spread_factor(params.phi) * D;
}

double lambda_lower(double t,
                    double a,
                    MeanControlPath const& path,
                    PoolParams const& params,
                    RewardKind const& kind)
{
    double const D
        = fee_density(path.at(t), params, kind.denom_exp, path.eps0());
    double const ac = a * spread_factor(params.phi);
    double const eps = kind.young_eps;
    return -0.5 * (eps * ac * ac + D * D / eps);
}

double lambda_upper(double a,
                    PoolParams const& params,
                    BoundConstants const& bounds,
                    int denom_exp)
{
    double const top = params.X0 + bounds.T * bounds.M;
    return -a * spread_factor(params.phi) * params.k0
           / std::pow(top, 2 * denom_exp);
}

StageCoefficients stage_coefficients(RewardKind const& kind,
                                     double t,
                                     PathPoint p,
                                     PoolParams const& params,
                                     BoundConstants const& bounds)
{
    StageCoefficients s;
    s.t = t;
    s.gamma = gamma(p, params, bounds.eps0);
    double const c = spread_factor(params.phi);
    switch (kind.variant)
    {
        case RewardVariant::original:
            s.lin = -c * fee_density(p, params, kind.denom_exp, bounds.eps0);
            break;
        case RewardVariant::lower: {
            double const D
                = fee_density(p, params, kind.denom_exp, bounds.eps0);
            s.quad = -0.5 * kind.young_eps * c * c;
            s.offset = -0.5 * D * D / kind.young_eps;
            break;
        }
        case RewardVariant::upper:
            s.lin = lambda_upper(1.0, params, bounds, kind.denom_exp);
            break;
    }
    return s;
}

double reward(RewardKind const& kind,
              double t,
              double x,
              double a,
              MeanControlPath const& path,
              PoolParams const& params,
              CostSpec const& costs,
              BoundConstants const& bounds)
{
    auto const s = stage_coefficients(kind, t, path.at(t), params, bounds);
    return x * s.gamma + s.fee_term(a) - costs.holding(t, x);
}

double terminal_reward(double x, CostSpec const& costs)
{
    return -costs.terminal(x);
}

//---------------------------------------------------------------------------//

std::vector<MeanControlPath>
sample_paths(SampleDomain const& d, std::uint64_t seed)
{
    std::vector<MeanControlPath> out;
    auto const& g = d.grids;
    out.push_back(constant_path(0.0, g, d.bounds, d.params.X0));
    out.push_back(constant_path(d.bounds.a_max, g, d.bounds, d.params.X0));
    CounterRng rng(seed, StreamTag::sampling, 0xfa7u);
    std::uint64_t counter = 0;
    std::vector<double> v(g.n_t + 1);
    while (out.size() < std::max<std::size_t>(d.n_paths, 2))
    {
        std::size_t const pieces = 1 + (rng.bits(counter++) % 8);
        for (std::size_t k = 0; k <= g.n_t;)
        {
            double const level = d.bounds.a_min
                                 + (d.bounds.a_max - d.bounds.a_min)
                                       * rng.uniform(counter++);
            std::size_t const len = 1 + (g.n_t + 1) / pieces;
            for (std::size_t i = 0; i < len && k <= g.n_t; ++i, ++k)
                v[k] = level;
        }
        out.push_back(make_path(v, g, d.bounds, d.params.X0));
    }
    return out;
}

namespace {

struct Draw
{
    double t;
    double x;
    double a;
    std::size_t path;
};

Draw draw(CounterRng const& rng,
          std::uint64_t i,
          SampleDomain const& d,
          std::size_t n_paths)
{
    Draw s;
    s.t = d.grids.T * rng.uniform(4 * i);
    s.x = d.grids.x_min + (d.grids.x_max - d.grids.x_min) * rng.uniform(4 * i + 1);
    s.a = d.bounds.a_min
          + (d.bounds.a_max - d.bounds.a_min) * rng.uniform(4 * i + 2);
    s.path = rng.bits(4 * i + 3) % n_paths;
    return s;
}

}  // namespace

GrowthReport check_growth_bound(RewardKind const& kind,
                                std::size_t n_samples,
                                std::uint64_t seed,
                                SampleDomain const& d,
                                std::optional<double> C_override)
{
    auto const bc = make_bound_constants(d.params, d.costs, d.bounds, d.grids.T);
    GrowthReport rep;
    rep.C = C_override.value_or(bc.C);
    rep.n_samples = n_samples;
    auto const paths = sample_paths(d, seed);
    CounterRng rng(seed, StreamTag::sampling, 0x6b0u);
    for (std::size_t i = 0; i < n_samples; ++i)
    {
        // The first sample is pinned to the origin of every argument.
        Draw s = i == 0 ? Draw{0.0, 0.0, 0.0, 0} : draw(rng, i, d, paths.size());
        double const f
            = reward(kind, s.t, s.x, s.a, paths[s.path], d.params, d.costs, bc);
        double const g = terminal_reward(s.x, d.costs);
        GrowthSample gs{s.t, s.x, s.a, s.path, std::abs(g) + std::abs(f),
                        rep.C * std::exp(rep.C * std::abs(s.x))};
        double const ratio = gs.lhs / gs.rhs;
        if (ratio > rep.max_ratio || i == 0)
        {
            rep.max_ratio = ratio;
            rep.worst = gs;
        }
        if (gs.lhs > gs.rhs && !rep.violation)
            rep.violation = gs;
    }
    return rep;
}

OrderingReport check_ordering(RewardKind const& base,
                              std::size_t n_samples,
                              std::uint64_t seed,
                              SampleDomain const& d)
{
    auto const bc = make_bound_constants(d.params, d.costs, d.bounds, d.grids.T);
    auto const paths = sample_paths(d, seed);
    RewardKind k0 = base, k1 = base, k2 = base;
    k0.variant = RewardVariant::original;
    k1.variant = RewardVariant::lower;
    k2.variant = RewardVariant::upper;

    OrderingReport rep;
    rep.n_samples = n_samples;
    rep.min_upper_slack = std::numeric_limits<double>::infinity();
    rep.min_lower_slack = std::numeric_limits<double>::infinity();
    CounterRng rng(seed, StreamTag::sampling, 0x0dd);
    for (std::size_t i = 0; i < n_samples; ++i)
    {
        auto const s = draw(rng, i, d, paths.size());
        auto const& path = paths[s.path];
        double const f = reward(k0, s.t, s.x, s.a, path, d.params, d.costs, bc);
        double const f1 = reward(k1, s.t, s.x, s.a, path, d.params, d.costs, bc);
        double const f2 = reward(k2, s.t, s.x, s.a, path, d.params, d.costs, bc);
        rep.min_upper_slack = std::min(rep.min_upper_slack, f2 - f);
        rep.min_lower_slack = std::min(rep.min_lower_slack, f - f1);
        // Rounding of the shared a-free part is a few ulps of |f|.
        double const tol = 4.0 * std::numeric_limits<double>::epsilon()
                           * (1.0 + std::abs(f));
        if (f2 - f < -tol || f - f1 < -tol)
            ++rep.violations;
    }
    return rep;
}

ConcavityReport check_concavity(RewardKind const& base,
                                std::size_t n_samples,
                                std::uint64_t seed,
                                SampleDomain const& d)
{
    auto const bc = make_bound_constants(d.params, d.costs, d.bounds, d.grids.T);
    auto const paths = sample_paths(d, seed);
    RewardKind k1 = base, k2 = base;
    k1.variant = RewardVariant::lower;
    k2.variant = RewardVariant::upper;
    double const c = spread_factor(d.params.phi);
    double const curvature = k1.young_eps * c * c;
    // Both rewards are polynomials of degree <= 2 in a, so the central
    // difference is exact for any step; the step is widened until the
    // curvature term is far above the rounding of the a-free part.
    double const h = curvature > 0.0
                         ? std::max(0.25 * std::max(bc.M, 1e-3),
                                    std::sqrt(1e-2 / curvature))
                         : 0.25 * std::max(bc.M, 1e-3);

    ConcavityReport rep;
    rep.n_samples = n_samples;
    CounterRng rng(seed, StreamTag::sampling, 0xcc);
    for (std::size_t i = 0; i < n_samples; ++i)
    {
        auto const s = draw(rng, i, d, paths.size());
        auto const& path = paths[s.path];
        auto f = [&](RewardKind const& k, double a) {
            return reward(k, s.t, s.x, a, path, d.params, d.costs, bc);
        };
        double const d1 = (f(k1, s.a + h) - 2.0 * f(k1, s.a) + f(k1, s.a - h))
                          / (h * h);
        double const d2 = (f(k2, s.a + h) - 2.0 * f(k2, s.a) + f(k2, s.a - h))
                          / (h * h);
        double const rel = curvature > 0.0 ? std::abs(d1 + curvature) / curvature
                                           : std::abs(d1);
        rep.max_rel_err_lower = std::max(rep.max_rel_err_lower, rel);
        rep.max_abs_upper = std::max(rep.max_abs_upper, std::abs(d2));
    }
    return rep;
}

}  // namespace ammfg
