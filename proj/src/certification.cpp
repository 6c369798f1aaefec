#include "ammfg/certification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ammfg/errors.hpp"

namespace ammfg {
namespace {

RewardKind with_variant(RewardKind k, RewardVariant v)
{
    k.variant = v;
    return k;
}

}  // namespace

SandwichReport sandwich_report(FixedPointConfig const& config,
                               Problem const& problem,
                               RewardKind const& base)
{
    SandwichReport r;
    r.problem = problem;
    r.base = base;
    r.fixed_point = config;
    if (problem.bounds.a_min < 0.0)
        r.diagnostics.push_back(
            "a_min < 0: Lambda <= Lambda_2 fails for negative controls, the "
            "pointwise ordering premise does not hold on all of A");

    auto const kf = with_variant(base, RewardVariant::original);
    auto const k1 = with_variant(base, RewardVariant::lower);
    auto const k2 = with_variant(base, RewardVariant::upper);

    auto solve = [&](RewardKind const& k, std::string const& name)
        -> std::optional<EquilibriumResult> {
        try
        {
            auto eq = solve_mfg(k, config, problem);
            if (eq.failure)
                r.diagnostics.push_back(name + ": " + *eq.failure);
            if (!eq.converged)
                r.diagnostics.push_back(name + ": Picard iteration did not converge");
            if (eq.grid_warning)
                r.diagnostics.push_back(name + ": more than 1% of particles left the state grid");
            return eq;
        }
        catch (Error const& e)
        {
            r.diagnostics.push_back(name + ": " + e.what());
            return std::nullopt;
        }
    };

    r.lower = solve(k1, "f1");
    r.upper = solve(k2, "f2");
    r.original = solve(kf, "f");
    if (r.lower)
        r.V_f1 = r.lower->value;
    else
        r.missing.push_back("V_f1");
    if (r.upper)
        r.V_f2 = r.upper->value;
    else
        r.missing.push_back("V_f2");

    auto add_candidate = [&](std::string source, MeanControlPath const& path) {
        try
        {
            auto const reward = kind_reward(kf, path, problem);
            auto const policy = solve_hjb(reward, problem);
            r.f_candidates.push_back({std::move(source), path,
                                      evaluate(policy, reward, problem)});
        }
        catch (Error const& e)
        {
            r.diagnostics.push_back(source + " candidate: " + e.what());
        }
    };
    if (r.lower)
        add_candidate("f1_equilibrium", r.lower->m_star);
    if (r.upper)
        add_candidate("f2_equilibrium", r.upper->m_star);
    if (r.original && r.original->converged)
        add_candidate("f_fixed_point", r.original->m_star);

    if (r.f_candidates.empty())
        r.missing.push_back("V_f");
    else
    {
        for (std::size_t i = 1; i < r.f_candidates.size(); ++i)
            if (r.f_candidates[i].value.mean > r.f_candidates[r.f_best].value.mean)
                r.f_best = i;
        r.V_f = r.f_candidates[r.f_best].value;
    }

    EquilibriumResult const* aux[2] = {r.lower ? &*r.lower : nullptr,
                                       r.upper ? &*r.upper : nullptr};
    char const* aux_source[2] = {"f1_equilibrium", "f2_equilibrium"};
    for (int i = 0; i < 2; ++i)
    {
        if (!aux[i])
            continue;
        try
        {
            r.J_f_alpha[i] = evaluate(aux[i]->policy, aux[i]->m_star, kf, problem);
            r.controls_certified.push_back(i == 0 ? "alpha_hat_1" : "alpha_hat_2");
        }
        catch (Error const& e)
        {
            r.diagnostics.push_back(std::string("J_f(alpha_hat): ") + e.what());
        }
        for (auto const& c : r.f_candidates)
            if (c.source == aux_source[i])
                r.V_f_response[i] = c.value;
    }

    if (r.V_f1 && r.V_f2)
    {
        r.gap = r.V_f2->mean - r.V_f1->mean;
        r.sigma_gap = combined_stderr(*r.V_f1, *r.V_f2);
        r.epsilon_certified = r.gap + 3.0 * r.sigma_gap;
    }
    if (r.V_f && r.V_f2)
    {
        r.gap_upper = r.V_f2->mean - r.V_f->mean;
        r.sigma_upper = combined_stderr(*r.V_f, *r.V_f2);
    }
    if (r.V_f && r.V_f1)
    {
        r.gap_lower = r.V_f->mean - r.V_f1->mean;
        r.sigma_lower = combined_stderr(*r.V_f1, *r.V_f);
    }
    r.ordering_holds = r.V_f1 && r.V_f && r.V_f2
                       && r.gap_lower >= -3.0 * r.sigma_lower
                       && r.gap_upper >= -3.0 * r.sigma_upper;
    return r;
}

Certificate epsilon_nash_certificate(SandwichReport const& report,
                                     std::optional<double> user_epsilon)
{
    Certificate c;
    c.epsilon_user = user_epsilon;
    if (!report.complete() || !report.J_f_alpha[0] || !report.J_f_alpha[1]
        || !report.V_f_response[0] || !report.V_f_response[1])
    {
        c.refusal = "incomplete sandwich report";
        return c;
    }
    c.issued = true;
    c.epsilon_lemma = report.epsilon_certified;
    for (int i = 0; i < 2; ++i)
    {
        c.direct_bound[i] = report.V_f_response[i]->mean - report.J_f_alpha[i]->mean;
        c.direct_stderr[i] = combined_stderr(*report.V_f_response[i],
                                             *report.J_f_alpha[i]);
    }
    double const eps = user_epsilon.value_or(c.epsilon_lemma);
    if (report.gap < eps || (!user_epsilon && report.gap <= eps))
        c.controls = {"alpha_hat_1", "alpha_hat_2"};
    return c;
}

double young_residual(MeanControlPath const& path,
                      Problem const& problem,
                      RewardKind const& kind)
{
    double s = 0;
    double const dt = problem.grids.dt();
    for (std::size_t k = 0; k + 1 < path.size(); ++k)
    {
        double const D = fee_density(path.node(k), problem.pool, kind.denom_exp,
                                     path.eps0());
        s += 0.5 * D * D / kind.young_eps * dt;
    }
    return s;
}

double upper_gap_bound(Problem const& problem, int e)
{
    auto const bc = problem.bound_constants();
    auto const& pool = problem.pool;
    double const top = pool.X0 + bc.T * bc.M;
    return bc.M * spread_factor(pool.phi) * pool.k0
           * (std::pow(bc.eps0, -2.0 * e) + std::pow(top, -2.0 * e))
           * (1.0 + bc.T);
}

std::vector<SweepRow> phi_sweep(std::span<double const> phis,
                                FixedPointConfig const& config,
                                Problem const& problem,
                                RewardKind const& base,
                                YoungRule const& young)
{
    std::vector<SweepRow> rows(phis.size());
    unsigned const outer = std::min<unsigned>(
        problem.workers, static_cast<unsigned>(std::max<std::size_t>(phis.size(), 1)));
    parallel_for(phis.size(), outer, [&](std::size_t i) {
        auto& row = rows[i];
        row.phi = phis[i];
        try
        {
            row.spread = spread_factor(row.phi);
            Problem p = problem;
            p.pool.phi = row.phi;
            // Leftover workers go to the particle loops of each row.
            p.workers = std::max(1u, problem.workers / outer);
            RewardKind k = base;
            if (young)
                k.young_eps = young(row.phi);
            row.report = sandwich_report(config, p, k);
        }
        catch (Error const& e)
        {
            row.error = e.what();
        }
    });
    return rows;
}

void write_sweep_csv(std::ostream& os, std::span<SweepRow const> rows)
{
    os << "phi,spread_factor,V_f1,V_f1_se,V_f,V_f_se,V_f2,V_f2_se,gap,"
          "gap_upper,gap_lower,converged_f1,converged_f2\n";
    char buf[512];
    auto num = [](std::optional<ValueReport> const& v, bool se) {
        return v ? (se ? v->std_error : v->mean) : std::nan("");
    };
    for (auto const& row : rows)
    {
        SandwichReport const* r = row.report ? &*row.report : nullptr;
        std::optional<ValueReport> none;
        auto const& f1 = r ? r->V_f1 : none;
        auto const& f = r ? r->V_f : none;
        auto const& f2 = r ? r->V_f2 : none;
        std::snprintf(
            buf, sizeof buf,
            "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
            row.phi, row.spread, num(f1, false), num(f1, true), num(f, false),
            num(f, true), num(f2, false), num(f2, true),
            r ? r->gap : std::nan(""), r ? r->gap_upper : std::nan(""),
            r ? r->gap_lower : std::nan(""),
            r && r->lower && r->lower->converged ? 1 : 0,
            r && r->upper && r->upper->converged ? 1 : 0);
        os << buf;
    }
}

nlohmann::json to_json(ValueReport const& v)
{
    return {{"V", v.mean}, {"stderr", v.std_error}, {"n_paths", v.n_paths}};
}

namespace {

nlohmann::json opt_json(std::optional<ValueReport> const& v)
{
    return v ? to_json(*v) : nlohmann::json(nullptr);
}

nlohmann::json equilibrium_json(std::optional<EquilibriumResult> const& e)
{
    if (!e)
        return nullptr;
    return {{"converged", e->converged},
            {"iterations", e->iterations},
            {"residuals", e->residuals},
            {"value", to_json(e->value)},
            {"m_star", std::vector<double>(e->m_star.values().begin(),
                                           e->m_star.values().end())}};
}

}  // namespace

nlohmann::json to_json(SandwichReport const& r)
{
    nlohmann::json j;
    j["phi"] = r.problem.pool.phi;
    j["spread_factor"] = spread_factor(r.problem.pool.phi);
    j["young_eps"] = r.base.young_eps;
    j["denom_exp"] = r.base.denom_exp;
    j["V_f1"] = opt_json(r.V_f1);
    j["V_f"] = opt_json(r.V_f);
    j["V_f_label"] = "best-response value";
    j["V_f2"] = opt_json(r.V_f2);
    j["gap"] = r.gap;
    j["gap_upper"] = r.gap_upper;
    j["gap_lower"] = r.gap_lower;
    j["sigma_gap"] = r.sigma_gap;
    j["epsilon_certified"] = r.epsilon_certified;
    j["ordering_holds"] = r.ordering_holds;
    j["controls_certified"] = r.controls_certified;
    nlohmann::json cands = nlohmann::json::array();
    for (std::size_t i = 0; i < r.f_candidates.size(); ++i)
        cands.push_back({{"source", r.f_candidates[i].source},
                         {"value", to_json(r.f_candidates[i].value)},
                         {"selected", i == r.f_best}});
    j["f_candidates"] = cands;
    j["J_f_alpha_hat_1"] = opt_json(r.J_f_alpha[0]);
    j["J_f_alpha_hat_2"] = opt_json(r.J_f_alpha[1]);
    j["equilibrium_f1"] = equilibrium_json(r.lower);
    j["equilibrium_f2"] = equilibrium_json(r.upper);
    j["fixed_point_f"] = equilibrium_json(r.original);
    j["missing"] = r.missing;
    j["diagnostics"] = r.diagnostics;
    return j;
}

nlohmann::json to_json(Certificate const& c)
{
    nlohmann::json j;
    j["issued"] = c.issued;
    if (!c.issued)
    {
        j["refusal"] = c.refusal;
        return j;
    }
    j["epsilon_lemma"] = c.epsilon_lemma;
    j["epsilon_user"] = c.epsilon_user ? nlohmann::json(*c.epsilon_user)
                                       : nlohmann::json(nullptr);
    j["controls"] = c.controls;
    j["direct_bound"] = {c.direct_bound[0], c.direct_bound[1]};
    j["direct_stderr"] = {c.direct_stderr[0], c.direct_stderr[1]};
    return j;
}

}  // namespace ammfg
