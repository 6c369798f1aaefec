#include "ammfg/flow_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "ammfg/errors.hpp"

namespace ammfg {

std::vector<double> Grids::times() const
{
    std::vector<double> out(n_t + 1);
    for (std::size_t k = 0; k <= n_t; ++k)
        out[k] = time(k);
    return out;
}

std::vector<double> Grids::states() const
{
    std::vector<double> out(n_x);
    for (std::size_t j = 0; j < n_x; ++j)
        out[j] = state(j);
    return out;
}

std::vector<std::string> grid_violations(Grids const& g)
{
    std::vector<std::string> out;
    if (!(g.T > 0.0))
        out.push_back("grid.T must be > 0");
    if (g.n_t < 2)
        out.push_back("grid.n_t must be >= 2");
    if (!(g.x_min < g.x_max))
        out.push_back("grid.x_min must be < grid.x_max");
    if (g.n_x < 2)
        out.push_back("grid.n_x must be >= 2");
    if (g.n_a < 1)
        out.push_back("grid.n_a must be >= 1");
    if (g.n_particles < 1)
        out.push_back("grid.n_particles must be >= 1");
    return out;
}

double ControlBounds::M() const
{
    return std::max(std::abs(a_min), std::abs(a_max));
}

std::vector<double> ControlBounds::control_grid(std::size_t n_a) const
{
    if (n_a == 0)
        throw UsageError("control grid needs at least one point");
    if (n_a == 1 || a_min == a_max)
        return {a_min};
    std::vector<double> out(n_a);
    double const step = (a_max - a_min) / static_cast<double>(n_a - 1);
    for (std::size_t i = 0; i < n_a; ++i)
        out[i] = a_min + static_cast<double>(i) * step;
    out.back() = a_max;
    return out;
}

Admissibility admissible(ControlBounds const& bounds, double X0, double T)
{
    double const M = bounds.M();
    if (!(bounds.a_min <= bounds.a_max) || !(M < X0 / T))
        return {false, 0.0};
    return {true, X0 - T * M};
}

PathPoint MeanControlPath::at(double t) const
{
    if (values_.empty())
        throw UsageError("empty mean path");
    if (t <= 0.0)
        return node(0);
    double const pos = t / dt_;
    std::size_t k = static_cast<std::size_t>(pos);
    if (k >= size() - 1)
        return node(size() - 1);
    double const s = t - static_cast<double>(k) * dt_;
    double const slope = (values_[k + 1] - values_[k]) / dt_;
    return {values_[k] + slope * s,
            cumulative_[k] + values_[k] * s + 0.5 * slope * s * s};
}

MeanControlPath make_path(std::span<double const> values,
                          Grids const& grids,
                          ControlBounds const& bounds,
                          double X0)
{
    if (values.size() != grids.n_t + 1)
    {
        std::ostringstream msg;
        msg << "mean path has " << values.size() << " nodes, grid needs "
            << grids.n_t + 1;
        throw UsageError(msg.str());
    }
    auto const adm = admissible(bounds, X0, grids.T);
    if (!adm.ok)
    {
        std::ostringstream msg;
        msg << "control bound M=" << bounds.M() << " violates M < X0/T="
            << X0 / grids.T;
        throw AdmissibilityError(msg.str());
    }

    MeanControlPath p;
    p.dt_ = grids.dt();
    p.X0_ = X0;
    p.eps0_ = adm.eps0;
    p.values_.assign(values.begin(), values.end());
    p.cumulative_.assign(values.size(), 0.0);
    p.reserve_.assign(values.size(), X0);

    double const slack = 1e-12 * std::max(1.0, bounds.M());
    double const floor_slack = 1e-12 * X0;
    for (std::size_t k = 0; k < values.size(); ++k)
    {
        double const v = values[k];
        if (!std::isfinite(v) || v < bounds.a_min - slack
            || v > bounds.a_max + slack)
        {
            std::ostringstream msg;
            msg << "mean control " << v << " at node " << k
                << " outside A=[" << bounds.a_min << ", " << bounds.a_max
                << "]";
            throw AdmissibilityError(msg.str(), k);
        }
        if (k > 0)
            p.cumulative_[k] = p.cumulative_[k - 1]
                               + 0.5 * p.dt_ * (values[k - 1] + v);
        p.reserve_[k] = X0 - p.cumulative_[k];
        if (p.reserve_[k] < adm.eps0 - floor_slack)
        {
            std::ostringstream msg;
            msg << "reserve " << p.reserve_[k] << " at node " << k
                << " below floor eps0=" << adm.eps0;
            throw AdmissibilityError(msg.str(), k);
        }
    }
    return p;
}

MeanControlPath constant_path(double m,
                              Grids const& grids,
                              ControlBounds const& bounds,
                              double X0)
{
    std::vector<double> v(grids.n_t + 1, m);
    return make_path(v, grids, bounds, X0);
}

void write_csv(std::ostream& os, MeanControlPath const& path)
{
    os << "t,m,C,R\n";
    char buf[128];
    for (std::size_t k = 0; k < path.size(); ++k)
    {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n",
                      path.dt() * static_cast<double>(k), path.values()[k],
                      path.cumulative()[k], path.reserve()[k]);
        os << buf;
    }
}

}  // namespace ammfg
