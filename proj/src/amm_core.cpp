#include "ammfg/amm_core.hpp"

#include <cmath>
#include <sstream>

#include "ammfg/errors.hpp"

namespace ammfg {
namespace {

void check_phi(double phi)
{
    if (!(phi > 0.0 && phi <= 1.0))
    {
        std::ostringstream msg;
        msg << "fee factor phi=" << phi << " outside (0, 1]";
        throw DomainError(msg.str());
    }
}

}  // namespace

std::vector<std::string>
pool_violations(PoolParams const& params, double phi_floor)
{
    std::vector<std::string> out;
    if (!(params.X0 > 0.0))
        out.push_back("pool.X0 must be > 0");
    if (!(params.k0 > 0.0))
        out.push_back("pool.k0 must be > 0");
    if (!(params.phi > 0.0 && params.phi <= 1.0))
        out.push_back("pool.phi must lie in (0, 1]");
    else if (params.phi < phi_floor)
        out.push_back("pool.phi below configured floor phi_floor");
    if (!(params.sigma0 >= 0.0))
        out.push_back("pool.sigma0 must be >= 0");
    return out;
}

void validate(PoolParams const& params, double phi_floor)
{
    auto const v = pool_violations(params, phi_floor);
    if (v.empty())
        return;
    std::string msg = "invalid pool parameters:";
    for (auto const& s : v)
        msg += " " + s + ";";
    throw DomainError(msg);
}

PoolState PoolState::initial(PoolParams const& params)
{
    return {params.X0, params.Y0(), params.k0};
}

double spot_price(PoolState const& state)
{
    if (!(state.X > 0.0) || !(state.Y > 0.0))
        throw DomainError("spot price needs positive reserves");
    return state.Y / state.X;
}

Quotes bid_ask_mid(double price, double phi)
{
    check_phi(phi);
    if (!(price > 0.0))
        throw DomainError("price must be positive");
    Quotes q;
    q.bid = phi * price;
    q.ask = price / phi;
    q.mid = 0.5 * (q.bid + q.ask);
    return q;
}

SwapResult execute_swap(PoolState const& state, double delta_in, double phi)
{
    check_phi(phi);
    if (!(state.X > 0.0) || !(state.Y > 0.0))
        throw DomainError("swap needs positive reserves");

    SwapResult r;
    r.delta_in = delta_in;
    if (delta_in >= 0.0)
    {
        double const effective = state.X + phi * delta_in;
        double const y_after = state.k / effective;
        r.delta_out = state.Y - y_after;
        r.new_state.X = state.X + delta_in;
        r.new_state.Y = y_after;
        r.new_state.k = r.new_state.X * state.k / effective;
    }
    else
    {
        double const x_after = state.X + delta_in;
        if (!(x_after > 0.0))
            throw ReserveDepletionError("swap would drain the token-A reserve");
        // Trader pays b units of token B; only phi * b enters the pricing curve.
        double const b = (state.k / x_after - state.Y) / phi;
        r.delta_out = -b;
        r.new_state.X = x_after;
        r.new_state.Y = state.Y + b;
        r.new_state.k = x_after * r.new_state.Y;
    }
    if (!(r.new_state.X > 0.0) || !(r.new_state.Y > 0.0))
        throw ReserveDepletionError("swap would drain a pool reserve");
    r.execution_price = delta_in != 0.0 ? r.delta_out / delta_in
                                        : state.Y / state.X;
    return r;
}

double price_after_aggregate(PoolParams const& params, double delta_x)
{
    check_phi(params.phi);
    double const a = params.X0 + params.phi * delta_x;
    double const b = params.X0 + delta_x;
    if (!(a > 0.0) || !(b > 0.0))
        throw ReserveDepletionError("aggregate flow drains the pool");
    return params.k0 / (a * b);
}

double invariant_after_aggregate(PoolParams const& params, double delta_x)
{
    check_phi(params.phi);
    double const a = params.X0 + params.phi * delta_x;
    double const b = params.X0 + delta_x;
    if (!(a > 0.0) || !(b > 0.0))
        throw ReserveDepletionError("aggregate flow drains the pool");
    return b * params.k0 / a;
}

double spread_factor(double phi)
{
    check_phi(phi);
    double const d = 1.0 - phi;
    return d * d / (2.0 * phi);
}

double mid_price_factor(double phi)
{
    check_phi(phi);
    return (1.0 + phi * phi) / (2.0 * phi);
}

}  // namespace ammfg
