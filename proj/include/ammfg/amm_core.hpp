#pragma once

#include <string>
#include <vector>

namespace ammfg {

//---------------------------------------------------------------------------//
// Constant-product pool with a proportional fee.
//
// Token A is the traded asset (reserve X), token B the numeraire (reserve Y).
// phi = 1 - tau is the fraction of an input that counts toward the invariant;
// the retained fee stays in the pool, so k = X * Y grows with volume.
//---------------------------------------------------------------------------//

inline constexpr double default_phi_floor = 0.01;

struct PoolParams
{
    double X0 = 100.0;
    double k0 = 1.0e6;
    double phi = 0.997;
    double sigma0 = 1.0;

    double tau() const { return 1.0 - phi; }
    double Y0() const { return k0 / X0; }
    double initial_price() const { return k0 / (X0 * X0); }
};

/// Every violated PoolParams invariant, in a stable order.
std::vector<std::string>
pool_violations(PoolParams const& params, double phi_floor = default_phi_floor);

/// Throws DomainError listing all violations.
void validate(PoolParams const& params, double phi_floor = default_phi_floor);

struct PoolState
{
    double X = 0;
    double Y = 0;
    double k = 0;

    static PoolState initial(PoolParams const& params);
};

struct SwapResult
{
    double delta_in = 0;
    double delta_out = 0;
    PoolState new_state;
    double execution_price = 0;
};

struct Quotes
{
    double bid = 0;
    double ask = 0;
    double mid = 0;
};

double spot_price(PoolState const& state);

Quotes bid_ask_mid(double price, double phi);

/// Trade delta_in units of token A into the pool (negative: take them out).
///
/// For delta_in >= 0 the fee is taken on the token-A input:
///   delta_out = Y - k / (X + phi * delta_in), k' = (X + delta_in) k / (X + phi * delta_in).
/// For delta_in < 0 the trader pays token B and the fee is taken on that
/// input, so k' >= k in both directions.
SwapResult execute_swap(PoolState const& state, double delta_in, double phi);

/// Price after all flow in [0, t] is treated as one aggregate transaction.
double price_after_aggregate(PoolParams const& params, double delta_x);

/// Invariant after the aggregate transaction.
double invariant_after_aggregate(PoolParams const& params, double delta_x);

/// (1 - phi)^2 / (2 phi): the relative premium of the mid price over P.
double spread_factor(double phi);

/// (1 + phi^2) / (2 phi): mid price over P.
double mid_price_factor(double phi);

}  // namespace ammfg
