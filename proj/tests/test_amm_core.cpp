#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ammfg/amm_core.hpp"
#include "ammfg/errors.hpp"
#include "oracle.hpp"

using namespace ammfg;
using oracle::exact;
using oracle::frac;
using oracle::Q;
using oracle::rel_err;

namespace {

PoolState pool(double X, double Y, double k)
{
    return {X, Y, k};
}

// Exact swap: delta_out = Y - k/(X + phi d), k' = (X + d) k / (X + phi d).
struct ExactSwap
{
    Q out, X, Y, k;
};

ExactSwap exact_swap(Q X, Q Y, Q k, Q phi, Q d)
{
    Q const eff = X + phi * d;
    return {Y - k / eff, X + d, k / eff, (X + d) * k / eff};
}

}  // namespace

TEST_CASE("spot_price")
{
    CHECK(spot_price(pool(100, 10000, 1e6)) == 100.0);
    CHECK(spot_price(pool(1, 1, 1)) == 1.0);
    CHECK_THROWS_AS(spot_price(pool(0, 1, 0)), DomainError);
    CHECK_THROWS_AS(spot_price(pool(-1, 1, -1)), DomainError);

    // State after the phi = 0.997, delta = 1 swap.
    auto const s = execute_swap(pool(100, 10000, 1e6), 1.0, 0.997);
    auto const e = exact_swap(100, 10000, 1000000, frac(997, 1000), 1);
    CHECK(s.new_state.X == 101.0);
    CHECK(rel_err(spot_price(s.new_state), e.Y / e.X) < 1e-14);
    CHECK(spot_price(s.new_state) == doctest::Approx(98.03251679762667).epsilon(1e-13));
}

TEST_CASE("bid_ask_mid")
{
    auto q = bid_ask_mid(100, 1.0);
    CHECK(q.bid == 100.0);
    CHECK(q.ask == 100.0);
    CHECK(q.mid == 100.0);

    q = bid_ask_mid(100, 0.5);
    CHECK(q.bid == 50.0);
    CHECK(q.ask == 200.0);
    CHECK(q.mid == 125.0);

    q = bid_ask_mid(100, 0.997);
    Q const phi = frac(997, 1000);
    Q const mid = 100 * (1 + phi * phi) / (2 * phi);
    CHECK(rel_err(q.mid, mid) < 1e-14);
    CHECK(q.mid == doctest::Approx(100.000451354).epsilon(1e-10));
    CHECK(q.mid == 0.5 * (q.bid + q.ask));

    CHECK_THROWS_AS(bid_ask_mid(100, 0.0), DomainError);
    CHECK_THROWS_AS(bid_ask_mid(100, 1.5), DomainError);
    CHECK_THROWS_AS(bid_ask_mid(0, 0.5), DomainError);
}

TEST_CASE("quote ordering")
{
    for (double phi : {0.1, 0.5, 0.9, 0.997, 1.0})
    {
        auto const q = bid_ask_mid(42.0, phi);
        CHECK(q.bid <= 42.0);
        CHECK(q.mid >= 42.0);
        CHECK(q.ask >= q.mid);
        if (phi == 1.0)
        {
            CHECK(q.bid == q.mid);
            CHECK(q.mid == q.ask);
        }
        else
        {
            CHECK(q.bid < 42.0);
            CHECK(q.mid > 42.0);
            CHECK(q.ask > q.mid);
        }
    }
}

TEST_CASE("execute_swap examples")
{
    SUBCASE("zero fee")
    {
        auto const r = execute_swap(pool(100, 10000, 1e6), 25, 1.0);
        CHECK(r.delta_out == doctest::Approx(2000).epsilon(1e-14));
        CHECK(r.new_state.k == doctest::Approx(1e6).epsilon(1e-14));
        CHECK(r.new_state.X == 125.0);
    }
    SUBCASE("phi = 0.5")
    {
        auto const r = execute_swap(pool(100, 10000, 1e6), 10, 0.5);
        auto const e = exact_swap(100, 10000, 1000000, frac(1, 2), 10);
        CHECK(rel_err(r.delta_out, e.out) < 1e-14);
        CHECK(rel_err(r.new_state.k, e.k) < 1e-14);
        CHECK(r.delta_out == doctest::Approx(476.19047619).epsilon(1e-10));
        CHECK(r.new_state.k == doctest::Approx(1047619.0476190).epsilon(1e-12));
        CHECK(r.execution_price == doctest::Approx(r.delta_out / 10));
    }
    SUBCASE("phi = 0.997")
    {
        auto const r = execute_swap(pool(100, 10000, 1e6), 1, 0.997);
        auto const e = exact_swap(100, 10000, 1000000, frac(997, 1000), 1);
        CHECK(rel_err(r.delta_out, e.out) < 1e-12);
        CHECK(rel_err(r.new_state.k, e.k) < 1e-14);
        CHECK(r.delta_out == doctest::Approx(98.71580343970614).epsilon(1e-12));
        CHECK(r.new_state.k == doctest::Approx(1000029.7038525897).epsilon(1e-14));
    }
    SUBCASE("depletion")
    {
        CHECK_THROWS_AS(execute_swap(pool(100, 10000, 1e6), -100, 0.997),
                        ReserveDepletionError);
        CHECK_THROWS_AS(execute_swap(pool(100, 10000, 1e6), -150, 1.0),
                        ReserveDepletionError);
    }
    SUBCASE("zero trade")
    {
        auto const r = execute_swap(pool(100, 10000, 1e6), 0, 0.997);
        CHECK(r.delta_out == 0.0);
        CHECK(r.new_state.k == 1e6);
        CHECK(r.execution_price == 100.0);
    }
}

TEST_CASE("negative delta_in keeps invariant growth")
{
    auto const r = execute_swap(pool(100, 10000, 1e6), -10, 0.997);
    CHECK(r.new_state.X == 90.0);
    CHECK(r.delta_out < 0.0);
    CHECK(r.new_state.k > 1e6);
    CHECK(r.new_state.X * r.new_state.Y == doctest::Approx(r.new_state.k).epsilon(1e-14));
    // Zero fee: the mirror and the forward formula agree.
    auto const z = execute_swap(pool(100, 10000, 1e6), -10, 1.0);
    CHECK(z.new_state.k == doctest::Approx(1e6).epsilon(1e-14));
    CHECK(spot_price(z.new_state) == doctest::Approx(1e6 / 8100).epsilon(1e-14));
}

TEST_CASE("swap invariants on random trades")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 20000; ++i)
    {
        double const X = 1 + 999 * u(rng);
        double const Y = 1 + 999 * u(rng);
        double const phi = i % 5 == 0 ? 1.0 : 0.5 + 0.5 * u(rng);
        double const d = (u(rng) - 0.3) * X;
        auto const r = execute_swap(pool(X, Y, X * Y), d, phi);
        double const k = X * Y;
        auto const& s = r.new_state;
        REQUIRE(std::abs(s.X * s.Y - s.k) <= 1e-12 * s.k);
        if (phi < 1.0 && d != 0.0)
            REQUIRE(s.k > k);
        else
            REQUIRE(std::abs(s.k - k) <= 1e-12 * k);
        if (d >= 0)
            REQUIRE(r.delta_out >= 0);
    }
}

TEST_CASE("price_after_aggregate")
{
    PoolParams p;
    p.phi = 1.0;
    CHECK(price_after_aggregate(p, 0) == 100.0);
    CHECK(price_after_aggregate(p, -50) == 400.0);
    p.phi = 0.5;
    CHECK(rel_err(price_after_aggregate(p, 10), Q(1000000) / (105 * 110)) < 1e-15);
    CHECK(price_after_aggregate(p, 10) == doctest::Approx(86.580).epsilon(1e-4));
    CHECK_THROWS_AS(price_after_aggregate(p, -100), ReserveDepletionError);
    CHECK_THROWS_AS(price_after_aggregate(p, -250), ReserveDepletionError);
}

TEST_CASE("aggregate price equals single-swap spot")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 5000; ++i)
    {
        PoolParams p;
        p.X0 = 10 + 990 * u(rng);
        p.k0 = p.X0 * (10 + 990 * u(rng));
        p.phi = 0.5 + 0.5 * u(rng);
        double const d = 3 * p.X0 * u(rng);
        auto const s = execute_swap(PoolState::initial(p), d, p.phi).new_state;
        double const agg = price_after_aggregate(p, d);
        REQUIRE(std::abs(spot_price(s) - agg) <= 1e-12 * agg);
        REQUIRE(std::abs(s.k - invariant_after_aggregate(p, d)) <= 1e-12 * s.k);
    }
    // Zero fee: both signs.
    PoolParams p;
    p.phi = 1.0;
    for (double d : {-60.0, -1.0, 0.0, 5.0})
    {
        auto const s = execute_swap(PoolState::initial(p), d, 1.0).new_state;
        CHECK(spot_price(s) == doctest::Approx(price_after_aggregate(p, d)).epsilon(1e-13));
    }
}

TEST_CASE("spread_factor")
{
    CHECK(spread_factor(1.0) == 0.0);
    CHECK(spread_factor(0.5) == 0.25);
    CHECK(spread_factor(0.997) == doctest::Approx(4.5e-6).epsilon(0.01));
    CHECK(mid_price_factor(1.0) == 1.0);
    CHECK_THROWS_AS(spread_factor(0.0), DomainError);

    for (long long n : {5000LL, 9000LL, 9900LL, 9970LL, 9999LL})
    {
        Q const phi = frac(n, 10000);
        Q const a = (1 + phi * phi) / (2 * phi) - 1;
        Q const b = (1 - phi) * (1 - phi) / (2 * phi);
        CHECK(a == b);
        // The double implementation against the exact value at its own input.
        double const phid = static_cast<double>(n) / 10000.0;
        Q const pe = exact(phid);
        Q const want = (1 - pe) * (1 - pe) / (2 * pe);
        CHECK(rel_err(spread_factor(phid), want) < 1e-15);
        CHECK(rel_err(mid_price_factor(phid) - 1.0, want) < 1e-6);
    }

    double prev = spread_factor(0.01);
    for (int i = 2; i <= 100; ++i)
    {
        double const s = spread_factor(0.01 * i);
        CHECK(s < prev);
        prev = s;
    }
    CHECK(prev == 0.0);
}

TEST_CASE("pool validation lists every violation")
{
    PoolParams p;
    p.X0 = -1;
    p.k0 = 0;
    p.phi = 1.2;
    p.sigma0 = -1;
    CHECK(pool_violations(p).size() == 4);
    CHECK_THROWS_AS(validate(p), DomainError);
    p = PoolParams{};
    p.phi = 0.005;
    CHECK(pool_violations(p).size() == 1);
    CHECK(pool_violations(p, 0.001).empty());
    CHECK(pool_violations(PoolParams{}).empty());
}
