#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ammfg/errors.hpp"
#include "ammfg/flow_grid.hpp"

using namespace ammfg;

TEST_CASE("admissible")
{
    auto r = admissible(ControlBounds{0, 1}, 100, 1);
    CHECK(r.ok);
    CHECK(r.eps0 == 99.0);
    CHECK_FALSE(admissible(ControlBounds{0, 100}, 100, 1).ok);
    r = admissible(ControlBounds{0, 0}, 100, 1);
    CHECK(r.ok);
    CHECK(r.eps0 == 100.0);
    r = admissible(ControlBounds{-2, 1}, 100, 1);
    CHECK(r.ok);
    CHECK(r.eps0 == 98.0);
}

TEST_CASE("make_path examples")
{
    Grids g;
    SUBCASE("zero path")
    {
        auto const p = constant_path(0, g, ControlBounds{}, 100);
        for (std::size_t k = 0; k < p.size(); ++k)
        {
            CHECK(p.cumulative()[k] == 0.0);
            CHECK(p.reserve()[k] == 100.0);
        }
    }
    SUBCASE("m = 0.9 X0 / T")
    {
        ControlBounds b{0, 90};
        auto const p = constant_path(90, g, b, 100);
        CHECK(p.reserve().back() == doctest::Approx(10.0).epsilon(1e-13));
        CHECK(p.eps0() == 10.0);
    }
    SUBCASE("m = X0 / T + delta")
    {
        ControlBounds b{0, 101};
        CHECK_THROWS_AS(constant_path(101, g, b, 100), AdmissibilityError);
        CHECK_THROWS_AS(constant_path(101, g, ControlBounds{}, 100), AdmissibilityError);
    }
    SUBCASE("offending node is named")
    {
        std::vector<double> v(g.n_t + 1, 0.1);
        v[37] = 0.75;
        try
        {
            make_path(v, g, ControlBounds{}, 100);
            FAIL("expected rejection");
        }
        catch (AdmissibilityError const& e)
        {
            CHECK(e.node() == 37);
            CHECK(std::string(e.what()).find("node 37") != std::string::npos);
        }
    }
    SUBCASE("length mismatch")
    {
        std::vector<double> v(g.n_t, 0.1);
        CHECK_THROWS_AS(make_path(v, g, ControlBounds{}, 100), UsageError);
    }
}

TEST_CASE("cumulative is exact for constant paths")
{
    Grids g;
    g.n_t = 137;
    g.T = 2.5;
    for (double m : {0.013, 0.25, 0.5})
    {
        auto const p = constant_path(m, g, ControlBounds{}, 100);
        for (std::size_t k = 0; k <= g.n_t; ++k)
        {
            double const t = g.time(k);
            if (t > 0)
                REQUIRE(std::abs(p.cumulative()[k] - m * t) <= 1e-14 * m * t);
        }
        CHECK(p.at(1.234).C == doctest::Approx(m * 1.234).epsilon(1e-14));
    }
}

TEST_CASE("path refinement is second order")
{
    auto smooth = [](double t) { return 0.25 + 0.2 * std::sin(3 * t); };
    double const exact = 0.25 + 0.2 * (1 - std::cos(3.0)) / 3;
    double prev_err = 0;
    for (std::size_t n : {20u, 40u, 80u, 160u})
    {
        Grids g;
        g.n_t = n;
        std::vector<double> v(n + 1);
        for (std::size_t k = 0; k <= n; ++k)
            v[k] = smooth(g.time(k));
        auto const p = make_path(v, g, ControlBounds{}, 100);
        double const err = std::abs(p.cumulative().back() - exact);
        if (prev_err > 0)
            CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.02));
        prev_err = err;
    }
}

TEST_CASE("interpolation between nodes")
{
    Grids g;
    g.n_t = 4;
    std::vector<double> v{0.0, 0.4, 0.2, 0.2, 0.0};
    auto const p = make_path(v, g, ControlBounds{}, 100);
    CHECK(p.at(0.125).m == doctest::Approx(0.2));
    // Linear piece on [0, 0.25]: C(0.125) = 0.5 * 1.6 * 0.125^2.
    CHECK(p.at(0.125).C == doctest::Approx(0.0125));
    CHECK(p.at(0.25).C == doctest::Approx(p.cumulative()[1]));
    CHECK(p.at(1.0).C == doctest::Approx(p.cumulative()[4]));
    CHECK(p.at(2.0).m == 0.0);
}

TEST_CASE("control grid")
{
    ControlBounds b{0, 0.5};
    auto const a = b.control_grid(41);
    CHECK(a.size() == 41);
    CHECK(a.front() == 0.0);
    CHECK(a.back() == 0.5);
    CHECK(a[20] == doctest::Approx(0.25));
    CHECK(b.control_grid(1) == std::vector<double>{0.0});
    CHECK(ControlBounds{0, 0}.control_grid(5).size() == 1);
    CHECK(b.M() == 0.5);
    CHECK(ControlBounds{-0.7, 0.5}.M() == 0.7);
}

TEST_CASE("grid validation lists every violation")
{
    Grids g;
    CHECK(grid_violations(g).empty());
    g.T = 0;
    g.n_t = 1;
    g.x_min = 3;
    g.x_max = 3;
    g.n_a = 0;
    g.n_particles = 0;
    CHECK(grid_violations(g).size() == 5);
}

TEST_CASE("csv columns")
{
    Grids g;
    g.n_t = 2;
    auto const p = constant_path(0.5, g, ControlBounds{}, 100);
    std::ostringstream os;
    write_csv(os, p);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,m,C,R");
    std::getline(in, line);
    CHECK(line == "0,0.5,0,100");
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "1,0.5,0.5,99.5");
}
