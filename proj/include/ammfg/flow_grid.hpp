#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ammfg {

/// Time, state and control discretization plus Monte Carlo sizing.
struct Grids
{
    double T = 1.0;
    std::size_t n_t = 100;
    double x_min = -5.0;
    double x_max = 5.0;
    std::size_t n_x = 201;
    std::size_t n_a = 41;
    std::size_t n_particles = 10000;
    std::uint64_t seed = 12345;

    double dt() const { return T / static_cast<double>(n_t); }
    double dx() const { return (x_max - x_min) / static_cast<double>(n_x - 1); }
    double time(std::size_t k) const { return static_cast<double>(k) * dt(); }
    double state(std::size_t j) const
    {
        return x_min + static_cast<double>(j) * dx();
    }
    std::vector<double> times() const;
    std::vector<double> states() const;
};

std::vector<std::string> grid_violations(Grids const& grids);

/// The control interval A = [a_min, a_max].
struct ControlBounds
{
    double a_min = 0.0;
    double a_max = 0.5;

    double M() const;
    /// n_a equally spaced points; a single point collapses to a_min.
    std::vector<double> control_grid(std::size_t n_a) const;
};

struct Admissibility
{
    bool ok = false;
    double eps0 = 0.0;
};

/// M < X0 / T; eps0 = X0 - T M is then the guaranteed reserve floor.
Admissibility admissible(ControlBounds const& bounds, double X0, double T);

struct PathPoint
{
    double m = 0;  ///< mean control
    double C = 0;  ///< cumulative mean control
};

/// m(t) on the time nodes together with C(t) = int_0^t m ds and the pool
/// reserve R(t) = X0 - C(t).
class MeanControlPath
{
  public:
    MeanControlPath() = default;

    std::size_t size() const { return values_.size(); }
    double dt() const { return dt_; }
    double horizon() const { return dt_ * static_cast<double>(size() - 1); }
    double X0() const { return X0_; }
    double eps0() const { return eps0_; }

    std::span<double const> values() const { return values_; }
    std::span<double const> cumulative() const { return cumulative_; }
    std::span<double const> reserve() const { return reserve_; }

    PathPoint node(std::size_t k) const { return {values_[k], cumulative_[k]}; }

    /// Piecewise-linear m between nodes; C integrates that interpolant exactly.
    PathPoint at(double t) const;

    friend MeanControlPath make_path(std::span<double const> values,
                                     Grids const& grids,
                                     ControlBounds const& bounds,
                                     double X0);

  private:
    double dt_ = 0;
    double X0_ = 0;
    double eps0_ = 0;
    std::vector<double> values_;
    std::vector<double> cumulative_;
    std::vector<double> reserve_;
};

/// Build a path from node values (n_t + 1 of them). Throws AdmissibilityError
/// naming the first offending node when a value leaves A or the reserve drops
/// below the floor.
MeanControlPath make_path(std::span<double const> values,
                          Grids const& grids,
                          ControlBounds const& bounds,
                          double X0);

MeanControlPath constant_path(double m,
                              Grids const& grids,
                              ControlBounds const& bounds,
                              double X0);

/// Columns: t, m, C, R.
void write_csv(std::ostream& os, MeanControlPath const& path);

}  // namespace ammfg
