#include "ammfg/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "ammfg/errors.hpp"

namespace ammfg {

// Newton iteration on the orthonormal physicists' Hermite recurrence, then a
// change of variables z = sqrt(2) x, w -> w / sqrt(pi).
GaussHermite::GaussHermite(std::size_t n)
{
    if (n < 1 || n > 64)
        throw UsageError("Gauss-Hermite order must be in [1, 64]");
    std::vector<double> x(n), w(n);
    double const pim4 = std::pow(std::numbers::pi, -0.25);
    std::size_t const m = (n + 1) / 2;
    double const nd = static_cast<double>(n);
    double z = 0;
    for (std::size_t i = 0; i < m; ++i)
    {
        if (i == 0)
            z = std::sqrt(2.0 * nd + 1.0)
                - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(nd, 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[i - 2];

        double pp = 0;
        for (int it = 0; it < 100; ++it)
        {
            double p1 = pim4;
            double p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j)
            {
                double const p3 = p2;
                p2 = p1;
                double const jd = static_cast<double>(j);
                p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2
                     - std::sqrt(jd / (jd + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * nd) * p2;
            double const z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15)
                break;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    nodes.resize(n);
    weights.resize(n);
    double const scale = 1.0 / std::sqrt(std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i)
    {
        nodes[i] = std::numbers::sqrt2 * x[n - 1 - i];
        weights[i] = w[n - 1 - i] * scale;
    }
    if (n % 2 == 1)
        nodes[n / 2] = 0.0;
}

}  // namespace ammfg
