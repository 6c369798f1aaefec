#pragma once

#include <cstddef>
#include <vector>

namespace ammfg {

/// Nodes and weights for E[g(Z)], Z ~ N(0, 1): sum_i w_i g(z_i). Exact for
/// polynomials of degree <= 2n - 1.
struct GaussHermite
{
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussHermite(std::size_t n);
};

}  // namespace ammfg
