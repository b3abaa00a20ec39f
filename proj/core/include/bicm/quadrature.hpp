#pragma once

#include <vector>

namespace bicm {

/// Nodes and weights of the q-point Gauss-Hermite rule for weight e^{-t^2}
/// on (-inf, inf). Nodes ascend; weights sum to sqrt(pi).
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

HermiteRule gauss_hermite(int order);

/// Tensor quadrature grid over `dims` dimensions (q^dims nodes in total).
struct QuadratureGrid {
    int order = 0;
    int dims = 0;
    HermiteRule rule;

    std::size_t tensor_size() const;
};

QuadratureGrid make_grid(int order, int dims);

} // namespace bicm
