#include "bicm/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace bicm {

// Newton iteration on the orthonormal Hermite recurrence; initial guesses per
// Numerical Recipes' gauher. Roots are symmetric, so only the upper half is
// solved and mirrored.
HermiteRule gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
    const int n = order;
    const double pim4 = 0.7511255444649425; // pi^{-1/4}
    const int max_iter = 200;
    const double eps = 1e-15;

    HermiteRule rule;
    rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
    rule.weights.assign(static_cast<std::size_t>(n), 0.0);

    const int half = (n + 1) / 2;
    double z = 0.0, pp = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(static_cast<double>(2 * n + 1)) -
                1.85575 * std::pow(static_cast<double>(2 * n + 1), -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[static_cast<std::size_t>(n - 1)];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[static_cast<std::size_t>(n - 2)];
        } else {
            z = 2.0 * z - rule.nodes[static_cast<std::size_t>(n - i + 1)];
        }
        int it = 0;
        for (; it < max_iter; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= eps) break;
        }
        if (it == max_iter) throw std::runtime_error("Gauss-Hermite iteration did not converge");
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
        rule.nodes[static_cast<std::size_t>(i)] = -z;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / (pp * pp);
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

std::size_t QuadratureGrid::tensor_size() const {
    std::size_t s = 1;
    for (int d = 0; d < dims; ++d) s *= static_cast<std::size_t>(order);
    return s;
}

QuadratureGrid make_grid(int order, int dims) {
    if (dims < 1) throw std::invalid_argument("grid dims must be >= 1");
    return {order, dims, gauss_hermite(order)};
}

} // namespace bicm
