#pragma once

// Gauss-Legendre quadrature on [0, 1]. Nodes are the roots of the Legendre
// polynomial, located by Newton iteration on the usual three-term recurrence.

#include <cmath>
#include <vector>

#include "orthlyap/error.hpp"

namespace orthlyap {

struct QuadratureRule {
    std::vector<double> nodes;    // in (0, 1)
    std::vector<double> weights;  // sum to 1
};

inline QuadratureRule gauss_legendre_01(int order) {
    if (order < 1) throw Error("quadrature order must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    const int n = order;
    for (int i = 0; i < n; ++i) {
        // root of P_n on [-1, 1], Abramowitz & Stegun initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        // map [-1,1] -> [0,1]; mirror so nodes come out ascending
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (x + 1.0);
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace orthlyap
