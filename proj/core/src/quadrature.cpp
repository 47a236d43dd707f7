#include "cgb/quadrature.hpp"

#include <numbers>

namespace cgb {

QuadratureRule gauss_legendre(int n) {
    if (n < 1 || n > 64)
        throw input_error("Gauss-Legendre order must be between 1 and 64");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-based starting guess for the i-th root of P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x; // guesses descend from +1; store ascending
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

AxisRule gauss_axis(int order, double lo, double hi) {
    QuadratureRule rule = gauss_legendre(order);
    AxisRule axis;
    axis.nodes.resize(order);
    axis.weights.resize(order);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < order; ++i) {
        axis.nodes[i] = mid + half * rule.nodes[i];
        axis.weights[i] = half * rule.weights[i];
    }
    return axis;
}

AxisRule midpoint_axis(int order, double lo, double hi) {
    if (order < 1)
        throw input_error("midpoint rule order must be positive");
    AxisRule axis;
    axis.nodes.resize(order);
    axis.weights.resize(order);
    double step = (hi - lo) / order;
    for (int i = 0; i < order; ++i) {
        axis.nodes[i] = lo + (i + 0.5) * step;
        axis.weights[i] = step;
    }
    return axis;
}

} // namespace cgb
