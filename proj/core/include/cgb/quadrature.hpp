#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "cgb/errors.hpp"

namespace cgb {

/// Compensated accumulator; used everywhere node contributions are summed so
/// results are reproducible and insensitive to magnitude spread.
struct KahanSum {
    double sum = 0.0, carry = 0.0;
    void add(double v) {
        double y = v - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

/// Nodes and weights on the reference interval [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes, weights;
};

/// Gauss-Legendre rule, exact for polynomials of degree 2n - 1. n in [1, 64].
QuadratureRule gauss_legendre(int n);

/// One coordinate axis of a tensor-product rule, mapped onto [lo, hi].
struct AxisRule {
    std::vector<double> nodes, weights;
    int size() const { return static_cast<int>(nodes.size()); }
};

AxisRule gauss_axis(int order, double lo, double hi);
/// Equispaced midpoints; the natural rule on a periodic axis, where it
/// converges faster than any power and never touches the seam.
AxisRule midpoint_axis(int order, double lo, double hi);

/// Tensor-product integration over 1 to 4 axes. The callback sees the node
/// coordinates in axis order and returns the full density (integrand times
/// any measure factor). Nodes are visited in lexicographic order and summed
/// with compensation, so the result is bit-stable across runs.
/// Visits every node of a tensor-product rule in lexicographic order, passing
/// the node coordinates and the product weight. For callers that accumulate
/// several integrands in one sweep; each accumulator should use a KahanSum.
template <class F>
void for_each_node(std::span<const AxisRule> axes, F&& f) {
    int dim = static_cast<int>(axes.size());
    if (dim < 1 || dim > 4) throw input_error("tensor integration needs 1 to 4 axes");
    for (const AxisRule& a : axes) {
        if (a.size() == 0) throw input_error("tensor integration axis has no nodes");
    }
    std::array<int, 4> idx{};
    std::array<double, 4> x{};
    for (;;) {
        double w = 1.0;
        for (int d = 0; d < dim; ++d) {
            x[d] = axes[d].nodes[idx[d]];
            w *= axes[d].weights[idx[d]];
        }
        f(std::span<const double>(x.data(), dim), w);
        int d = dim - 1;
        while (d >= 0 && ++idx[d] == axes[d].size()) idx[d--] = 0;
        if (d < 0) break;
    }
}

template <class F>
double integrate_tensor(std::span<const AxisRule> axes, F&& f) {
    KahanSum total;
    for_each_node(axes, [&](std::span<const double> x, double w) {
        double v = f(x);
        if (!std::isfinite(v))
            throw numerical_error("integrand is not finite at a quadrature node");
        total.add(w * v);
    });
    return total.value();
}

} // namespace cgb
