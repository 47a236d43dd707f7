#pragma once

#include <array>
#include <span>

#include "cgb/jet.hpp"

namespace cgb {

/// Packed upper-triangle index for an n x n symmetric matrix, row by row:
/// (0,0),(0,1),...,(0,n-1),(1,1),...
int packed_index(int n, int i, int j);

/// Determinant of a packed symmetric jet matrix, n in {2,3,4}, carried at the
/// common degree of the entries.
Jet packed_sym_det(std::span<const Jet> m, int n);

/// Inverse of a packed symmetric jet matrix, adjugate over determinant; the
/// output is carried at the entries' degree. Throws numerical_error when the
/// determinant vanishes at the base point.
void packed_sym_inverse(std::span<const Jet> m, int n, std::span<Jet> out);

/// Derived metric data at one point of an n-dimensional chart, n in {2,3,4}.
/// Input is the packed metric as jets of degree d >= 2; each derivative costs
/// one degree, so Christoffel symbols live at d-1, Ricci at d-2, and the full
/// lowered curvature is kept as plain values. Sign convention: on the unit
/// round sphere the lowered component R_1212 is negative while Ricci and the
/// scalar come out positive (Ric = (n-1) g).
class MetricGeometry {
public:
    explicit MetricGeometry(int n);

    void compute(std::span<const Jet> metric_packed);

    int dim() const { return n_; }
    int degree() const { return deg_; }
    /// det g at the base point, from a Cholesky pass over the values.
    double det() const { return det_; }

    const Jet& metric(int i, int j) const { return g_[packed_index(n_, i, j)]; }
    const Jet& metric_inverse(int i, int j) const { return ginv_[packed_index(n_, i, j)]; }
    /// Christoffel symbol with the upper index first.
    const Jet& christoffel(int i, int j, int k) const {
        return gamma_[i * npack_ + packed_index(n_, j, k)];
    }
    const Jet& ricci(int i, int j) const { return ric_[packed_index(n_, i, j)]; }
    const Jet& scalar() const { return scalar_; }

    double metric_value(int i, int j) const { return gval_[i][j]; }
    double metric_inverse_value(int i, int j) const { return ginvval_[i][j]; }
    double christoffel_value(int i, int j, int k) const { return gammaval_[i][j][k]; }
    /// d_axis Gamma^i_{jk} at the base point.
    double christoffel_derivative(int i, int j, int k, int axis) const {
        return dgamma_[i][j][k][axis];
    }
    /// Lowered curvature R_{ijkl} at the base point.
    double riemann(int i, int j, int k, int l) const { return riem_[i][j][k][l]; }
    double ricci_value(int i, int j) const { return ric_[packed_index(n_, i, j)].value(); }
    double scalar_value() const { return scalar_.value(); }

    /// Laplace-Beltrami of f at the base point (negative spectrum convention);
    /// f must be a jet in the same variables with degree >= 2.
    double laplacian(const Jet& f) const;
    /// Laplace-Beltrami of f as a field, carried at degree f.degree() - 2.
    Jet laplacian_jet(const Jet& f) const;

private:
    int n_ = 0, npack_ = 0, deg_ = 0;
    double det_ = 0.0;
    std::array<Jet, 10> g_, ginv_;
    std::array<Jet, 40> gamma_; // [i * npack + packed(j,k)]
    std::array<Jet, 10> ric_;
    Jet scalar_;
    double gval_[4][4] = {}, ginvval_[4][4] = {};
    double gammaval_[4][4][4] = {};
    double dgamma_[4][4][4][4] = {};
    double riem_[4][4][4][4] = {};
};

/// Pointwise interior quantities of a 4-dimensional metric: trace-adjusted
/// curvature tensors, the fourth-order curvature scalar q, and the three forms
/// of the transgression-free volume density that the verification compares.
/// All densities are coefficients of the Riemannian volume element.
struct InteriorQuantities {
    double scal = 0.0;     // scalar curvature
    double lap_scal = 0.0; // Laplacian of the scalar curvature
    double j_trace = 0.0;  // metric trace of the Schouten tensor
    double p[4][4] = {};   // Schouten tensor, lowered
    double p_norm2 = 0.0;
    double ric_norm2 = 0.0;
    double riem_norm2 = 0.0;
    double weyl[4][4][4][4] = {}; // lowered Weyl tensor
    double weyl_norm2 = 0.0;
    double q = 0.0;             // 2(J^2 - |P|^2) - lap_scal / 6
    double q_scalar_form = 0.0; // (-lap_scal + scal^2 - 3 |Ric|^2) / 6
    /// Epsilon-contraction (Pfaffian) form of the Euler density.
    double pfaffian_density = 0.0;
    /// Same density through the Weyl/Schouten decomposition.
    double psi_decomposition = 0.0;
    /// Same density as (|W|^2/8 + q/2 + lap_scal/12) / (4 pi^2).
    double integrand = 0.0;
    /// Interior term of the curvature identity: |W|^2/8 + q/2, without the
    /// normalizing constant and without the pure-divergence part.
    double gb_density = 0.0;
};

InteriorQuantities interior_quantities(const MetricGeometry& geo);

} // namespace cgb
