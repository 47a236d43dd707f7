#pragma once

#include <array>
#include <span>

#include "cgb/boundary.hpp"
#include "cgb/curvature.hpp"
#include "cgb/scene.hpp"

namespace cgb {

/// Geometry of a codimension-two corner point where an M face meets an N
/// face: the dihedral angle, both face frames, the conormals of the corner
/// surface inside each face, the two second fundamental forms, and the
/// intrinsic 2D curvature of the corner surface. Conventions follow
/// BoundaryFrame: all normals point inward, tangential axes keep chart order.
class CornerFrame {
public:
    /// metric10: packed ambient metric jets (4 variables, degree 4) at a
    /// corner point; the two (axis, side) pairs name the meeting faces.
    CornerFrame(std::span<const Jet> metric10, int axis_m, Side side_m, int axis_n, Side side_n);
    /// Evaluates the chart metric at x (both face coordinates are snapped).
    /// Throws input_error unless the faces are labeled M and N respectively.
    CornerFrame(ChartEvaluator& eval, std::array<double, kDim> x, int axis_m, Side side_m,
                int axis_n, Side side_n);

    const BoundaryFrame& face_m() const { return m_; }
    const BoundaryFrame& face_n() const { return n_; }
    /// The two chart axes spanning the corner surface, in chart order.
    std::span<const int, 2> tangential_axes() const { return std::span<const int, 2>(tang_); }
    /// Intrinsic geometry of the induced 2D metric in the tangential variables.
    const MetricGeometry& induced() const { return geo2_; }

    /// Dihedral angle theta0 in (0, pi), cos theta0 = -<mu_M, mu_N>.
    double angle() const { return theta0_; }

    /// Inward unit conormal of the corner inside M (resp. N), chart components.
    /// Built by projecting the inward crossing direction against the corner
    /// tangent plane, so the component on the face's own normal axis is an
    /// exact zero.
    double normal_m(int i) const { return nu_m_[i]; }
    double normal_n(int i) const { return nu_n_[i]; }

    /// Second fundamental forms of the corner surface with respect to the
    /// conormals above, lowered components; a, b index tangential_axes().
    double second_fundamental_m(int a, int b) const { return ii_m_[packed_index(2, a, b)]; }
    double second_fundamental_n(int a, int b) const { return ii_n_[packed_index(2, a, b)]; }
    /// Trace-free parts, lowered components.
    double traceless_m(int a, int b) const { return ii0_m_[packed_index(2, a, b)]; }
    double traceless_n(int a, int b) const { return ii0_n_[packed_index(2, a, b)]; }

    double mean_curvature_m() const { return eta_m_; } // eta_M = k^{ab} II^M_ab
    double mean_curvature_n() const { return eta_n_; }
    double traceless_m_norm2() const { return ii0_m_norm2_; } // |II0_M|^2_k
    double traceless_n_norm2() const { return ii0_n_norm2_; }
    double traceless_dot() const { return ii0_dot_; } // II0_M . II0_N

    /// Gaussian curvature of the corner surface.
    double gaussian() const { return gauss_; }

    /// Slopes nu_M(H_M) and nu_N(H_N) of the face mean curvature fields.
    double green_m() const { return green_m_; }
    double green_n() const { return green_n_; }

    /// nu_M(f) resp. nu_N(f) at the point for an ambient jet f of degree >= 1.
    double normal_m_derivative(const Jet& f) const;
    double normal_n_derivative(const Jet& f) const;
    /// Restriction of an ambient jet to the corner variables (2-variable jet).
    Jet tangential(const Jet& f) const;

private:
    void build();

    int axis_m_, axis_n_;
    Side side_m_, side_n_;
    std::array<int, 2> tang_{};
    BoundaryFrame m_, n_;
    MetricGeometry geo2_;
    double theta0_ = 0.0;
    std::array<double, 4> nu_m_{}, nu_n_{};
    std::array<double, 3> ii_m_{}, ii_n_{};   // packed 2x2, lowered
    std::array<double, 3> ii0_m_{}, ii0_n_{}; // packed 2x2, lowered
    double eta_m_ = 0.0, eta_n_ = 0.0;
    double ii0_m_norm2_ = 0.0, ii0_n_norm2_ = 0.0, ii0_dot_ = 0.0;
    double gauss_ = 0.0, green_m_ = 0.0, green_n_ = 0.0;
};

/// Angle-defect corner curvature entering the bulk-boundary-corner identity;
/// transforms with weight -2 up to the operator below.
double u_curvature(const CornerFrame& frame);

/// Pointwise conformally invariant corner curvature of weight -2.
double g_curvature(const CornerFrame& frame);

/// Second-order conformally covariant corner operator applied to an ambient
/// scalar field u given as a jet of degree >= 2.
double p2b_apply(const CornerFrame& frame, const Jet& u);

/// Corner measure integrand (U + G + Green terms) / (4 pi^2); agrees with
/// aw_corner_density pointwise.
double corner_integrand(const CornerFrame& frame);

/// Pieces of the outer-angle integrand at one direction angle theta, each
/// computed several ways: shape_* is the pure second-fundamental-form factor
/// for the conormal cos(theta) nu_M + sin(theta) mu_M, mixed_* the curvature
/// factor. *_eps are raw epsilon contractions, shape_det the 2x2 determinant
/// route, *_closed the trace expansions. The shape factor for the crossing
/// conormal mu_M is rebuilt from the angle decomposition of mu_M through
/// nu_M, nu_N rather than contracted directly, so the quadrature oracle
/// shares no Christoffel algebra with the closed form.
struct CornerDensityParts {
    double shape_eps = 0.0;
    double shape_det = 0.0;
    double shape_closed = 0.0;
    double mixed_eps = 0.0;
    double mixed_closed = 0.0;
    double integrand = 0.0; // (shape + mixed/2) / (2 pi^2), closed route
};

CornerDensityParts corner_density_parts(const CornerFrame& frame, double theta);

enum class CornerRule { kClosed, kQuadrature };

/// Corner measure density against the induced area element: the outer-angle
/// integral of the density parts over theta in (theta0 + pi/2, 3 pi/2). The
/// closed rule evaluates the angle integrals analytically; the quadrature
/// rule integrates numerically with a Gauss rule of the given order and
/// throws numerical_error if the two routes disagree beyond 1e-8 relative.
double aw_corner_density(const CornerFrame& frame, CornerRule rule = CornerRule::kClosed,
                         int theta_order = 32);

/// The three angle integrals over (theta0 + pi/2, 3 pi/2) that reduce the
/// outer-angle integral to the closed form.
struct ThetaIntegrals {
    double cos2 = 0.0;   // integral of cos^2
    double sin2 = 0.0;   // integral of sin^2
    double sincos = 0.0; // integral of sin cos
};

ThetaIntegrals theta_integrals_closed(double theta0);
ThetaIntegrals theta_integrals_quadrature(double theta0, int order);

} // namespace cgb
