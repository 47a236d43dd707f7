#pragma once

#include <array>
#include <span>

#include "cgb/curvature.hpp"
#include "cgb/scene.hpp"

namespace cgb {

/// Geometry of one box face at one of its points: ambient curvature, the
/// inward unit normal, the second fundamental form, and the induced metric
/// with its own 3D curvature pipeline. Face scalars (H, L, ...) are carried as
/// 4-variable jets on the parallel-slice foliation {x_normal = const}; only
/// tangential multi-indices of derived fields are ever read, so the extension
/// does not leak into results. Tangential axes keep their chart order.
class BoundaryFrame {
public:
    /// metric10: packed ambient metric jets (4 variables, degree 4) at a face
    /// point; axis/side name the face of the box.
    BoundaryFrame(std::span<const Jet> metric10, int axis, Side side);
    /// Evaluates the chart metric at x (the normal coordinate is snapped to
    /// the face). Throws input_error unless the face is labeled M or N.
    BoundaryFrame(ChartEvaluator& eval, std::array<double, kDim> x, int axis, Side side);

    int normal_axis() const { return axis_; }
    Side side() const { return side_; }
    /// The three chart axes spanning the face, in chart order.
    std::span<const int, 3> tangential_axes() const { return std::span<const int, 3>(tang_); }

    const MetricGeometry& ambient() const { return geo4_; }
    /// Intrinsic geometry of the induced metric in the tangential variables.
    const MetricGeometry& induced() const { return geo3_; }

    /// Inward unit normal component mu^i, chart basis, degree-3 jet.
    const Jet& normal(int i) const { return mu_[i]; }
    double normal_value(int i) const { return mu_[i].value(); }

    /// Second fundamental form L_ab = <nabla_{e_a} e_b, mu> with respect to
    /// the inward normal; a, b index tangential_axes(). Degree-3 jets.
    const Jet& second_fundamental(int a, int b) const { return l_[packed_index(3, a, b)]; }
    double second_fundamental_value(int a, int b) const {
        return l_[packed_index(3, a, b)].value();
    }
    /// Trace-free part of L, lowered components.
    double traceless_value(int a, int b) const { return l0_[packed_index(3, a, b)].value(); }
    /// Trace-free part with both indices raised by h.
    double traceless_up(int a, int b) const { return l0_up_[a][b]; }

    /// Mean curvature h^{ab} L_ab on the slice foliation, degree-3 jet.
    const Jet& mean_curvature_field() const { return hfield_; }
    double mean_curvature() const { return hfield_.value(); }

    double traceless_norm2() const { return l0_norm2_; }     // |L0|^2_h
    double traceless_cubed() const { return l0_cubed_; }     // tr_h L0^3
    double induced_scalar() const { return geo3_.scalar_value(); }
    double ambient_scalar() const { return geo4_.scalar_value(); }
    /// L0^{ab} R^h_{ab} with the intrinsic Ricci of the face.
    double traceless_dot_induced_ricci() const { return l0_dot_rich_; }
    /// L0^{ab} R^g_{ab} with the ambient Ricci restricted to tangential slots.
    double traceless_dot_ambient_ricci() const { return l0_dot_ricg_; }
    double laplacian_mean_curvature() const { return lap_h_mean_; } // Delta_h H
    double normal_scalar_slope() const { return mu_scal_; }        // mu(R_g)

    /// mu(f) at the point for an ambient jet f of degree >= 1.
    double normal_derivative(const Jet& f) const;
    /// mu(f) as a field on the slice foliation, one degree below min(3, f).
    Jet normal_derivative_field(const Jet& f) const;
    /// Restriction of an ambient jet to the face variables (3-variable jet).
    Jet tangential(const Jet& f) const;

private:
    void build();

    int axis_;
    Side side_;
    std::array<int, 3> tang_{};
    MetricGeometry geo4_;
    MetricGeometry geo3_;
    std::array<Jet, 4> mu_;
    std::array<Jet, 6> l_, l0_, hinv_; // packed 3x3, 4-variable jets
    Jet hfield_;
    double l0_up_[3][3] = {}; // L0 with both indices raised by h
    double l0_norm2_ = 0.0, l0_cubed_ = 0.0;
    double l0_dot_rich_ = 0.0, l0_dot_ricg_ = 0.0;
    double lap_h_mean_ = 0.0, mu_scal_ = 0.0;
};

/// Third-order boundary curvature entering the bulk-plus-boundary identity;
/// transforms with weight -3 up to the operator below.
double t_curvature(const BoundaryFrame& frame);

/// Pointwise conformally invariant boundary curvature of weight -3.
double l_curvature(const BoundaryFrame& frame);

/// Third-order conformally covariant boundary operator applied to an ambient
/// scalar field u given as a jet of degree >= 3.
double p3_apply(const BoundaryFrame& frame, const Jet& u);

/// Pieces of the boundary measure density, each computed two ways: shape_* is
/// the pure second-fundamental-form term, mixed_* carries one ambient
/// curvature factor. *_eps are raw epsilon contractions; shape_det is the
/// 3x3 determinant route; *_closed are the trace expansions in H, L0.
struct BoundaryDensityParts {
    double shape_eps = 0.0;
    double shape_det = 0.0;
    double shape_closed = 0.0;
    double mixed_eps = 0.0;
    double mixed_closed = 0.0;
    /// Magnitude of the contraction terms before cancellation; cross-checks
    /// are meaningful relative to this, not to the (possibly tiny) value.
    double scale = 1.0;
    double density = 0.0; // (shape + mixed/2) / (2 pi^2), closed route
};

BoundaryDensityParts aw_boundary_parts(const BoundaryFrame& frame);

/// Boundary measure density against the induced volume element. Internally
/// recomputes both pieces by raw epsilon contraction and by the determinant
/// identity and throws numerical_error if any pair disagrees beyond 1e-10
/// relative to the overall scale.
double aw_boundary_density(const BoundaryFrame& frame);

} // namespace cgb
