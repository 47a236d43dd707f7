#include "cgb/corner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cgb/errors.hpp"
#include "cgb/quadrature.hpp"

namespace cgb {

namespace {

constexpr double kAngleGuard = 1e-6;

struct Perm2 {
    int p[2];
    double sign;
};

constexpr Perm2 kPerm2[2] = {{{0, 1}, 1.0}, {{1, 0}, -1.0}};

std::array<Jet, 10> corner_metric_jets(ChartEvaluator& eval, std::array<double, kDim>& x,
                                       int axis_m, Side side_m, int axis_n, Side side_n) {
    if (axis_m < 0 || axis_m >= kDim || axis_n < 0 || axis_n >= kDim || axis_m == axis_n)
        throw input_error("corner needs two distinct face axes");
    if (eval.chart().face_role(axis_m, side_m) != FaceRole::kM)
        throw input_error("corner frame requires an M face on the first axis");
    if (eval.chart().face_role(axis_n, side_n) != FaceRole::kN)
        throw input_error("corner frame requires an N face on the second axis");
    x[axis_m] = eval.chart().side_coordinate(axis_m, side_m);
    x[axis_n] = eval.chart().side_coordinate(axis_n, side_n);
    std::array<Jet, 10> m;
    eval.metric_jets(x, m);
    return m;
}

} // namespace

CornerFrame::CornerFrame(std::span<const Jet> metric10, int axis_m, Side side_m, int axis_n,
                         Side side_n)
    : axis_m_(axis_m), axis_n_(axis_n), side_m_(side_m), side_n_(side_n),
      m_(metric10, axis_m, side_m), n_(metric10, axis_n, side_n), geo2_(2) {
    if (axis_m == axis_n) throw input_error("corner needs two distinct face axes");
    build();
}

CornerFrame::CornerFrame(ChartEvaluator& eval, std::array<double, kDim> x, int axis_m,
                         Side side_m, int axis_n, Side side_n)
    : CornerFrame(corner_metric_jets(eval, x, axis_m, side_m, axis_n, side_n), axis_m, side_m,
                  axis_n, side_n) {}

void CornerFrame::build() {
    const MetricGeometry& g4 = m_.ambient();
    int tcount = 0;
    for (int i = 0; i < kDim; ++i)
        if (i != axis_m_ && i != axis_n_) tang_[tcount++] = i;

    std::array<Jet, 3> k2;
    for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b)
            k2[packed_index(2, a, b)] =
                g4.metric(tang_[a], tang_[b]).restricted(std::span<const int>(tang_));
    geo2_.compute(std::span<const Jet>(k2.data(), 3));
    gauss_ = 0.5 * geo2_.scalar_value();

    double cosv = 0.0;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            cosv -= g4.metric_value(i, j) * m_.normal_value(i) * n_.normal_value(j);
    theta0_ = std::acos(std::clamp(cosv, -1.0, 1.0));
    if (theta0_ < kAngleGuard || theta0_ > std::numbers::pi - kAngleGuard)
        throw numerical_error("corner angle is degenerate (faces nearly tangent)");

    // Conormal of the corner inside a face: take the inward crossing
    // coordinate direction, project out the corner tangent plane under g,
    // normalize. The result stays inside the face plane with an exact zero on
    // the face's normal axis.
    auto conormal = [&](int cross_axis, Side cross_side) {
        std::array<double, 4> v{};
        double s = cross_side == Side::kLo ? 1.0 : -1.0;
        v[cross_axis] = s;
        for (int a = 0; a < 2; ++a) {
            double c = 0.0;
            for (int b = 0; b < 2; ++b)
                c += geo2_.metric_inverse_value(a, b) * s * g4.metric_value(cross_axis, tang_[b]);
            v[tang_[a]] = -c;
        }
        double n2 = 0.0;
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) n2 += g4.metric_value(i, j) * v[i] * v[j];
        double inv = 1.0 / std::sqrt(n2);
        for (double& c : v) c *= inv;
        return v;
    };
    nu_m_ = conormal(axis_n_, side_n_);
    nu_n_ = conormal(axis_m_, side_m_);

    auto frame_ok = [&](const std::array<double, 4>& nu) {
        double unit = 0.0;
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) unit += g4.metric_value(i, j) * nu[i] * nu[j];
        bool ok = std::abs(unit - 1.0) < 1e-12;
        for (int a = 0; a < 2; ++a) {
            double dot = 0.0;
            for (int i = 0; i < kDim; ++i) dot += g4.metric_value(i, tang_[a]) * nu[i];
            ok = ok && std::abs(dot) < 1e-12;
        }
        return ok;
    };
    if (!frame_ok(nu_m_) || !frame_ok(nu_n_))
        throw numerical_error("corner frame conormal failed unit/orthogonality checks");

    // The crossing decomposition mu_M = csc(theta0) nu_N - cot(theta0) nu_M
    // ties the four vectors together; a miss means the frame is inconsistent.
    double csc = 1.0 / std::sin(theta0_);
    double cot = std::cos(theta0_) * csc;
    for (int i = 0; i < kDim; ++i) {
        double rm = m_.normal_value(i) - (csc * nu_n_[i] - cot * nu_m_[i]);
        double rn = n_.normal_value(i) - (csc * nu_m_[i] - cot * nu_n_[i]);
        if (std::abs(rm) > 1e-9 * std::max(1.0, csc) || std::abs(rn) > 1e-9 * std::max(1.0, csc))
            throw numerical_error("corner frame decomposition check failed");
    }

    auto shape = [&](const std::array<double, 4>& nu, std::array<double, 3>& ii,
                     std::array<double, 3>& ii0, double& eta) {
        std::array<double, 4> low{};
        for (int k = 0; k < kDim; ++k)
            for (int j = 0; j < kDim; ++j) low[k] += g4.metric_value(k, j) * nu[j];
        for (int a = 0; a < 2; ++a)
            for (int b = a; b < 2; ++b) {
                double acc = 0.0;
                for (int k = 0; k < kDim; ++k)
                    acc += low[k] * g4.christoffel_value(k, tang_[a], tang_[b]);
                ii[packed_index(2, a, b)] = acc;
            }
        eta = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                eta += geo2_.metric_inverse_value(a, b) * ii[packed_index(2, a, b)];
        for (int a = 0; a < 2; ++a)
            for (int b = a; b < 2; ++b)
                ii0[packed_index(2, a, b)] =
                    ii[packed_index(2, a, b)] - 0.5 * eta * geo2_.metric_value(a, b);
    };
    shape(nu_m_, ii_m_, ii0_m_, eta_m_);
    shape(nu_n_, ii_n_, ii0_n_, eta_n_);

    ii0_m_norm2_ = 0.0;
    ii0_n_norm2_ = 0.0;
    ii0_dot_ = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double um = 0.0, un = 0.0;
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    double kk = geo2_.metric_inverse_value(a, c) * geo2_.metric_inverse_value(b, d);
                    um += kk * ii0_m_[packed_index(2, c, d)];
                    un += kk * ii0_n_[packed_index(2, c, d)];
                }
            ii0_m_norm2_ += um * ii0_m_[packed_index(2, a, b)];
            ii0_n_norm2_ += un * ii0_n_[packed_index(2, a, b)];
            ii0_dot_ += um * ii0_n_[packed_index(2, a, b)];
        }

    green_m_ = normal_m_derivative(m_.mean_curvature_field());
    green_n_ = normal_n_derivative(n_.mean_curvature_field());
}

double CornerFrame::normal_m_derivative(const Jet& f) const {
    if (f.num_vars() != kDim || f.degree() < 1)
        throw input_error("conormal derivative needs an ambient jet of degree >= 1");
    double acc = 0.0;
    for (int i = 0; i < kDim; ++i) acc += nu_m_[i] * f.derivative(i).value();
    return acc;
}

double CornerFrame::normal_n_derivative(const Jet& f) const {
    if (f.num_vars() != kDim || f.degree() < 1)
        throw input_error("conormal derivative needs an ambient jet of degree >= 1");
    double acc = 0.0;
    for (int i = 0; i < kDim; ++i) acc += nu_n_[i] * f.derivative(i).value();
    return acc;
}

Jet CornerFrame::tangential(const Jet& f) const {
    return f.restricted(std::span<const int>(tang_));
}

double u_curvature(const CornerFrame& f) {
    double t0 = f.angle();
    double csc = 1.0 / std::sin(t0);
    double cot = std::cos(t0) * csc;
    double em = f.mean_curvature_m(), en = f.mean_curvature_n();
    return (std::numbers::pi - t0) * f.gaussian() - 0.25 * cot * (em * em + en * en) +
           0.5 * csc * em * en - (f.green_m() + f.green_n()) / 3.0;
}

double g_curvature(const CornerFrame& f) {
    double t0 = f.angle();
    double csc = 1.0 / std::sin(t0);
    double cot = std::cos(t0) * csc;
    return 0.5 * cot * (f.traceless_m_norm2() + f.traceless_n_norm2()) - csc * f.traceless_dot();
}

double p2b_apply(const CornerFrame& f, const Jet& u) {
    if (u.num_vars() != kDim || u.degree() < 2)
        throw input_error("corner operator needs an ambient jet of degree >= 2");
    double t0 = f.angle();
    double csc = 1.0 / std::sin(t0);
    double cot = std::cos(t0) * csc;
    double lap = f.induced().laplacian(f.tangential(u));
    double numu_m = f.normal_m_derivative(f.face_m().normal_derivative_field(u));
    double numu_n = f.normal_n_derivative(f.face_n().normal_derivative_field(u));
    double num_u = f.normal_m_derivative(u);
    double nun_u = f.normal_n_derivative(u);
    double em = f.mean_curvature_m(), en = f.mean_curvature_n();
    return (t0 - std::numbers::pi) * lap + numu_m + numu_n + cot * (em * num_u + en * nun_u) -
           csc * (en * num_u + em * nun_u) +
           (f.face_m().mean_curvature() * num_u + f.face_n().mean_curvature() * nun_u) / 3.0;
}

double corner_integrand(const CornerFrame& f) {
    return (u_curvature(f) + g_curvature(f) + (f.green_m() + f.green_n()) / 3.0) /
           (4.0 * std::numbers::pi * std::numbers::pi);
}

CornerDensityParts corner_density_parts(const CornerFrame& f, double theta) {
    CornerDensityParts out;
    double t0 = f.angle();
    double csc = 1.0 / std::sin(t0);
    double cot = std::cos(t0) * csc;

    // Shape factor of the direction cos(theta) nu_M + sin(theta) mu_M. The
    // mu_M part comes from the crossing decomposition, not a fresh
    // Christoffel contraction. Only even powers of the factor appear, so the
    // inward/outward orientation sign drops out.
    double lam[3];
    for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) {
            int k = packed_index(2, a, b);
            double mu_part = csc * f.second_fundamental_n(a, b) - cot * f.second_fundamental_m(a, b);
            lam[k] = std::cos(theta) * f.second_fundamental_m(a, b) + std::sin(theta) * mu_part;
        }

    const MetricGeometry& g2 = f.induced();
    double detk = g2.det();

    double lam_full[2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) lam_full[a][b] = lam[packed_index(2, a, b)];

    double eps2 = 0.0;
    for (const Perm2& p : kPerm2)
        for (const Perm2& q : kPerm2)
            eps2 += p.sign * q.sign * lam_full[p.p[0]][q.p[0]] * lam_full[p.p[1]][q.p[1]];
    out.shape_eps = eps2 / (2.0 * detk);

    double mix[2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double acc = 0.0;
            for (int c = 0; c < 2; ++c) acc += g2.metric_inverse_value(a, c) * lam_full[c][b];
            mix[a][b] = acc;
        }
    out.shape_det = mix[0][0] * mix[1][1] - mix[0][1] * mix[1][0];

    double trace = mix[0][0] + mix[1][1];
    double norm2 = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) norm2 += mix[a][b] * mix[b][a];
    out.shape_closed = 0.5 * (trace * trace - norm2);

    std::span<const int, 2> t = f.tangential_axes();
    const MetricGeometry& g4 = f.face_m().ambient();
    double eps_mixed = 0.0;
    for (const Perm2& p : kPerm2)
        for (const Perm2& q : kPerm2)
            eps_mixed += p.sign * q.sign * g4.riemann(t[p.p[0]], t[p.p[1]], t[q.p[0]], t[q.p[1]]);
    out.mixed_eps = -eps_mixed / (4.0 * detk);

    // Gauss's equation for the corner surface: the normal bundle contributes
    // one determinant per conormal of the orthonormal pair (nu_M, mu_M).
    auto mixed_det = [&](auto value) {
        double m2[2][2];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double acc = 0.0;
                for (int c = 0; c < 2; ++c)
                    acc += g2.metric_inverse_value(a, c) * value(c, b);
                m2[a][b] = acc;
            }
        return m2[0][0] * m2[1][1] - m2[0][1] * m2[1][0];
    };
    double det_nu = mixed_det([&](int a, int b) { return f.second_fundamental_m(a, b); });
    double det_mu = mixed_det([&](int a, int b) {
        return csc * f.second_fundamental_n(a, b) - cot * f.second_fundamental_m(a, b);
    });
    out.mixed_closed = f.gaussian() - det_nu - det_mu;

    out.integrand = (out.shape_closed + 0.5 * out.mixed_closed) /
                    (2.0 * std::numbers::pi * std::numbers::pi);
    return out;
}

double aw_corner_density(const CornerFrame& f, CornerRule rule, int theta_order) {
    double t0 = f.angle();
    double csc = 1.0 / std::sin(t0);
    double cot = std::cos(t0) * csc;
    double em = f.mean_curvature_m(), en = f.mean_curvature_n();
    double closed = ((std::numbers::pi - t0) * f.gaussian() - 0.25 * cot * (em * em + en * en) +
                     0.5 * csc * em * en +
                     0.5 * cot * (f.traceless_m_norm2() + f.traceless_n_norm2()) -
                     csc * f.traceless_dot()) /
                    (4.0 * std::numbers::pi * std::numbers::pi);
    if (rule == CornerRule::kClosed) return closed;

    QuadratureRule q = gauss_legendre(theta_order);
    double lo = t0 + 0.5 * std::numbers::pi;
    double hi = 1.5 * std::numbers::pi;
    double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    KahanSum acc;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        CornerDensityParts p = corner_density_parts(f, mid + half * q.nodes[i]);
        acc.add(half * q.weights[i] * (p.shape_closed + 0.5 * p.mixed_closed));
    }
    double quad = acc.value() / (2.0 * std::numbers::pi * std::numbers::pi);
    if (std::abs(quad - closed) > 1e-8 * std::max(1.0, std::abs(closed)))
        throw numerical_error("corner density cross-check failed");
    return quad;
}

ThetaIntegrals theta_integrals_closed(double theta0) {
    ThetaIntegrals out;
    double len = std::numbers::pi - theta0;
    out.cos2 = 0.5 * len + 0.25 * std::sin(2.0 * theta0);
    out.sin2 = 0.5 * len - 0.25 * std::sin(2.0 * theta0);
    out.sincos = 0.25 - 0.25 * std::cos(2.0 * theta0);
    return out;
}

ThetaIntegrals theta_integrals_quadrature(double theta0, int order) {
    QuadratureRule q = gauss_legendre(order);
    double lo = theta0 + 0.5 * std::numbers::pi;
    double hi = 1.5 * std::numbers::pi;
    double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    KahanSum c2, s2, sc;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        double theta = mid + half * q.nodes[i];
        double w = half * q.weights[i];
        double c = std::cos(theta), s = std::sin(theta);
        c2.add(w * c * c);
        s2.add(w * s * s);
        sc.add(w * s * c);
    }
    return {c2.value(), s2.value(), sc.value()};
}

} // namespace cgb
