#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "doctest.h"

#include "cgb/boundary.hpp"
#include "cgb/errors.hpp"
#include "cgb/jet.hpp"
#include "cgb/scene.hpp"
#include "support/oracles.hpp"

using namespace cgb;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInv4Pi2 = 1.0 / (4.0 * kPi * kPi);

std::array<Jet, 10> identity_jets() {
    std::array<Jet, 10> g;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            g[packed_index(4, i, j)] = Jet::constant(i == j ? 1.0 : 0.0, 4, 4);
    return g;
}

/// Product of two flat disks in polar coordinates: x1 = r1, x2, x4 angles,
/// x3 = r2.
std::array<Jet, 10> bidisk_jets(double r1, double r2) {
    std::array<Jet, 10> g = identity_jets();
    g[packed_index(4, 1, 1)] = powi(Jet::variable(0, r1, 4, 4), 2);
    g[packed_index(4, 3, 3)] = powi(Jet::variable(2, r2, 4, 4), 2);
    return g;
}

/// Flat 4-ball in spherical coordinates x1 = rho, x2, x3, x4 nested angles.
std::array<Jet, 10> ball_jets(double rho, double psi, double phi) {
    std::array<Jet, 10> g = identity_jets();
    Jet r = Jet::variable(0, rho, 4, 4);
    Jet s1 = sin(Jet::variable(1, psi, 4, 4));
    Jet s2 = sin(Jet::variable(2, phi, 4, 4));
    g[packed_index(4, 1, 1)] = r * r;
    g[packed_index(4, 2, 2)] = r * r * s1 * s1;
    g[packed_index(4, 3, 3)] = r * r * s1 * s1 * s2 * s2;
    return g;
}

double minteq_rhs(const BoundaryFrame& f) {
    return kInv4Pi2 * (t_curvature(f) + l_curvature(f) + f.laplacian_mean_curvature() / 3.0 +
                       f.normal_scalar_slope() / 12.0);
}

} // namespace

TEST_CASE("flat coordinate faces are totally geodesic") {
    auto g = identity_jets();
    for (int axis = 0; axis < 4; ++axis) {
        for (Side side : {Side::kLo, Side::kHi}) {
            BoundaryFrame f(g, axis, side);
            CHECK(f.normal_axis() == axis);
            for (int i = 0; i < 4; ++i) {
                double expect = i == axis ? (side == Side::kLo ? 1.0 : -1.0) : 0.0;
                CHECK(f.normal_value(i) == doctest::Approx(expect).epsilon(1e-14));
            }
            for (int a = 0; a < 3; ++a)
                for (int b = a; b < 3; ++b)
                    CHECK(f.second_fundamental_value(a, b) == 0.0);
            CHECK(f.mean_curvature() == 0.0);
            CHECK(f.induced_scalar() == 0.0);
            CHECK(t_curvature(f) == 0.0);
            CHECK(l_curvature(f) == 0.0);
            CHECK(aw_boundary_density(f) == 0.0);
        }
    }
}

TEST_CASE("bidisk outer face: curved circle factor times flat disk") {
    auto g = bidisk_jets(1.0, 0.4);
    BoundaryFrame f(g, 0, Side::kHi);

    CHECK(f.normal_value(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(f.mean_curvature() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(f.traceless_norm2() == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK(f.traceless_cubed() == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
    CHECK(f.induced_scalar() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(f.laplacian_mean_curvature()) < 1e-12);
    CHECK(std::abs(f.normal_scalar_slope()) < 1e-12);

    CHECK(t_curvature(f) == doctest::Approx(-2.0 / 9.0).epsilon(1e-13));
    CHECK(l_curvature(f) == doctest::Approx(2.0 / 9.0).epsilon(1e-13));

    BoundaryDensityParts parts = aw_boundary_parts(f);
    CHECK(std::abs(parts.shape_closed) < 1e-14);
    CHECK(std::abs(parts.mixed_closed) < 1e-13);
    CHECK(std::abs(aw_boundary_density(f)) < 1e-14);
    CHECK(aw_boundary_density(f) == doctest::Approx(minteq_rhs(f)).epsilon(1e-12));
}

TEST_CASE("unit sphere face of the flat ball is umbilic") {
    auto g = ball_jets(1.0, 0.8, 1.2);
    BoundaryFrame f(g, 0, Side::kHi);

    CHECK(f.mean_curvature() == doctest::Approx(3.0).epsilon(1e-12));
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            CHECK(std::abs(f.traceless_value(a, b)) < 1e-13);
            // L = h on the unit sphere.
            auto t = f.tangential_axes();
            CHECK(f.second_fundamental_value(a, b) ==
                  doctest::Approx(f.ambient().metric_value(t[a], t[b])).epsilon(1e-12));
        }
    CHECK(f.induced_scalar() == doctest::Approx(6.0).epsilon(1e-11));
    CHECK(std::abs(f.laplacian_mean_curvature()) < 1e-9);
    CHECK(t_curvature(f) == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(std::abs(l_curvature(f)) < 1e-12);
    double density = aw_boundary_density(f);
    CHECK(density == doctest::Approx(1.0 / (2.0 * kPi * kPi)).epsilon(1e-11));
    CHECK(density == doctest::Approx(minteq_rhs(f)).epsilon(1e-11));
}

TEST_CASE("equatorial slice of the flat ball is flat and geodesic") {
    auto g = ball_jets(0.7, kPi / 2.0, 1.2);
    BoundaryFrame f(g, 1, Side::kHi);
    CHECK(std::abs(f.mean_curvature()) < 1e-13);
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) CHECK(std::abs(f.second_fundamental_value(a, b)) < 1e-13);
    CHECK(std::abs(f.induced_scalar()) < 1e-10);
    CHECK(std::abs(t_curvature(f)) < 1e-10);
    CHECK(std::abs(l_curvature(f)) < 1e-12);
    CHECK(std::abs(aw_boundary_density(f)) < 1e-11);
}

TEST_CASE("random frames: trace-free trace, measure identity, tangential curvature") {
    std::mt19937_64 gen(101);
    for (int trial = 0; trial < 24; ++trial) {
        auto g = oracle::random_metric_jets(gen, 4, 4, 0.3);
        int axis = trial % 4;
        Side side = trial % 2 == 0 ? Side::kLo : Side::kHi;
        BoundaryFrame f(g, axis, side);

        double unit = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                unit += f.ambient().metric_value(i, j) * f.normal_value(i) * f.normal_value(j);
        CHECK(unit == doctest::Approx(1.0).epsilon(1e-13));

        double trace = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                trace += f.induced().metric_inverse_value(a, b) * f.traceless_value(a, b);
        CHECK(std::abs(trace) < 1e-13 * (1.0 + std::abs(f.mean_curvature())));

        // Measure identity: the density equals the total-derivative-adjusted
        // combination of the two boundary curvatures.
        double lhs = aw_boundary_density(f);
        double scale = 1.0 + std::abs(t_curvature(f)) + std::abs(l_curvature(f));
        CHECK(std::abs(lhs - minteq_rhs(f)) < 1e-12 * scale);

        // Tangential ambient curvature against intrinsic curvature plus the
        // second-fundamental-form correction.
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int d = 0; d < 3; ++d)
                    for (int e = 0; e < 3; ++e) {
                        auto t = f.tangential_axes();
                        double amb = f.ambient().riemann(t[a], t[b], t[d], t[e]);
                        double cor = f.induced().riemann(a, b, d, e) -
                                     f.second_fundamental_value(a, e) *
                                         f.second_fundamental_value(b, d) +
                                     f.second_fundamental_value(a, d) *
                                         f.second_fundamental_value(b, e);
                        CHECK(amb == doctest::Approx(cor).epsilon(5e-11));
                    }

        BoundaryDensityParts parts = aw_boundary_parts(f);
        double pscale = 1.0 + std::abs(parts.shape_closed) + std::abs(parts.mixed_closed);
        CHECK(std::abs(parts.shape_eps - parts.shape_closed) < 1e-12 * pscale);
        CHECK(std::abs(parts.shape_det - parts.shape_closed) < 1e-12 * pscale);
        CHECK(std::abs(parts.mixed_eps - parts.mixed_closed) < 1e-12 * pscale);
    }
}

TEST_CASE("third-order boundary operator on explicit flat cases") {
    auto g = identity_jets();
    BoundaryFrame f(g, 2, Side::kHi);

    CHECK(p3_apply(f, Jet::constant(3.5, 4, 4)) == 0.0);
    CHECK(p3_apply(f, Jet::variable(2, 0.0, 4, 4)) == 0.0);

    // u = x1^2 x3 about the origin of the face x3 = 0: mu = -d/dx3,
    // Delta u = 2 x3, mu(Delta u) = -2, mu(u) = -x1^2 restricted to the face,
    // Delta_h mu(u) = -2, so P3 u = -1 - 2.
    Jet x1 = Jet::variable(0, 0.0, 4, 4);
    Jet x2 = Jet::variable(1, 0.0, 4, 4);
    Jet x3 = Jet::variable(2, 0.0, 4, 4);
    Jet x4 = Jet::variable(3, 0.0, 4, 4);
    CHECK(p3_apply(f, x1 * x1 * x3) == doctest::Approx(-3.0).epsilon(1e-14));

    // u = x1^2 x3 + x2 x4^2 - x3^3: the half mu(Delta u) term contributes +2
    // and the Delta_h mu(u) term contributes -2.
    Jet u = x1 * x1 * x3 + x2 * x4 * x4 - x3 * x3 * x3;
    CHECK(std::abs(p3_apply(f, u)) < 1e-14);

    CHECK_THROWS_AS(p3_apply(f, Jet::constant(1.0, 4, 2)), input_error);
}

TEST_CASE("conformal transformation laws at boundary points") {
    std::mt19937_64 gen(202);
    for (int trial = 0; trial < 12; ++trial) {
        auto g = oracle::random_metric_jets(gen, 4, 4, 0.25);
        Jet omega = oracle::random_scalar_jet(gen, 4, 4, 0.25);
        Jet u = oracle::random_scalar_jet(gen, 4, 4, 1.0);
        std::vector<Jet> gt(10);
        Jet conf = exp(2.0 * omega);
        for (int k = 0; k < 10; ++k) gt[k] = conf * g[k];

        int axis = trial % 4;
        Side side = trial % 2 == 0 ? Side::kHi : Side::kLo;
        BoundaryFrame f(g, axis, side);
        BoundaryFrame ft(gt, axis, side);

        double w = omega.value();
        double muw = f.normal_derivative(omega);

        for (int i = 0; i < 4; ++i)
            CHECK(ft.normal_value(i) ==
                  doctest::Approx(std::exp(-w) * f.normal_value(i)).epsilon(1e-12));

        CHECK(ft.mean_curvature() ==
              doctest::Approx(std::exp(-w) * (f.mean_curvature() - 3.0 * muw)).epsilon(1e-11));
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                double want = std::exp(w) * f.traceless_value(a, b);
                CHECK(std::abs(ft.traceless_value(a, b) - want) <
                      1e-10 * (1.0 + std::abs(want)));
            }

        double t0 = t_curvature(f), l0 = l_curvature(f);
        double law_t = std::exp(3.0 * w) * t_curvature(ft) - t0 - p3_apply(f, omega);
        CHECK(std::abs(law_t) < 1e-8 * (1.0 + std::abs(t0)));

        double law_l = std::exp(3.0 * w) * l_curvature(ft) - l0;
        CHECK(std::abs(law_l) < 1e-8 * (1.0 + std::abs(l0)));

        double p3 = p3_apply(f, u);
        double law_p = p3_apply(ft, u) - std::exp(-3.0 * w) * p3;
        CHECK(std::abs(law_p) < 1e-8 * (1.0 + std::abs(p3)));
    }
}

TEST_CASE("frames built through a scene evaluator") {
    const char* text = R"(chi = 1
[chart main]
box = [0.05, 1] x [0, 6.283185307179586] x [0.05, 1] x [0, 6.283185307179586]
g_11 = 1
g_22 = x1^2
g_33 = 1
g_44 = x3^2
periodic x2
periodic x4
face x1=hi : M
face x3=hi : N
singular x1=lo
singular x3=lo
)";
    Scene s = parse_scene(text, "bidisk");
    validate_scene(s);
    ChartEvaluator ev(s, 0, 4);
    std::array<double, 4> x = {0.9, 1.3, 0.45, 2.2}; // x1 snaps to the face
    BoundaryFrame f(ev, x, 0, Side::kHi);
    CHECK(f.mean_curvature() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(t_curvature(f) == doctest::Approx(-2.0 / 9.0).epsilon(1e-12));

    CHECK_THROWS_AS(BoundaryFrame(ev, x, 1, Side::kLo), input_error); // glue face
    CHECK_THROWS_AS(BoundaryFrame(ev, x, 0, Side::kLo), input_error); // singular face

    // Conformal scenes scale the metric before the frame sees it.
    Scene cs = parse_scene(std::string(text) + "omega = x1 - x3^2\n", "bidisk-conformal");
    validate_scene(cs);
    ChartEvaluator cev(cs, 0, 4);
    BoundaryFrame cf(cev, x, 0, Side::kHi);

    auto base = bidisk_jets(1.0, 0.45);
    Jet omega = Jet::variable(0, 1.0, 4, 4) - powi(Jet::variable(2, 0.45, 4, 4), 2);
    std::vector<Jet> gt(10);
    Jet confj = exp(2.0 * omega);
    for (int k = 0; k < 10; ++k) gt[k] = confj * base[k];
    BoundaryFrame direct(gt, 0, Side::kHi);
    CHECK(t_curvature(cf) == doctest::Approx(t_curvature(direct)).epsilon(1e-11));
    CHECK(l_curvature(cf) == doctest::Approx(l_curvature(direct)).epsilon(1e-11));
    CHECK(aw_boundary_density(cf) ==
          doctest::Approx(aw_boundary_density(direct)).epsilon(1e-11));

    // Degree starvation is rejected up front.
    std::mt19937_64 gen(7);
    auto g3 = oracle::random_metric_jets(gen, 4, 3, 0.2);
    CHECK_THROWS_AS(BoundaryFrame(g3, 0, Side::kLo), input_error);
}
