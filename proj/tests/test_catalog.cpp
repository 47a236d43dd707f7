#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "doctest.h"

#include "cgb/boundary.hpp"
#include "cgb/catalog.hpp"
#include "cgb/corner.hpp"
#include "cgb/curvature.hpp"
#include "cgb/errors.hpp"
#include "cgb/scene.hpp"

using namespace cgb;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kSamples = 10;

/// Deterministic low-discrepancy stations in (0, 1).
double station(int k) {
    return std::fmod(0.5 + 0.6180339887498949 * (k + 1), 1.0);
}

/// Maps a station into the interior band of a box interval; stays clear of
/// polar ends so degenerate chart metrics remain invertible.
double band(double lo, double hi, double t) {
    return lo + (0.08 + 0.84 * t) * (hi - lo);
}

std::array<double, kDim> sample_point(const Chart& ch, int k) {
    std::array<double, kDim> x;
    for (int axis = 0; axis < kDim; ++axis)
        x[axis] = band(ch.lo[axis], ch.hi[axis], station(4 * k + axis));
    return x;
}

InteriorQuantities interior_at(ChartEvaluator& eval, std::span<const double> x) {
    std::array<Jet, 10> g;
    eval.metric_jets(x, g);
    MetricGeometry geo(4);
    geo.compute(g);
    return interior_quantities(geo);
}

} // namespace

TEST_CASE("catalog entries parse, validate, and round-trip") {
    REQUIRE(catalog_names().size() == 3);
    for (const std::string& name : catalog_names()) {
        CAPTURE(name);
        CatalogEntry entry = catalog_entry(name);
        CHECK(entry.scene.name == name);
        REQUIRE(entry.scene.chi.has_value());
        CHECK(*entry.scene.chi == doctest::Approx(entry.at("chi").value));
        CHECK(entry.at("total").value == doctest::Approx(4.0 * kPi * kPi * *entry.scene.chi));
        CHECK_FALSE(entry.expected.empty());
        for (const ExpectedValue& e : entry.expected) {
            CHECK_FALSE(e.key.empty());
            CHECK_FALSE(e.note.empty());
            CHECK(e.tolerance >= 0.0);
        }

        // Canonical text reparses to a scene with the same canonical text.
        std::string text = print_scene(entry.scene);
        Scene reparsed = parse_scene(text, entry.scene.name);
        reparsed.name = entry.scene.name;
        validate_scene(reparsed);
        CHECK(print_scene(reparsed) == text);
    }
    CHECK(catalog_entry("bidisk").find("no_such_key") == nullptr);
    CHECK_THROWS_AS(catalog_entry("bidisk").at("no_such_key"), input_error);
    CHECK_THROWS_AS(catalog_entry("unknown-name"), input_error);
}

TEST_CASE("catalog strata counts match the designs") {
    CatalogEntry bidisk = flat_bidisk();
    CHECK(labeled_faces(bidisk.scene, FaceRole::kM).size() == 1);
    CHECK(labeled_faces(bidisk.scene, FaceRole::kN).size() == 1);
    CHECK(labeled_corners(bidisk.scene).size() == 1);

    CatalogEntry ball = hemiball();
    CHECK(labeled_faces(ball.scene, FaceRole::kM).size() == 1);
    CHECK(labeled_faces(ball.scene, FaceRole::kN).size() == 1);
    CHECK(labeled_corners(ball.scene).size() == 1);

    CatalogEntry sheared = sheared_corner();
    CHECK(labeled_faces(sheared.scene, FaceRole::kM).size() == 2);
    CHECK(labeled_faces(sheared.scene, FaceRole::kN).size() == 2);
    CHECK(labeled_corners(sheared.scene).size() == 4);
}

TEST_CASE("bidisk expectations hold at ten points per stratum") {
    CatalogEntry entry = flat_bidisk();
    const Chart& ch = entry.scene.charts[0];
    ChartEvaluator eval(entry.scene, 0, 4);
    FaceId fm = labeled_faces(entry.scene, FaceRole::kM)[0];
    FaceId fn = labeled_faces(entry.scene, FaceRole::kN)[0];
    CornerId corner = labeled_corners(entry.scene)[0];

    double tol_int = entry.at("interior").tolerance;
    for (int k = 0; k < kSamples; ++k) {
        std::array<double, kDim> x = sample_point(ch, k);
        InteriorQuantities q = interior_at(eval, x);
        CHECK(std::abs(q.weyl_norm2) < tol_int);
        CHECK(std::abs(q.pfaffian_density) < tol_int);
        CHECK(std::abs((q.scal * q.scal - 3.0 * q.ric_norm2) / 6.0) < tol_int);
        // The Laplacian of the scalar cancels catastrophically toward the
        // disk centers, so the raw fourth-order scalar is only clean to the
        // conditioning of that cancellation.
        CHECK(std::abs(q.q) < 1e-9);
        CHECK(std::abs(q.gb_density) < 1e-9);

        for (const FaceId& f : {fm, fn}) {
            BoundaryFrame frame(eval, x, f.axis, f.side);
            CHECK(t_curvature(frame) ==
                  doctest::Approx(entry.at("face_m_t").value)
                      .epsilon(entry.at("face_m_t").tolerance));
            CHECK(l_curvature(frame) ==
                  doctest::Approx(entry.at("face_m_l").value)
                      .epsilon(entry.at("face_m_l").tolerance));
            CHECK(std::abs(aw_boundary_density(frame)) < entry.at("face_m_density").tolerance);
        }

        CornerFrame cf(eval, x, corner.axis_m, corner.side_m, corner.axis_n, corner.side_n);
        CHECK(cf.angle() ==
              doctest::Approx(entry.at("corner_angle").value)
                  .epsilon(entry.at("corner_angle").tolerance));
        CHECK(u_curvature(cf) ==
              doctest::Approx(entry.at("corner_u").value).epsilon(entry.at("corner_u").tolerance));
        CHECK(g_curvature(cf) ==
              doctest::Approx(entry.at("corner_g").value).epsilon(entry.at("corner_g").tolerance));
        CHECK(std::abs(cf.gaussian()) < entry.at("corner_gaussian").tolerance);
        CHECK(aw_corner_density(cf) ==
              doctest::Approx(entry.at("corner_density").value)
                  .epsilon(entry.at("corner_density").tolerance));
        CHECK(aw_corner_density(cf, CornerRule::kQuadrature, 32) ==
              doctest::Approx(entry.at("corner_density").value)
                  .epsilon(entry.at("corner_density").tolerance));
    }
}

TEST_CASE("hemiball expectations hold at ten points per stratum") {
    CatalogEntry entry = hemiball();
    const Chart& ch = entry.scene.charts[0];
    ChartEvaluator eval(entry.scene, 0, 4);
    FaceId fm = labeled_faces(entry.scene, FaceRole::kM)[0];
    FaceId fn = labeled_faces(entry.scene, FaceRole::kN)[0];
    CornerId corner = labeled_corners(entry.scene)[0];

    for (int k = 0; k < kSamples; ++k) {
        std::array<double, kDim> x = sample_point(ch, k);
        InteriorQuantities q = interior_at(eval, x);
        CHECK(std::abs(q.weyl_norm2) < entry.at("interior").tolerance);
        CHECK(std::abs(q.pfaffian_density) < entry.at("interior").tolerance);

        BoundaryFrame m(eval, x, fm.axis, fm.side);
        CHECK(t_curvature(m) ==
              doctest::Approx(entry.at("face_m_t").value).epsilon(entry.at("face_m_t").tolerance));
        CHECK(std::abs(l_curvature(m)) < entry.at("face_m_l").tolerance);
        CHECK(aw_boundary_density(m) ==
              doctest::Approx(entry.at("face_m_density").value)
                  .epsilon(entry.at("face_m_density").tolerance));
        CHECK(m.mean_curvature() == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(m.induced_scalar() == doctest::Approx(6.0).epsilon(1e-10));

        BoundaryFrame n(eval, x, fn.axis, fn.side);
        CHECK(std::abs(t_curvature(n)) < 1e-10);
        CHECK(std::abs(l_curvature(n)) < 1e-10);
        CHECK(std::abs(aw_boundary_density(n)) < 1e-10);

        CornerFrame cf(eval, x, corner.axis_m, corner.side_m, corner.axis_n, corner.side_n);
        CHECK(cf.angle() ==
              doctest::Approx(entry.at("corner_angle").value)
                  .epsilon(entry.at("corner_angle").tolerance));
        CHECK(cf.gaussian() ==
              doctest::Approx(entry.at("corner_gaussian").value)
                  .epsilon(entry.at("corner_gaussian").tolerance));
        CHECK(std::abs(cf.mean_curvature_m()) < entry.at("corner_eta_m").tolerance);
        CHECK(cf.mean_curvature_n() ==
              doctest::Approx(entry.at("corner_eta_n").value)
                  .epsilon(entry.at("corner_eta_n").tolerance));
        CHECK(u_curvature(cf) ==
              doctest::Approx(entry.at("corner_u").value).epsilon(entry.at("corner_u").tolerance));
        CHECK(std::abs(g_curvature(cf)) < entry.at("corner_g").tolerance);
        CHECK(aw_corner_density(cf) ==
              doctest::Approx(entry.at("corner_density").value)
                  .epsilon(entry.at("corner_density").tolerance));
        CHECK(aw_corner_density(cf, CornerRule::kQuadrature, 32) ==
              doctest::Approx(entry.at("corner_density").value)
                  .epsilon(entry.at("corner_density").tolerance));
    }
}

TEST_CASE("sheared expectations hold at ten points per stratum") {
    CatalogEntry entry = sheared_corner();
    const Chart& ch = entry.scene.charts[0];
    ChartEvaluator eval(entry.scene, 0, 4);

    for (int k = 0; k < kSamples; ++k) {
        std::array<double, kDim> x = sample_point(ch, k);
        InteriorQuantities q = interior_at(eval, x);
        CHECK(std::abs(q.pfaffian_density) < entry.at("interior").tolerance);
        CHECK(std::abs(q.gb_density) < entry.at("interior").tolerance);

        for (FaceRole role : {FaceRole::kM, FaceRole::kN}) {
            for (const FaceId& f : labeled_faces(entry.scene, role)) {
                BoundaryFrame frame(eval, x, f.axis, f.side);
                CHECK(std::abs(t_curvature(frame)) < entry.at("face_m_t").tolerance);
                CHECK(std::abs(l_curvature(frame)) < entry.at("face_m_t").tolerance);
                CHECK(std::abs(aw_boundary_density(frame)) < entry.at("face_m_t").tolerance);
            }
        }

        for (const CornerId& cid : labeled_corners(entry.scene)) {
            CornerFrame cf(eval, x, cid.axis_m, cid.side_m, cid.axis_n, cid.side_n);
            bool matched = cid.side_m == cid.side_n;
            const ExpectedValue& angle =
                entry.at(matched ? "corner_angle_acute" : "corner_angle_obtuse");
            CHECK(cf.angle() == doctest::Approx(angle.value).epsilon(angle.tolerance));
            CHECK(std::abs(u_curvature(cf)) < entry.at("corner_u").tolerance);
            CHECK(std::abs(g_curvature(cf)) < entry.at("corner_u").tolerance);
            CHECK(std::abs(aw_corner_density(cf)) < entry.at("corner_density").tolerance);
            CHECK(std::abs(aw_corner_density(cf, CornerRule::kQuadrature, 24)) <
                  entry.at("corner_density").tolerance);
        }
    }
}

TEST_CASE("conformal variants install the scaled exponent") {
    CatalogEntry base = flat_bidisk();
    CatalogEntry variant = conformal_variant(base, Expression::parse("x1*cos(x2)"), 0.05);
    REQUIRE_FALSE(variant.scene.omega.empty());
    CHECK(variant.scene.charts.size() == base.scene.charts.size());
    CHECK(*variant.scene.chi == *base.scene.chi);
    CHECK(variant.reference_order == 20);

    // Piecewise expectations are dropped, topological ones survive.
    CHECK(variant.find("boundary_m") == nullptr);
    CHECK(variant.find("corner_u") == nullptr);
    CHECK(variant.at("total").value == doctest::Approx(4.0 * kPi * kPi));
    CHECK(variant.at("defect").tolerance == doctest::Approx(1e-3));

    ChartEvaluator eval(variant.scene, 0, 4);
    std::array<double, kDim> x = {0.6, 1.1, 0.4, 2.0};
    CHECK(eval.omega_value(x) == doctest::Approx(0.05 * 0.6 * std::cos(1.1)).epsilon(1e-14));
    CHECK(eval.conformal());
}

TEST_CASE("conformal variants reject exponents that break periodicity") {
    CHECK_THROWS_AS(conformal_variant(flat_bidisk(), Expression::parse("x2"), 0.01), input_error);
    CHECK_THROWS_AS(conformal_variant(hemiball(), Expression::parse("x4/8"), 0.01), input_error);
    CHECK_THROWS_AS(conformal_variant(sheared_corner(), Expression::parse("x1^2"), 0.01),
                    input_error);
    CHECK_THROWS_AS(conformal_variant(flat_bidisk(), Expression(), 0.01), input_error);

    CHECK_NOTHROW(conformal_variant(flat_bidisk(), Expression::parse("sin(x2)*x1"), 0.01));
    CHECK_NOTHROW(conformal_variant(sheared_corner(), Expression::parse("cos(2*pi*x1)"), 0.01));
    CHECK_NOTHROW(conformal_variant(hemiball(),
                                    Expression::parse("x1*sin(x2)*sin(x3)*sin(x4)"), 0.01));
}

TEST_CASE("seeded variants are deterministic and amplitude-bounded") {
    for (const std::string& name : catalog_names()) {
        CAPTURE(name);
        CatalogEntry base = catalog_entry(name);
        CatalogEntry a = seeded_conformal_variant(base, 7, 0.05);
        CatalogEntry b = seeded_conformal_variant(base, 7, 0.05);
        CatalogEntry c = seeded_conformal_variant(base, 8, 0.05);
        CHECK(a.scene.omega.text() == b.scene.omega.text());
        CHECK(a.scene.omega.text() != c.scene.omega.text());
        CHECK(a.scene.name == name + "~w7");

        ChartEvaluator eval(a.scene, 0, 2);
        const Chart& ch = a.scene.charts[0];
        std::mt19937_64 gen(99);
        auto uniform = [&gen]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
        double max_abs = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            std::array<double, kDim> x;
            for (int axis = 0; axis < kDim; ++axis)
                x[axis] = ch.lo[axis] + uniform() * (ch.hi[axis] - ch.lo[axis]);
            max_abs = std::max(max_abs, std::abs(eval.omega_value(x)));
        }
        CHECK(max_abs <= 0.05 + 1e-12);
        CHECK(max_abs > 1e-4); // the exponent is not trivially zero
    }
}
