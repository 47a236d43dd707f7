#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>

#include "doctest.h"

#include "cgb/errors.hpp"
#include "cgb/scene.hpp"

using namespace cgb;

namespace {

const char* kBidiskText = R"(# product of two flat disks in polar coordinates
chi = 1
omega = 0

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

} // namespace

TEST_CASE("scene text parses into charts, roles, and fields") {
    Scene s = parse_scene(kBidiskText, "bidisk");
    validate_scene(s);
    REQUIRE(s.charts.size() == 1);
    CHECK(s.chi.has_value());
    CHECK(*s.chi == 1);
    CHECK_FALSE(s.omega.empty());

    const Chart& ch = s.charts[0];
    CHECK(ch.name == "main");
    CHECK(ch.lo[0] == 0.05);
    CHECK(ch.hi[1] == doctest::Approx(2.0 * std::numbers::pi));
    CHECK(ch.periodic[1]);
    CHECK(ch.periodic[3]);
    CHECK_FALSE(ch.periodic[0]);
    CHECK(ch.face_role(0, Side::kHi) == FaceRole::kM);
    CHECK(ch.face_role(2, Side::kHi) == FaceRole::kN);
    CHECK(ch.face_role(0, Side::kLo) == FaceRole::kSingular);
    CHECK(ch.face_role(1, Side::kLo) == FaceRole::kGlue);

    std::array<double, 4> x = {0.5, 1.0, 0.25, 2.0};
    CHECK(ch.metric[sym_index(1, 1)].eval(x) == doctest::Approx(0.25));
    CHECK(ch.metric[sym_index(0, 1)].eval(x) == 0.0); // defaulted off-diagonal
}

TEST_CASE("face lists and corner pairs are deterministic") {
    Scene s = parse_scene(kBidiskText, "bidisk");
    auto m = labeled_faces(s, FaceRole::kM);
    auto n = labeled_faces(s, FaceRole::kN);
    REQUIRE(m.size() == 1);
    REQUIRE(n.size() == 1);
    CHECK(m[0].axis == 0);
    CHECK(m[0].side == Side::kHi);
    CHECK(n[0].axis == 2);

    auto corners = labeled_corners(s);
    REQUIRE(corners.size() == 1);
    CHECK(corners[0].axis_m == 0);
    CHECK(corners[0].axis_n == 2);
    CHECK(corners[0].side_m == Side::kHi);
    CHECK(corners[0].side_n == Side::kHi);
}

TEST_CASE("canonical printing is idempotent") {
    Scene s = parse_scene(kBidiskText, "bidisk");
    std::string once = print_scene(s);
    Scene again = parse_scene(once, "bidisk");
    CHECK(print_scene(again) == once);
}

TEST_CASE("validation rejects broken scenes") {
    auto reject = [](const std::string& text) {
        CHECK_THROWS_AS(validate_scene(parse_scene(text, "t")), input_error);
    };
    // lo >= hi
    reject("[chart a]\nbox = [1,0] x [0,1] x [0,1] x [0,1]\ng_11=1\ng_22=1\ng_33=1\ng_44=1\n");
    // missing diagonal component
    reject("[chart a]\nbox = [0,1] x [0,1] x [0,1] x [0,1]\ng_11=1\ng_22=1\ng_33=1\n");
    // periodic axis with a face role
    reject("[chart a]\nbox = [0,1] x [0,1] x [0,1] x [0,1]\n"
           "g_11=1\ng_22=1\ng_33=1\ng_44=1\nperiodic x1\nface x1=hi : M\n");
    // two faces with the same label meeting at a corner
    reject("[chart a]\nbox = [0,1] x [0,1] x [0,1] x [0,1]\n"
           "g_11=1\ng_22=1\ng_33=1\ng_44=1\nface x1=hi : M\nface x2=hi : M\n");
    // not positive definite
    reject("[chart a]\nbox = [0,1] x [0,1] x [0,1] x [0,1]\n"
           "g_11=-1\ng_22=1\ng_33=1\ng_44=1\n");
    // duplicate chart names
    reject("[chart a]\nbox = [0,1] x [0,1] x [0,1] x [0,1]\ng_11=1\ng_22=1\ng_33=1\ng_44=1\n"
           "[chart a]\nbox = [0,1] x [0,1] x [0,1] x [0,1]\ng_11=1\ng_22=1\ng_33=1\ng_44=1\n");
    CHECK_THROWS_AS(validate_scene(Scene{}), input_error);
}

TEST_CASE("parse errors carry line numbers") {
    try {
        parse_scene("chi = 1\nbogus line here\n", "t");
        CHECK(false);
    } catch (const input_error& err) {
        CHECK(std::string(err.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_scene("box = [0,1] x [0,1] x [0,1] x [0,1]\n", "t"), input_error);
    CHECK_THROWS_AS(parse_scene("[chart a]\ng_11 = 1\n", "t"), input_error); // no box
    CHECK_THROWS_AS(parse_scene("[chart a]\nbox = [0,1]\n", "t"), input_error);
    CHECK_THROWS_AS(parse_scene("[chart a]\nbox = [0,1] x [0,1] x [0,1] x [0,1]\nchi = x1\n", "t"),
                    input_error);
    CHECK_THROWS_AS(
        parse_scene("[chart a]\nbox = [0,1] x [0,1] x [0,1] x [0,1]\nface x1=up : M\n", "t"),
        input_error);
    CHECK_THROWS_AS(
        parse_scene("[chart a]\nbox = [0,1] x [0,1] x [0,1] x [0,1]\nface x1=hi : Q\n", "t"),
        input_error);
    CHECK_THROWS_AS(
        parse_scene("[chart a]\nbox = [0,1] x [0,1] x [0,1] x [0,1]\ng_11 = 1\ng_11 = 2\n", "t"),
        input_error);
}

TEST_CASE("metric jets at a point match the expressions") {
    Scene s = parse_scene(kBidiskText, "bidisk");
    ChartEvaluator eval(s, 0, 4);
    std::array<double, 4> x = {0.5, 1.0, 0.8, 2.0};
    std::array<Jet, 10> g;
    eval.metric_jets(x, g);

    // g_22 = x1^2 about x1 = 0.5: value 1/4, slope 1, curvature coefficient 1.
    const Jet& g22 = g[sym_index(1, 1)];
    CHECK(g22.value() == doctest::Approx(0.25));
    CHECK(g22.coeff({1, 0, 0, 0}) == doctest::Approx(1.0));
    CHECK(g22.coeff({2, 0, 0, 0}) == doctest::Approx(1.0));
    CHECK(g22.coeff({3, 0, 0, 0}) == 0.0);
    CHECK(g[sym_index(0, 0)].value() == 1.0);
    CHECK(g[sym_index(0, 1)].value() == 0.0);

    CHECK(eval.volume_density(x) == doctest::Approx(0.5 * 0.8));
}

TEST_CASE("conformal factor scales metric jets and volume") {
    std::string text = std::string(kBidiskText);
    Scene s = parse_scene(text, "bidisk");
    s.omega = Expression::parse("x1 - x3^2/2");
    ChartEvaluator eval(s, 0, 4);
    REQUIRE(eval.conformal());

    std::array<double, 4> x = {0.5, 1.0, 0.8, 2.0};
    double w = 0.5 - 0.8 * 0.8 / 2.0;
    CHECK(eval.omega_value(x) == doctest::Approx(w));
    CHECK(eval.omega_jet(x).partial({0, 0, 1, 0}) == doctest::Approx(-0.8));

    std::array<Jet, 10> g;
    eval.metric_jets(x, g);
    CHECK(g[sym_index(0, 0)].value() == doctest::Approx(std::exp(2.0 * w)));
    CHECK(g[sym_index(1, 1)].value() == doctest::Approx(0.25 * std::exp(2.0 * w)));
    CHECK(eval.volume_density(x) == doctest::Approx(0.4 * std::exp(4.0 * w)));
}

TEST_CASE("per-chart omega overrides the scene-level field") {
    std::string text = "omega = x1\n[chart a]\nbox = [0,1] x [0,1] x [0,1] x [0,1]\n"
                       "g_11=1\ng_22=1\ng_33=1\ng_44=1\nomega = 2*x1\n";
    Scene s = parse_scene(text, "t");
    ChartEvaluator eval(s, 0, 2);
    std::array<double, 4> x = {0.25, 0.0, 0.0, 0.0};
    CHECK(eval.omega_value(x) == doctest::Approx(0.5));
}

TEST_CASE("scene files load from disk") {
    std::string path = "cgb_scene_roundtrip.scene";
    {
        std::ofstream out(path);
        out << kBidiskText;
    }
    Scene s = load_scene_file(path);
    CHECK(s.charts.size() == 1);
    CHECK(s.name.find("cgb_scene_roundtrip") != std::string::npos);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_scene_file("definitely_missing.scene"), input_error);
}
