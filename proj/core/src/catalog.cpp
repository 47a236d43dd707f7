#include "cgb/catalog.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <span>

#include "cgb/errors.hpp"
#include "cgb/jet.hpp"

namespace cgb {
namespace {

constexpr double kPi = std::numbers::pi;

std::string format_coefficient(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ExpectedValue ev(std::string key, double value, double tolerance, std::string note) {
    return ExpectedValue{std::move(key), value, tolerance, std::move(note)};
}

Scene build_scene(const std::string& text, const std::string& name) {
    Scene scene = parse_scene(text, name);
    scene.name = name;
    validate_scene(scene);
    return scene;
}

/// The conformal exponent must descend to the quotient: on a periodic axis
/// the full jet at the two identified ends has to agree. Checked at a few
/// deterministic stations of the remaining coordinates.
void require_periodic_exponent(const Scene& scene) {
    for (const Chart& ch : scene.charts) {
        const Expression& w = !ch.omega.empty() ? ch.omega : scene.omega;
        if (w.empty()) continue;
        for (int axis = 0; axis < kDim; ++axis) {
            if (!ch.periodic[axis]) continue;
            for (int station = 0; station < 5; ++station) {
                double t = 0.15 + 0.175 * station;
                std::array<Jet, kDim> lo_jets, hi_jets;
                for (int k = 0; k < kDim; ++k) {
                    double xk = ch.lo[k] + t * (ch.hi[k] - ch.lo[k]);
                    lo_jets[k] = Jet::variable(k, k == axis ? ch.lo[axis] : xk, kDim, 4);
                    hi_jets[k] = Jet::variable(k, k == axis ? ch.hi[axis] : xk, kDim, 4);
                }
                Jet a = w.eval(std::span<const Jet>(lo_jets));
                Jet b = w.eval(std::span<const Jet>(hi_jets));
                double scale = std::max(1.0, std::abs(a.value()));
                if (max_coeff_delta(a, b) > 1e-8 * scale) {
                    throw input_error("conformal exponent '" + w.text() +
                                      "' is not periodic on axis x" + std::to_string(axis + 1) +
                                      " of chart '" + ch.name + "'");
                }
            }
        }
    }
}

/// Smooth basis for seeded exponents, per catalog entry. Each element is
/// bounded by 1 in absolute value over the box and extends smoothly through
/// the polar degeneracies of its chart.
std::vector<std::string> exponent_basis(const std::string& name) {
    // The last entries of each basis are deliberately non-harmonic with
    // angle-independent boundary flux, so seeded exponents genuinely move
    // mass between the pieces instead of only perturbing integrands.
    if (name == "bidisk") {
        // Cartesian coordinates of the two disk factors, plus cross terms.
        return {
            "x1*cos(x2)",
            "x1*sin(x2)",
            "x3*cos(x4)",
            "x3*sin(x4)",
            "(x1*cos(x2))*(x3*sin(x4))",
            "(x1*sin(x2))*(x3*cos(x4))",
            "x1^2",
            "x1^2*x3^2",
        };
    }
    if (name == "hemiball") {
        // Cartesian coordinates of the ambient 4-ball, plus cross terms.
        return {
            "x1*cos(x2)",
            "x1*sin(x2)*cos(x3)",
            "x1*sin(x2)*sin(x3)*cos(x4)",
            "x1*sin(x2)*sin(x3)*sin(x4)",
            "(x1*cos(x2))*(x1*sin(x2)*cos(x3))",
            "(x1*sin(x2)*sin(x3)*cos(x4))*(x1*sin(x2)*sin(x3)*sin(x4))",
            "x1^2",
            "(x1*cos(x2))^3",
        };
    }
    if (name == "sheared") {
        return {
            "cos(2*pi*x1)",
            "sin(2*pi*x1)",
            "cos(2*pi*x2)",
            "sin(2*pi*x2)",
            "x3",
            "x4",
            "cos(2*pi*x1)*x3*x4",
            "x3^2*x4^2",
        };
    }
    throw input_error("no exponent basis for catalog entry '" + name + "'");
}

} // namespace

const ExpectedValue* CatalogEntry::find(const std::string& key) const {
    for (const ExpectedValue& e : expected) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

const ExpectedValue& CatalogEntry::at(const std::string& key) const {
    const ExpectedValue* e = find(key);
    if (!e) throw input_error("catalog entry has no expected value '" + key + "'");
    return *e;
}

CatalogEntry flat_bidisk() {
    CatalogEntry entry;
    entry.scene = build_scene(
        "chi = 1\n"
        "[chart bidisk]\n"
        "box = [0, 1] x [0, 2*pi] x [0, 1] x [0, 2*pi]\n"
        "g_11 = 1\n"
        "g_22 = x1^2\n"
        "g_33 = 1\n"
        "g_44 = x3^2\n"
        "periodic x2\n"
        "periodic x4\n"
        "face x1=hi : M\n"
        "face x3=hi : N\n"
        "singular x1=lo\n"
        "singular x3=lo\n",
        "bidisk");
    entry.reference_order = 8;
    double total = 4.0 * kPi * kPi;
    entry.expected = {
        ev("chi", 1.0, 0.0, "product of two disks, a topological 4-ball"),
        ev("total", total, 1e-8, "4 pi^2 times the Euler characteristic"),
        ev("defect", 0.0, 1e-8, "all mass sits on the corner torus, where the rule is exact"),
        ev("interior", 0.0, 1e-12, "flat metric, every curvature invariant vanishes"),
        ev("boundary_m", 0.0, 1e-10,
           "disk x circle x disk face: T = -2/9 cancels the shape term 2/9 pointwise"),
        ev("boundary_n", 0.0, 1e-10, "same cancellation on the other factor"),
        ev("corner", total, 1e-8, "U = G = 1/2 on a torus of area 4 pi^2"),
        ev("face_m_t", -2.0 / 9.0, 1e-10,
           "H = 1, |L0|^2 = 2/3, tr L0^3 = 2/9 for the unit-circle factor"),
        ev("face_m_l", 2.0 / 9.0, 1e-10, "2 H |L0|^2 / 3 - tr L0^3 with the values above"),
        ev("face_m_density", 0.0, 1e-12, "the five shape terms cancel for this face"),
        ev("corner_angle", kPi / 2.0, 1e-12, "the two factors meet orthogonally"),
        ev("corner_u", 0.5, 1e-10, "(pi - pi/2) * 0 - 0 + eta_M eta_N / 2 with eta = 1"),
        ev("corner_g", 0.5, 1e-10, "traceless forms are opposite, so the cross term flips sign"),
        ev("corner_gaussian", 0.0, 1e-12, "the corner torus is flat"),
        ev("corner_density", 1.0 / total, 1e-10, "(U + G) / (4 pi^2) with the values above"),
    };
    return entry;
}

CatalogEntry hemiball() {
    CatalogEntry entry;
    entry.scene = build_scene(
        "chi = 1\n"
        "[chart hemiball]\n"
        "box = [0, 1] x [0, pi/2] x [0, pi] x [0, 2*pi]\n"
        "g_11 = 1\n"
        "g_22 = x1^2\n"
        "g_33 = x1^2*sin(x2)^2\n"
        "g_44 = x1^2*sin(x2)^2*sin(x3)^2\n"
        "periodic x4\n"
        "face x1=hi : M\n"
        "face x2=hi : N\n"
        "singular x1=lo\n"
        "singular x2=lo\n"
        "singular x3=lo\n"
        "singular x3=hi\n",
        "hemiball");
    entry.reference_order = 32;
    double total = 4.0 * kPi * kPi;
    entry.expected = {
        ev("chi", 1.0, 0.0, "half of a 4-ball"),
        ev("total", total, 1e-6, "4 pi^2 times the Euler characteristic"),
        ev("defect", 0.0, 1e-6, "hemisphere integrands are analytic, Gauss nodes converge fast"),
        ev("interior", 0.0, 1e-10, "flat metric in polar coordinates"),
        ev("boundary_m", 2.0 * kPi * kPi, 1e-4,
           "T = 2 on the round hemisphere of volume pi^2; the shape term vanishes"),
        ev("boundary_n", 0.0, 1e-8, "the equatorial 3-ball is totally geodesic and flat"),
        ev("corner", 2.0 * kPi * kPi, 1e-4, "U = pi/2 on the unit 2-sphere of area 4 pi"),
        ev("face_m_t", 2.0, 1e-10, "H = 3, R_h = 6, L0 = 0 on the unit 3-sphere"),
        ev("face_m_l", 0.0, 1e-10, "every summand carries a factor of L0"),
        ev("face_m_density", 1.0 / (2.0 * kPi * kPi), 1e-10,
           "(H R_h / 6 - H^3 / 27) / (4 pi^2) = (3 - 1) / (4 pi^2)"),
        ev("corner_angle", kPi / 2.0, 1e-12, "the hemisphere meets the equatorial plane squarely"),
        ev("corner_u", kPi / 2.0, 1e-10,
           "(pi - pi/2) K with K = 1; eta_M = 0 and the slope terms cancel"),
        ev("corner_g", 0.0, 1e-10, "both faces are umbilic along the corner"),
        ev("corner_gaussian", 1.0, 1e-10, "unit 2-sphere"),
        ev("corner_eta_m", 0.0, 1e-10, "the equator is a great sphere of the 3-sphere"),
        ev("corner_eta_n", 2.0, 1e-10, "the unit sphere inside the flat equatorial 3-ball"),
        ev("corner_density", 1.0 / (8.0 * kPi), 1e-10, "(pi/2) / (4 pi^2)"),
    };
    return entry;
}

CatalogEntry sheared_corner() {
    CatalogEntry entry;
    entry.scene = build_scene(
        "chi = 0\n"
        "[chart sheared]\n"
        "box = [0, 1] x [0, 1] x [0, 1] x [0, 1]\n"
        "g_11 = 1\n"
        "g_22 = 1\n"
        "g_33 = 1\n"
        "g_44 = 1\n"
        "g_34 = cos(pi/3)\n"
        "periodic x1\n"
        "periodic x2\n"
        "face x3=lo : M\n"
        "face x3=hi : M\n"
        "face x4=lo : N\n"
        "face x4=hi : N\n",
        "sheared");
    entry.reference_order = 8;
    entry.expected = {
        ev("chi", 0.0, 0.0, "torus times a square"),
        ev("total", 0.0, 1e-10, "every density vanishes for a constant metric"),
        ev("defect", 0.0, 1e-10, "sums of exact zeros"),
        ev("interior", 0.0, 1e-12, "constant metric"),
        ev("boundary_m", 0.0, 1e-12, "coordinate faces of a constant metric are totally geodesic"),
        ev("boundary_n", 0.0, 1e-12, "same"),
        ev("corner", 0.0, 1e-12, "flat corner tori with vanishing second fundamental forms"),
        ev("corner_angle_acute", kPi / 3.0, 1e-12,
           "cos theta0 = g_34 when the sides match (lo/lo or hi/hi)"),
        ev("corner_angle_obtuse", 2.0 * kPi / 3.0, 1e-12, "mixed sides flip one conormal"),
        ev("face_m_t", 0.0, 1e-14, "all ingredients vanish"),
        ev("corner_u", 0.0, 1e-14, "angle defect multiplies K = 0"),
        ev("corner_density", 0.0, 1e-14, "no shape terms at a flat corner"),
    };
    return entry;
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {"bidisk", "hemiball", "sheared"};
    return names;
}

CatalogEntry catalog_entry(const std::string& name) {
    if (name == "bidisk") return flat_bidisk();
    if (name == "hemiball") return hemiball();
    if (name == "sheared") return sheared_corner();
    std::string known;
    for (const std::string& n : catalog_names()) {
        if (!known.empty()) known += ", ";
        known += n;
    }
    throw input_error("unknown catalog entry '" + name + "' (known: " + known + ")");
}

CatalogEntry conformal_variant(const CatalogEntry& base, const Expression& omega,
                               double amplitude) {
    if (omega.empty()) throw input_error("conformal exponent expression is empty");
    if (!std::isfinite(amplitude)) throw input_error("conformal amplitude must be finite");
    CatalogEntry entry;
    entry.scene = base.scene;
    entry.scene.omega =
        Expression::parse(format_coefficient(amplitude) + "*(" + omega.text() + ")");
    entry.scene.name = base.scene.name + "~conformal";
    require_periodic_exponent(entry.scene);
    validate_scene(entry.scene);
    entry.reference_order = 20;
    double chi = base.at("chi").value;
    entry.expected = {
        ev("chi", chi, 0.0, "conformal changes preserve the topology"),
        ev("total", 4.0 * kPi * kPi * chi, 1e-3, "same target as the base entry"),
        ev("defect", 0.0, 1e-3, "tolerance pinned at quadrature order 20"),
    };
    return entry;
}

CatalogEntry seeded_conformal_variant(const CatalogEntry& base, std::uint64_t seed,
                                      double amplitude) {
    std::vector<std::string> basis = exponent_basis(base.scene.name);
    std::mt19937_64 gen(seed);
    auto uniform = [&gen]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    std::vector<double> coeff(basis.size());
    double l1 = 0.0;
    for (double& c : coeff) {
        c = 2.0 * uniform() - 1.0;
        l1 += std::abs(c);
    }
    if (l1 == 0.0) {
        coeff[0] = 1.0;
        l1 = 1.0;
    }
    // Every basis element is bounded by 1, so an l1-normalized combination is
    // bounded by the requested amplitude.
    std::string text;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        double c = coeff[k] / l1;
        if (!text.empty()) text += c < 0.0 ? " - " : " + ";
        else if (c < 0.0) text += "-";
        text += format_coefficient(std::abs(c)) + "*(" + basis[k] + ")";
    }
    CatalogEntry entry = conformal_variant(base, Expression::parse(text), amplitude);
    entry.scene.name = base.scene.name + "~w" + std::to_string(seed);
    return entry;
}

} // namespace cgb
