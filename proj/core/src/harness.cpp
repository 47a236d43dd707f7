#include "cgb/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <random>
#include <utility>

#include "cgb/boundary.hpp"
#include "cgb/corner.hpp"
#include "cgb/curvature.hpp"
#include "cgb/quadrature.hpp"

namespace cgb {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNorm = 4.0 * kPi * kPi; // reciprocal of the density normalization

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const Expression& effective_omega(const Scene& scene, const Chart& chart) {
    return chart.omega.empty() ? scene.omega : chart.omega;
}

const double* fixed_value(std::span<const std::pair<int, double>> fixed, int axis) {
    for (const auto& [a, v] : fixed)
        if (a == axis) return &v;
    return nullptr;
}

/// Quadrature plan for one stratum: fixed axes get a single node at the face
/// coordinate, axes nothing depends on collapse to one midpoint node carrying
/// the interval length (exact for a constant), periodic axes take the
/// midpoint rule, and the rest take Gauss nodes.
std::vector<AxisRule> stratum_axes(const Scene& scene, const Chart& chart, int order,
                                   std::span<const std::pair<int, double>> fixed) {
    const Expression& omega = effective_omega(scene, chart);
    std::vector<AxisRule> axes(kDim);
    for (int a = 0; a < kDim; ++a) {
        if (const double* v = fixed_value(fixed, a)) {
            axes[a].nodes = {*v};
            axes[a].weights = {1.0};
            continue;
        }
        bool referenced = !omega.empty() && omega.references(a);
        for (int k = 0; k < 10 && !referenced; ++k)
            if (chart.metric[k].references(a)) referenced = true;
        if (!referenced) {
            axes[a].nodes = {0.5 * (chart.lo[a] + chart.hi[a])};
            axes[a].weights = {chart.hi[a] - chart.lo[a]};
        } else if (chart.periodic[a]) {
            axes[a] = midpoint_axis(order, chart.lo[a], chart.hi[a]);
        } else {
            axes[a] = gauss_axis(order, chart.lo[a], chart.hi[a]);
        }
    }
    return axes;
}

double checked(double v, const char* what) {
    if (!std::isfinite(v))
        throw numerical_error(std::string("non-finite ") + what + " at a quadrature node");
    return v;
}

struct PieceTotals {
    double interior_a = 0.0, boundary_m_a = 0.0, boundary_n_a = 0.0, corner_a = 0.0;
    double interior_b = 0.0, boundary_m_b = 0.0, boundary_n_b = 0.0, corner_b = 0.0;

    double total_a() const { return interior_a + boundary_m_a + boundary_n_a + corner_a; }
    double total_b() const { return interior_b + boundary_m_b + boundary_n_b + corner_b; }
};

/// Integrates both decompositions over every stratum. Path A spreads the pure
/// divergences across the pieces by the divergence theorem: the interior
/// keeps its algebraic part plus the inward scalar slope collected on the
/// labeled faces, each face keeps its measure density minus that slope plus
/// the mean-curvature slopes collected on its corners, and the corner keeps
/// the angle terms. The slope integrals are reused between the pieces, so
/// they cancel exactly in the total; fluxes through glue faces cancel in
/// pairs and the induced measure collapses on singular faces, which is why
/// only labeled faces are collected. Path B integrates the raw densities,
/// with the corner density through its angle quadrature so the closed angle
/// algebra stays on one side only.
PieceTotals assemble(const Scene& scene, int order, int theta_order) {
    KahanSum interior_a, interior_pf;   // path A algebraic part; raw measure density
    KahanSum interior_flux;             // inward scalar slope over all labeled faces
    KahanSum boundary_a[2], boundary_b[2];
    KahanSum corner_a, corner_b;

    for (int c = 0; c < static_cast<int>(scene.charts.size()); ++c) {
        ChartEvaluator eval(scene, c, 4);
        std::array<Jet, 10> g;
        MetricGeometry geo(4);
        auto axes = stratum_axes(scene, scene.charts[c], order, {});
        for_each_node(axes, [&](std::span<const double> x, double w) {
            eval.metric_jets(x, g);
            geo.compute(g);
            InteriorQuantities q = interior_quantities(geo);
            double dv = std::sqrt(geo.det()) * w;
            // The algebraic scalar part is rebuilt from the traces; the
            // stored q carries the Laplacian term that path A hands to the
            // faces.
            double q_alg = (q.scal * q.scal - 3.0 * q.ric_norm2) / 6.0;
            interior_a.add(checked((0.125 * q.weyl_norm2 + 0.5 * q_alg) * dv, "interior density"));
            interior_pf.add(checked(q.pfaffian_density * dv, "interior measure density"));
        });
    }

    auto do_face = [&](const FaceId& f, int slot) {
        const Chart& chart = scene.charts[f.chart];
        ChartEvaluator eval(scene, f.chart, 4);
        double side = chart.side_coordinate(f.axis, f.side);
        std::array<std::pair<int, double>, 1> fixed{{{f.axis, side}}};
        KahanSum density, slope;
        auto axes = stratum_axes(scene, chart, order, fixed);
        for_each_node(axes, [&](std::span<const double> x, double w) {
            std::array<double, kDim> p{};
            std::copy(x.begin(), x.end(), p.begin());
            BoundaryFrame bf(eval, p, f.axis, f.side);
            double ds = std::sqrt(bf.induced().det()) * w;
            density.add(checked(aw_boundary_density(bf) * ds, "face density"));
            slope.add(checked(bf.normal_scalar_slope() * ds, "face scalar slope"));
        });
        boundary_a[slot].add(kNorm * density.value() - slope.value() / 12.0);
        boundary_b[slot].add(density.value());
        interior_flux.add(slope.value());
    };
    for (const FaceId& f : labeled_faces(scene, FaceRole::kM)) do_face(f, 0);
    for (const FaceId& f : labeled_faces(scene, FaceRole::kN)) do_face(f, 1);

    for (const CornerId& cid : labeled_corners(scene)) {
        const Chart& chart = scene.charts[cid.chart];
        ChartEvaluator eval(scene, cid.chart, 4);
        std::array<std::pair<int, double>, 2> fixed{
            {{cid.axis_m, chart.side_coordinate(cid.axis_m, cid.side_m)},
             {cid.axis_n, chart.side_coordinate(cid.axis_n, cid.side_n)}}};
        KahanSum angle_terms, slope_m, slope_n, density;
        auto axes = stratum_axes(scene, chart, order, fixed);
        for_each_node(axes, [&](std::span<const double> x, double w) {
            std::array<double, kDim> p{};
            std::copy(x.begin(), x.end(), p.begin());
            CornerFrame cf(eval, p, cid.axis_m, cid.side_m, cid.axis_n, cid.side_n);
            double dl = std::sqrt(cf.induced().det()) * w;
            angle_terms.add(checked((u_curvature(cf) + g_curvature(cf)) * dl, "corner density"));
            slope_m.add(checked(cf.green_m() * dl, "corner slope"));
            slope_n.add(checked(cf.green_n() * dl, "corner slope"));
            density.add(checked(
                aw_corner_density(cf, CornerRule::kQuadrature, theta_order) * dl,
                "corner measure density"));
        });
        corner_a.add(angle_terms.value());
        boundary_a[0].add(slope_m.value() / 3.0);
        boundary_a[1].add(slope_n.value() / 3.0);
        corner_b.add(density.value());
    }

    PieceTotals out;
    out.interior_a = interior_a.value() + interior_flux.value() / 12.0;
    out.boundary_m_a = boundary_a[0].value();
    out.boundary_n_a = boundary_a[1].value();
    out.corner_a = corner_a.value();
    out.interior_b = kNorm * interior_pf.value();
    out.boundary_m_b = kNorm * boundary_b[0].value();
    out.boundary_n_b = kNorm * boundary_b[1].value();
    out.corner_b = kNorm * corner_b.value();
    return out;
}

double unit_draw(std::mt19937_64& gen) { return (gen() >> 11) * 0x1.0p-53; }

/// One derived stream per stratum so sample sets are stable under
/// reordering of the suites.
std::mt19937_64 stratum_stream(std::uint64_t seed, int stratum) {
    return std::mt19937_64(seed + 0x9e3779b97f4a7c15ULL * (stratum + 1));
}

/// Free coordinates land in the inner band of the box so box-wall coordinate
/// degeneracies stay out of the pointwise suites.
std::array<double, kDim> sample_point(const Chart& chart,
                                      std::span<const std::pair<int, double>> fixed,
                                      std::mt19937_64& gen) {
    std::array<double, kDim> x{};
    for (int a = 0; a < kDim; ++a) {
        if (const double* v = fixed_value(fixed, a)) {
            x[a] = *v;
            continue;
        }
        x[a] = chart.lo[a] + (0.08 + 0.84 * unit_draw(gen)) * (chart.hi[a] - chart.lo[a]);
    }
    return x;
}

struct ResidualAcc {
    const char* name;
    double max = 0.0;
    KahanSum sum;
    int count = 0;

    explicit ResidualAcc(const char* n) : name(n) {}
    void add(double r) {
        r = std::abs(r);
        if (!std::isfinite(r))
            throw numerical_error(std::string("non-finite residual in ") + name);
        max = std::max(max, r);
        sum.add(r);
        ++count;
    }
    ResidualStat stat() const {
        return {name, max, count > 0 ? sum.value() / count : 0.0, count};
    }
};

const Expression& covariance_test_field() {
    static const Expression u = Expression::parse(
        "1 + x1*x2/3 + x3^2/5 + x1*x3*x4/7 + sin(x2 + x4) + exp(x1/4)");
    return u;
}

void require_verifiable(const Scene& scene) {
    if (scene.charts.empty()) throw input_error("scene has no charts");
    if (!scene.chi)
        throw input_error("scene does not declare chi; the target is trusted input");
}

double roundoff_floor(double target) {
    return 1e-12 * std::max(1.0, std::abs(target));
}

} // namespace

std::vector<ResidualStat> identity_residuals(const Scene& scene, const SampleSpec& spec,
                                             int theta_order) {
    if (scene.charts.empty()) throw input_error("scene has no charts");
    if (spec.samples_per_stratum < 1) throw input_error("sample count must be positive");

    ResidualAcc interior("interior_density_match");
    ResidualAcc boundary("boundary_density_match");
    ResidualAcc corner_quad("corner_closed_vs_quadrature");
    ResidualAcc corner_int("corner_closed_vs_integrand");
    int stratum = 0;

    for (int c = 0; c < static_cast<int>(scene.charts.size()); ++c) {
        ChartEvaluator eval(scene, c, 4);
        std::array<Jet, 10> g;
        MetricGeometry geo(4);
        std::mt19937_64 gen = stratum_stream(spec.seed, stratum++);
        for (int k = 0; k < spec.samples_per_stratum; ++k) {
            auto x = sample_point(scene.charts[c], {}, gen);
            eval.metric_jets(x, g);
            geo.compute(g);
            InteriorQuantities q = interior_quantities(geo);
            interior.add(q.pfaffian_density - q.integrand);
        }
    }

    for (FaceRole role : {FaceRole::kM, FaceRole::kN}) {
        for (const FaceId& f : labeled_faces(scene, role)) {
            const Chart& chart = scene.charts[f.chart];
            ChartEvaluator eval(scene, f.chart, 4);
            std::array<std::pair<int, double>, 1> fixed{
                {{f.axis, chart.side_coordinate(f.axis, f.side)}}};
            std::mt19937_64 gen = stratum_stream(spec.seed, stratum++);
            for (int k = 0; k < spec.samples_per_stratum; ++k) {
                auto x = sample_point(chart, fixed, gen);
                BoundaryFrame bf(eval, x, f.axis, f.side);
                double third_order = t_curvature(bf) + l_curvature(bf) +
                                     bf.laplacian_mean_curvature() / 3.0 +
                                     bf.normal_scalar_slope() / 12.0;
                boundary.add(aw_boundary_density(bf) - third_order / kNorm);
            }
        }
    }

    for (const CornerId& cid : labeled_corners(scene)) {
        const Chart& chart = scene.charts[cid.chart];
        ChartEvaluator eval(scene, cid.chart, 4);
        std::array<std::pair<int, double>, 2> fixed{
            {{cid.axis_m, chart.side_coordinate(cid.axis_m, cid.side_m)},
             {cid.axis_n, chart.side_coordinate(cid.axis_n, cid.side_n)}}};
        std::mt19937_64 gen = stratum_stream(spec.seed, stratum++);
        for (int k = 0; k < spec.samples_per_stratum; ++k) {
            auto x = sample_point(chart, fixed, gen);
            CornerFrame cf(eval, x, cid.axis_m, cid.side_m, cid.axis_n, cid.side_n);
            double closed = aw_corner_density(cf);
            corner_quad.add(closed -
                            aw_corner_density(cf, CornerRule::kQuadrature, theta_order));
            corner_int.add(closed - corner_integrand(cf));
        }
    }

    return {interior.stat(), boundary.stat(), corner_quad.stat(), corner_int.stat()};
}

Report verify_gauss_bonnet(const Scene& scene, const VerifyOptions& options) {
    auto t0 = Clock::now();
    require_verifiable(scene);
    if (options.residual_samples < 0) throw input_error("sample count must be nonnegative");

    Report r;
    r.scene = scene.name;
    r.chi = *scene.chi;
    r.quad_order = options.quad_order;
    r.theta_order = options.theta_order;
    r.seed = options.seed;
    r.samples_per_stratum = options.residual_samples;
    r.target = kNorm * r.chi;

    PieceTotals p = assemble(scene, options.quad_order, options.theta_order);
    r.interior_a = p.interior_a;
    r.boundary_m_a = p.boundary_m_a;
    r.boundary_n_a = p.boundary_n_a;
    r.corner_a = p.corner_a;
    r.interior_b = p.interior_b;
    r.boundary_m_b = p.boundary_m_b;
    r.boundary_n_b = p.boundary_n_b;
    r.corner_b = p.corner_b;
    r.total_a = p.total_a();
    r.total_b = p.total_b();
    r.defect_a = std::abs(r.total_a - r.target);
    r.defect_b = std::abs(r.total_b - r.target);
    r.path_gap = r.total_a - r.total_b;

    double floor = roundoff_floor(r.target);
    if (options.error_estimate) {
        PieceTotals h = assemble(scene, std::max(2, options.quad_order / 2),
                                 options.theta_order);
        r.quad_error_estimate = std::max(std::abs(p.total_a() - h.total_a()),
                                         std::abs(p.total_b() - h.total_b())) +
                                floor;
    } else {
        r.quad_error_estimate = floor;
    }
    r.gap_within_bound = std::abs(r.path_gap) <= 10.0 * r.quad_error_estimate;

    if (options.residual_samples > 0)
        r.identities = identity_residuals(
            scene, {options.residual_samples, options.seed}, options.theta_order);

    r.elapsed_seconds = seconds_since(t0);
    return r;
}

LawSuite conformal_law_check(const Scene& scene, const Expression& omega,
                             const SampleSpec& spec) {
    auto t0 = Clock::now();
    if (scene.charts.empty()) throw input_error("scene has no charts");
    if (omega.empty()) throw input_error("law check needs a conformal exponent");
    if (spec.samples_per_stratum < 1) throw input_error("sample count must be positive");

    auto compose = [](const Expression& base, const Expression& add) {
        return Expression::parse("(" + base.text() + ") + (" + add.text() + ")");
    };
    Scene changed = scene;
    for (Chart& chart : changed.charts)
        if (!chart.omega.empty()) chart.omega = compose(chart.omega, omega);
    changed.omega = scene.omega.empty() ? omega : compose(scene.omega, omega);

    ResidualAcc weyl("interior_weyl_weight");
    ResidualAcc t_law("boundary_t_transform");
    ResidualAcc l_law("boundary_l_weight");
    ResidualAcc p3_cov("boundary_p3_covariance");
    ResidualAcc g_law("corner_g_weight");
    ResidualAcc u_law("corner_u_transform");
    ResidualAcc p2b_cov("corner_p2b_covariance");
    ResidualAcc angle("corner_angle_invariance");
    int stratum = 0;

    auto omega_value = [&](const std::array<double, kDim>& x) {
        return omega.eval(std::span<const double>(x.data(), kDim));
    };
    auto field_jet = [&](const Expression& f, const std::array<double, kDim>& x) {
        std::array<Jet, kDim> coords;
        for (int a = 0; a < kDim; ++a) coords[a] = Jet::variable(a, x[a], kDim, 4);
        return f.eval(std::span<const Jet>(coords.data(), kDim));
    };
    const Expression& u_field = covariance_test_field();

    for (int c = 0; c < static_cast<int>(scene.charts.size()); ++c) {
        ChartEvaluator base(scene, c, 4);
        ChartEvaluator conf(changed, c, 4);
        std::array<Jet, 10> g;
        MetricGeometry geo_b(4), geo_c(4);
        std::mt19937_64 gen = stratum_stream(spec.seed, stratum++);
        for (int k = 0; k < spec.samples_per_stratum; ++k) {
            auto x = sample_point(scene.charts[c], {}, gen);
            base.metric_jets(x, g);
            geo_b.compute(g);
            conf.metric_jets(x, g);
            geo_c.compute(g);
            InteriorQuantities qb = interior_quantities(geo_b);
            InteriorQuantities qc = interior_quantities(geo_c);
            weyl.add(qc.weyl_norm2 - std::exp(-4.0 * omega_value(x)) * qb.weyl_norm2);
        }
    }

    for (FaceRole role : {FaceRole::kM, FaceRole::kN}) {
        for (const FaceId& f : labeled_faces(scene, role)) {
            const Chart& chart = scene.charts[f.chart];
            ChartEvaluator base(scene, f.chart, 4);
            ChartEvaluator conf(changed, f.chart, 4);
            std::array<std::pair<int, double>, 1> fixed{
                {{f.axis, chart.side_coordinate(f.axis, f.side)}}};
            std::mt19937_64 gen = stratum_stream(spec.seed, stratum++);
            for (int k = 0; k < spec.samples_per_stratum; ++k) {
                auto x = sample_point(chart, fixed, gen);
                BoundaryFrame fb(base, x, f.axis, f.side);
                BoundaryFrame fc(conf, x, f.axis, f.side);
                double w = omega_value(x);
                double e3 = std::exp(3.0 * w);
                Jet wjet = field_jet(omega, x);
                Jet ujet = field_jet(u_field, x);
                t_law.add(e3 * t_curvature(fc) - t_curvature(fb) - p3_apply(fb, wjet));
                l_law.add(e3 * l_curvature(fc) - l_curvature(fb));
                p3_cov.add(p3_apply(fc, ujet) - std::exp(-3.0 * w) * p3_apply(fb, ujet));
            }
        }
    }

    for (const CornerId& cid : labeled_corners(scene)) {
        const Chart& chart = scene.charts[cid.chart];
        ChartEvaluator base(scene, cid.chart, 4);
        ChartEvaluator conf(changed, cid.chart, 4);
        std::array<std::pair<int, double>, 2> fixed{
            {{cid.axis_m, chart.side_coordinate(cid.axis_m, cid.side_m)},
             {cid.axis_n, chart.side_coordinate(cid.axis_n, cid.side_n)}}};
        std::mt19937_64 gen = stratum_stream(spec.seed, stratum++);
        for (int k = 0; k < spec.samples_per_stratum; ++k) {
            auto x = sample_point(chart, fixed, gen);
            CornerFrame cb(base, x, cid.axis_m, cid.side_m, cid.axis_n, cid.side_n);
            CornerFrame cc(conf, x, cid.axis_m, cid.side_m, cid.axis_n, cid.side_n);
            double w = omega_value(x);
            Jet wjet = field_jet(omega, x);
            Jet ujet = field_jet(u_field, x);
            g_law.add(g_curvature(cc) - std::exp(-2.0 * w) * g_curvature(cb));
            u_law.add(std::exp(2.0 * w) * u_curvature(cc) - u_curvature(cb) -
                      p2b_apply(cb, wjet));
            p2b_cov.add(p2b_apply(cc, ujet) - std::exp(-2.0 * w) * p2b_apply(cb, ujet));
            angle.add(cc.angle() - cb.angle());
        }
    }

    LawSuite suite;
    suite.scene = scene.name;
    suite.omega = omega.text();
    suite.seed = spec.seed;
    suite.samples_per_stratum = spec.samples_per_stratum;
    suite.laws = {weyl.stat(),  t_law.stat(),   l_law.stat(), p3_cov.stat(),
                  g_law.stat(), u_law.stat(), p2b_cov.stat(), angle.stat()};
    suite.elapsed_seconds = seconds_since(t0);
    return suite;
}

SweepTable convergence_sweep(const Scene& scene, std::span<const int> orders,
                             const VerifyOptions& base) {
    require_verifiable(scene);
    if (orders.size() < 2) throw input_error("a sweep needs at least two orders");
    for (std::size_t i = 1; i < orders.size(); ++i)
        if (orders[i] <= orders[i - 1])
            throw input_error("sweep orders must be strictly increasing");

    SweepTable table;
    table.scene = scene.name;
    table.target = kNorm * *scene.chi;
    double floor = roundoff_floor(table.target);
    for (int order : orders) {
        auto t0 = Clock::now();
        PieceTotals p = assemble(scene, order, base.theta_order);
        SweepRow row;
        row.order = order;
        row.total_a = p.total_a();
        row.total_b = p.total_b();
        row.defect_a = std::abs(row.total_a - table.target);
        row.defect_b = std::abs(row.total_b - table.target);
        row.elapsed_seconds = seconds_since(t0);
        table.rows.push_back(row);
    }
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const SweepRow& prev = table.rows[i - 1];
        const SweepRow& cur = table.rows[i];
        if (cur.defect_a > std::max(prev.defect_a, floor) ||
            cur.defect_b > std::max(prev.defect_b, floor))
            table.monotone = false;
    }
    return table;
}

} // namespace cgb
