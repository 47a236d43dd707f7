#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cgb/boundary.hpp"
#include "cgb/catalog.hpp"
#include "cgb/corner.hpp"
#include "cgb/curvature.hpp"
#include "cgb/errors.hpp"
#include "cgb/harness.hpp"
#include "cgb/report.hpp"
#include "cgb/scene.hpp"

using namespace cgb;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Scene resolve_scene(const std::string& arg) {
    const std::string prefix = "catalog:";
    if (arg.rfind(prefix, 0) == 0) return catalog_entry(arg.substr(prefix.size())).scene;
    if (std::filesystem::exists(arg)) return load_scene_file(arg);
    for (const std::string& name : catalog_names())
        if (name == arg) return catalog_entry(name).scene;
    throw input_error("no scene file or catalog entry named '" + arg + "'");
}

struct FaceSpec {
    int axis = -1;
    Side side = Side::kLo;
};

FaceSpec parse_face_spec(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos)
        throw input_error("face spec must look like x1=lo or x3=hi");
    std::string axis = text.substr(0, eq), side = text.substr(eq + 1);
    FaceSpec spec;
    if (axis.size() == 2 && axis[0] == 'x' && axis[1] >= '1' && axis[1] <= '4')
        spec.axis = axis[1] - '1';
    else
        throw input_error("face spec axis must be one of x1..x4");
    if (side == "lo")
        spec.side = Side::kLo;
    else if (side == "hi")
        spec.side = Side::kHi;
    else
        throw input_error("face spec side must be lo or hi");
    return spec;
}

/// The labeled corner of the chart whose two wall coordinates are nearest to
/// the requested point.
CornerId find_corner(const Scene& scene, int chart, const std::array<double, kDim>& x) {
    const CornerId* best = nullptr;
    double best_dist = 0.0;
    std::vector<CornerId> corners = labeled_corners(scene);
    for (const CornerId& cid : corners) {
        if (cid.chart != chart) continue;
        const Chart& ch = scene.charts[chart];
        double dist = std::abs(x[cid.axis_m] - ch.side_coordinate(cid.axis_m, cid.side_m)) +
                      std::abs(x[cid.axis_n] - ch.side_coordinate(cid.axis_n, cid.side_n));
        if (!best || dist < best_dist) {
            best = &cid;
            best_dist = dist;
        }
    }
    if (!best) throw input_error("the chart has no labeled corner");
    return *best;
}

void emit_group(std::string& text, nlohmann::ordered_json& json, const char* group,
                const std::vector<std::pair<const char*, nlohmann::ordered_json>>& fields) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s\n", group);
    text += buf;
    nlohmann::ordered_json obj;
    for (const auto& [key, value] : fields) {
        obj[key] = value;
        std::string shown = value.is_number_float() ? num(value.get<double>())
                                                    : value.dump();
        std::snprintf(buf, sizeof buf, "  %-24s: %s\n", key, shown.c_str());
        text += buf;
    }
    json[group] = obj;
}

int run_point(const Scene& scene, int chart_index, std::array<double, kDim> x,
              const std::string& face_spec, bool corner, const std::string& format) {
    if (chart_index < 0 || chart_index >= static_cast<int>(scene.charts.size()))
        throw input_error("chart index out of range");
    const Chart& chart = scene.charts[chart_index];
    for (int a = 0; a < kDim; ++a)
        if (x[a] < chart.lo[a] || x[a] > chart.hi[a])
            throw input_error("point is outside the chart box");

    std::string text;
    nlohmann::ordered_json json;
    json["scene"] = scene.name;
    json["chart"] = chart.name;
    json["point"] = x;
    {
        char buf[200];
        std::snprintf(buf, sizeof buf, "%-26s: %s\n%-26s: %s\n%-26s: %s, %s, %s, %s\n",
                      "scene", scene.name.c_str(), "chart", chart.name.c_str(), "point",
                      num(x[0]).c_str(), num(x[1]).c_str(), num(x[2]).c_str(),
                      num(x[3]).c_str());
        text += buf;
    }

    ChartEvaluator eval(scene, chart_index, 4);
    std::array<Jet, 10> g;
    eval.metric_jets(x, g);
    MetricGeometry geo(4);
    geo.compute(g);
    InteriorQuantities q = interior_quantities(geo);
    std::vector<std::pair<const char*, nlohmann::ordered_json>> interior = {
        {"omega", eval.omega_value(x)},
        {"volume_density", eval.volume_density(x)},
        {"scal", q.scal},
        {"lap_scal", q.lap_scal},
        {"j_trace", q.j_trace},
        {"p_norm2", q.p_norm2},
        {"ric_norm2", q.ric_norm2},
        {"riem_norm2", q.riem_norm2},
        {"weyl_norm2", q.weyl_norm2},
        {"q", q.q},
        {"q_scalar_form", q.q_scalar_form},
        {"pfaffian_density", q.pfaffian_density},
        {"psi_decomposition", q.psi_decomposition},
        {"integrand", q.integrand},
        {"gb_density", q.gb_density},
    };
    emit_group(text, json, "interior", interior);

    if (!face_spec.empty()) {
        FaceSpec fs = parse_face_spec(face_spec);
        BoundaryFrame bf(eval, x, fs.axis, fs.side);
        std::vector<std::pair<const char*, nlohmann::ordered_json>> face = {
            {"normal", std::array<double, 4>{bf.normal_value(0), bf.normal_value(1),
                                             bf.normal_value(2), bf.normal_value(3)}},
            {"induced_det", bf.induced().det()},
            {"induced_scalar", bf.induced_scalar()},
            {"ambient_scalar", bf.ambient_scalar()},
            {"mean_curvature", bf.mean_curvature()},
            {"traceless_norm2", bf.traceless_norm2()},
            {"traceless_cubed", bf.traceless_cubed()},
            {"laplacian_mean_curvature", bf.laplacian_mean_curvature()},
            {"normal_scalar_slope", bf.normal_scalar_slope()},
            {"t_curvature", t_curvature(bf)},
            {"l_curvature", l_curvature(bf)},
            {"aw_boundary_density", aw_boundary_density(bf)},
        };
        emit_group(text, json, "face", face);
    }

    if (corner) {
        CornerId cid = find_corner(scene, chart_index, x);
        CornerFrame cf(eval, x, cid.axis_m, cid.side_m, cid.axis_n, cid.side_n);
        std::vector<std::pair<const char*, nlohmann::ordered_json>> fields = {
            {"angle", cf.angle()},
            {"normal_m", std::array<double, 4>{cf.normal_m(0), cf.normal_m(1),
                                               cf.normal_m(2), cf.normal_m(3)}},
            {"normal_n", std::array<double, 4>{cf.normal_n(0), cf.normal_n(1),
                                               cf.normal_n(2), cf.normal_n(3)}},
            {"induced_det", cf.induced().det()},
            {"gaussian", cf.gaussian()},
            {"mean_curvature_m", cf.mean_curvature_m()},
            {"mean_curvature_n", cf.mean_curvature_n()},
            {"traceless_m_norm2", cf.traceless_m_norm2()},
            {"traceless_n_norm2", cf.traceless_n_norm2()},
            {"traceless_dot", cf.traceless_dot()},
            {"green_m", cf.green_m()},
            {"green_n", cf.green_n()},
            {"u_curvature", u_curvature(cf)},
            {"g_curvature", g_curvature(cf)},
            {"corner_integrand", corner_integrand(cf)},
            {"aw_corner_density_closed", aw_corner_density(cf)},
            {"aw_corner_density_quadrature",
             aw_corner_density(cf, CornerRule::kQuadrature, 32)},
        };
        emit_group(text, json, "corner", fields);
    }

    if (format == "json")
        std::fputs((json.dump(2) + "\n").c_str(), stdout);
    else
        std::fputs(text.c_str(), stdout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification of a curvature identity on 4-dimensional scenes "
                 "with boundary faces and corners"};
    app.require_subcommand(1);
    int exit_code = 0;

    std::string scene_arg, format = "text", omega_text, face_spec;
    int quad_order = 16, theta_order = 32, chart_index = 0;
    int verify_samples = 10, law_samples = 100;
    double tol = 1e-3;
    std::uint64_t seed = 1;
    bool no_timings = false, corner = false;
    std::vector<int> orders = {8, 16, 32};
    std::vector<double> at;

    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "Output format")
            ->check(CLI::IsMember({"text", "json"}))
            ->capture_default_str();
    };

    CLI::App* verify = app.add_subcommand(
        "verify", "Integrate both decompositions and grade the defect");
    verify->add_option("scene", scene_arg, "Scene file or catalog:name")->required();
    verify->add_option("--quad-order", quad_order, "Nodes per free axis")
        ->capture_default_str();
    verify->add_option("--theta-order", theta_order, "Nodes for the corner angle integral")
        ->capture_default_str();
    verify->add_option("--tol", tol, "Pass threshold on the path A defect")
        ->capture_default_str();
    verify->add_option("--samples", verify_samples, "Identity samples per stratum")
        ->capture_default_str();
    verify->add_option("--seed", seed, "Sample seed")->capture_default_str();
    add_format(verify);
    verify->add_flag("--no-timings", no_timings,
                     "Omit wall-clock fields; output is then byte-stable");
    verify->callback([&] {
        VerifyOptions options;
        options.quad_order = quad_order;
        options.theta_order = theta_order;
        options.residual_samples = verify_samples;
        options.seed = seed;
        Report report = verify_gauss_bonnet(resolve_scene(scene_arg), options);
        if (format == "json") {
            std::fputs(format_json(report, !no_timings).c_str(), stdout);
        } else {
            std::fputs(format_text(report, !no_timings).c_str(), stdout);
            std::printf("verdict             : %s (defect %s vs tol %s)\n",
                        report.defect_a < tol ? "pass" : "fail",
                        num(report.defect_a).c_str(), num(tol).c_str());
        }
        exit_code = report.defect_a < tol ? 0 : 1;
    });

    CLI::App* laws = app.add_subcommand(
        "laws", "Check the conformal transformation laws pointwise");
    laws->add_option("scene", scene_arg, "Scene file or catalog:name")->required();
    laws->add_option("--omega", omega_text, "Conformal exponent expression")->required();
    laws->add_option("--seed", seed, "Sample seed")->capture_default_str();
    laws->add_option("--samples", law_samples, "Samples per stratum")->capture_default_str();
    add_format(laws);
    laws->add_flag("--no-timings", no_timings,
                   "Omit wall-clock fields; output is then byte-stable");
    laws->callback([&] {
        SampleSpec spec{law_samples, seed};
        LawSuite suite = conformal_law_check(resolve_scene(scene_arg),
                                             Expression::parse(omega_text), spec);
        std::fputs((format == "json" ? format_json(suite, !no_timings)
                                     : format_text(suite, !no_timings))
                       .c_str(),
                   stdout);
    });

    CLI::App* sweep = app.add_subcommand(
        "sweep", "Verification totals across quadrature orders");
    sweep->add_option("scene", scene_arg, "Scene file or catalog:name")->required();
    sweep->add_option("--orders", orders, "Comma-separated quadrature orders")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--theta-order", theta_order, "Nodes for the corner angle integral")
        ->capture_default_str();
    add_format(sweep);
    sweep->add_flag("--no-timings", no_timings,
                    "Omit wall-clock fields; output is then byte-stable");
    sweep->callback([&] {
        VerifyOptions options;
        options.theta_order = theta_order;
        SweepTable table = convergence_sweep(resolve_scene(scene_arg), orders, options);
        std::fputs((format == "json" ? format_json(table, !no_timings)
                                     : format_text(table, !no_timings))
                       .c_str(),
                   stdout);
    });

    CLI::App* point = app.add_subcommand(
        "point", "Dump every pointwise quantity at one chart point");
    point->add_option("scene", scene_arg, "Scene file or catalog:name")->required();
    point->add_option("--at", at, "Chart coordinates x1,x2,x3,x4")
        ->delimiter(',')
        ->expected(4)
        ->required();
    point->add_option("--face", face_spec, "Evaluate the face frame, e.g. x1=hi");
    point->add_flag("--corner", corner, "Evaluate the nearest labeled corner frame");
    point->add_option("--chart", chart_index, "Chart index")->capture_default_str();
    add_format(point);
    point->callback([&] {
        std::array<double, kDim> x{at[0], at[1], at[2], at[3]};
        exit_code = run_point(resolve_scene(scene_arg), chart_index, x, face_spec,
                              corner, format);
    });

    CLI::App* scene_cmd = app.add_subcommand("scene", "Scene utilities");
    scene_cmd->require_subcommand(1);
    CLI::App* dump = scene_cmd->add_subcommand("dump", "Print the canonical scene text");
    dump->add_option("name", scene_arg, "Catalog name or scene file")->required();
    dump->callback([&] { std::fputs(print_scene(resolve_scene(scene_arg)).c_str(), stdout); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const input_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return exit_code;
}
