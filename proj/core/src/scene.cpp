#include "cgb/scene.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cgb {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Cholesky determinant of a packed symmetric 4x4 matrix; nullopt when the
/// matrix is not positive definite or not finite.
std::optional<double> spd_det(const std::array<double, 10>& s) {
    double m[kDim][kDim];
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) m[i][j] = s[sym_index(i, j)];
    double det = 1.0;
    for (int k = 0; k < kDim; ++k) {
        double pivot = m[k][k];
        for (int r = 0; r < k; ++r) pivot -= m[k][r] * m[k][r];
        if (!(pivot > 0.0) || !std::isfinite(pivot)) return std::nullopt;
        det *= pivot;
        double root = std::sqrt(pivot);
        m[k][k] = root;
        for (int i = k + 1; i < kDim; ++i) {
            double v = m[i][k];
            for (int r = 0; r < k; ++r) v -= m[i][r] * m[k][r];
            m[i][k] = v / root;
        }
    }
    return det;
}

struct ChartParseState {
    bool box_set = false;
    std::array<std::array<bool, 2>, kDim> face_set{};
    std::array<bool, kDim> periodic_set{};
};

class SceneParser {
public:
    SceneParser(const std::string& text, const std::string& name) : text_(text) {
        scene_.name = name;
    }

    Scene run() {
        std::istringstream in(text_);
        std::string raw;
        while (std::getline(in, raw)) {
            ++line_no_;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            std::string line = trim(raw);
            if (line.empty() || line[0] == '#') continue;
            parse_line(line);
        }
        finish_chart();
        return scene_;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw input_error("scene line " + std::to_string(line_no_) + ": " + what);
    }

    Chart& chart() {
        if (scene_.charts.empty()) fail("directive outside any [chart] block");
        return scene_.charts.back();
    }

    void finish_chart() {
        if (scene_.charts.empty()) return;
        if (!state_.box_set) fail("chart '" + scene_.charts.back().name + "' has no box");
        for (int k = 0; k < 10; ++k) {
            if (!scene_.charts.back().metric_given[k])
                scene_.charts.back().metric[k] = Expression::constant(0.0);
        }
    }

    double parse_constant(const std::string& text, const char* what) {
        Expression e;
        try {
            e = Expression::parse(text);
        } catch (const input_error& err) {
            fail(std::string(what) + ": " + err.what());
        }
        if (e.max_var() > 0) fail(std::string(what) + " must be constant");
        return e.eval(std::span<const double>{});
    }

    // "x3=hi" -> (2, kHi)
    std::pair<int, Side> parse_face_ref(const std::string& token) {
        std::string t = trim(token);
        if (t.size() < 4 || t[0] != 'x' || t[1] < '1' || t[1] > '4' || t[2] != '=')
            fail("expected a face reference like x3=hi");
        std::string side = trim(t.substr(3));
        if (side != "lo" && side != "hi") fail("face side must be 'lo' or 'hi'");
        return {t[1] - '1', side == "lo" ? Side::kLo : Side::kHi};
    }

    void set_role(int axis, Side side, FaceRole role) {
        Chart& ch = chart();
        int s = static_cast<int>(side);
        if (state_.face_set[axis][s])
            fail("face x" + std::to_string(axis + 1) + " already has a role");
        state_.face_set[axis][s] = true;
        ch.face[axis][s] = role;
    }

    void parse_line(const std::string& line) {
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated chart header");
            std::istringstream hdr(line.substr(1, line.size() - 2));
            std::string kw, name, extra;
            hdr >> kw >> name;
            if (kw != "chart" || name.empty() || (hdr >> extra))
                fail("chart header must be [chart <name>]");
            finish_chart();
            state_ = ChartParseState{};
            Chart ch;
            ch.name = name;
            scene_.charts.push_back(std::move(ch));
            return;
        }

        if (line.rfind("periodic", 0) == 0 &&
            (line.size() == 8 || std::isspace(static_cast<unsigned char>(line[8])))) {
            std::string t = trim(line.substr(8));
            if (t.size() != 2 || t[0] != 'x' || t[1] < '1' || t[1] > '4')
                fail("expected an axis like x2 after 'periodic'");
            int axis = t[1] - '1';
            if (state_.periodic_set[axis]) fail("axis x" + t.substr(1) + " already periodic");
            state_.periodic_set[axis] = true;
            chart().periodic[axis] = true;
            return;
        }

        if (line.rfind("singular", 0) == 0 &&
            (line.size() == 8 || std::isspace(static_cast<unsigned char>(line[8])))) {
            auto [axis, side] = parse_face_ref(line.substr(8));
            set_role(axis, side, FaceRole::kSingular);
            return;
        }

        if (line.rfind("face", 0) == 0 &&
            (line.size() == 4 || std::isspace(static_cast<unsigned char>(line[4])))) {
            std::size_t colon = line.find(':');
            if (colon == std::string::npos) fail("face directive needs ': <role>'");
            auto [axis, side] = parse_face_ref(line.substr(4, colon - 4));
            std::string role = trim(line.substr(colon + 1));
            if (role == "M") set_role(axis, side, FaceRole::kM);
            else if (role == "N") set_role(axis, side, FaceRole::kN);
            else if (role == "glue") set_role(axis, side, FaceRole::kGlue);
            else fail("unknown face role '" + role + "'");
            return;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail("unrecognized directive");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.empty()) fail("missing value after '='");

        if (key == "chi") {
            if (scene_.chi) fail("duplicate chi");
            double v = parse_constant(value, "chi");
            int chi = static_cast<int>(std::lround(v));
            if (std::abs(v - chi) > 1e-12) fail("chi must be an integer");
            scene_.chi = chi;
            return;
        }
        if (key == "omega") {
            Expression* slot = scene_.charts.empty() ? &scene_.omega : &chart().omega;
            if (!slot->empty()) fail("duplicate omega");
            try {
                *slot = Expression::parse(value);
            } catch (const input_error& err) {
                fail(std::string("omega: ") + err.what());
            }
            return;
        }
        if (key == "box") {
            Chart& ch = chart();
            if (state_.box_set) fail("duplicate box");
            parse_box(value, ch);
            state_.box_set = true;
            return;
        }
        if (key.size() == 4 && key.rfind("g_", 0) == 0 &&
            key[2] >= '1' && key[2] <= '4' && key[3] >= '1' && key[3] <= '4') {
            Chart& ch = chart();
            int k = sym_index(key[2] - '1', key[3] - '1');
            if (ch.metric_given[k]) fail("duplicate metric component " + key);
            try {
                ch.metric[k] = Expression::parse(value);
            } catch (const input_error& err) {
                fail(key + ": " + err.what());
            }
            ch.metric_given[k] = true;
            return;
        }
        fail("unrecognized directive '" + key + "'");
    }

    void parse_box(const std::string& value, Chart& ch) {
        std::size_t pos = 0;
        auto skip_space = [&] {
            while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
        };
        for (int axis = 0; axis < kDim; ++axis) {
            skip_space();
            if (axis > 0) {
                if (pos >= value.size() || value[pos] != 'x') fail("box intervals must be joined by 'x'");
                ++pos;
                skip_space();
            }
            if (pos >= value.size() || value[pos] != '[') fail("expected '[' in box");
            ++pos;
            std::size_t comma = value.find(',', pos);
            if (comma == std::string::npos) fail("expected ',' in box interval");
            std::size_t close = value.find(']', comma);
            if (close == std::string::npos) fail("expected ']' in box interval");
            ch.lo[axis] = parse_constant(value.substr(pos, comma - pos), "box bound");
            ch.hi[axis] = parse_constant(value.substr(comma + 1, close - comma - 1), "box bound");
            pos = close + 1;
        }
        skip_space();
        if (pos != value.size()) fail("trailing input after box");
    }

    const std::string& text_;
    Scene scene_;
    ChartParseState state_;
    int line_no_ = 0;
};

} // namespace

const char* face_role_name(FaceRole role) {
    switch (role) {
        case FaceRole::kGlue: return "glue";
        case FaceRole::kM: return "M";
        case FaceRole::kN: return "N";
        case FaceRole::kSingular: return "singular";
    }
    return "?";
}

int sym_index(int i, int j) {
    if (i > j) std::swap(i, j);
    static constexpr int row_offset[kDim] = {0, 4, 7, 9};
    return row_offset[i] + (j - i);
}

Scene parse_scene(const std::string& text, const std::string& name) {
    return SceneParser(text, name).run();
}

void validate_scene(const Scene& scene) {
    if (scene.charts.empty())
        throw input_error("scene '" + scene.name + "' has no charts");
    for (std::size_t a = 0; a < scene.charts.size(); ++a) {
        for (std::size_t b = a + 1; b < scene.charts.size(); ++b) {
            if (scene.charts[a].name == scene.charts[b].name)
                throw input_error("duplicate chart name '" + scene.charts[a].name + "'");
        }
    }
    for (const Chart& ch : scene.charts) {
        std::string where = "chart '" + ch.name + "': ";
        for (int axis = 0; axis < kDim; ++axis) {
            if (!(ch.lo[axis] < ch.hi[axis]))
                throw input_error(where + "box interval on x" + std::to_string(axis + 1) +
                                  " must have lo < hi");
        }
        for (int i = 0; i < kDim; ++i) {
            if (!ch.metric_given[sym_index(i, i)])
                throw input_error(where + "missing metric component g_" +
                                  std::to_string(i + 1) + std::to_string(i + 1));
        }
        for (int axis = 0; axis < kDim; ++axis) {
            if (!ch.periodic[axis]) continue;
            for (int s = 0; s < 2; ++s) {
                if (ch.face[axis][s] != FaceRole::kGlue)
                    throw input_error(where + "periodic axis x" + std::to_string(axis + 1) +
                                      " cannot carry face roles");
            }
        }
        for (int a = 0; a < kDim; ++a) {
            for (int b = a + 1; b < kDim; ++b) {
                for (int sa = 0; sa < 2; ++sa) {
                    for (int sb = 0; sb < 2; ++sb) {
                        FaceRole ra = ch.face[a][sa], rb = ch.face[b][sb];
                        bool labeled_a = ra == FaceRole::kM || ra == FaceRole::kN;
                        bool labeled_b = rb == FaceRole::kM || rb == FaceRole::kN;
                        if (labeled_a && labeled_b && ra == rb)
                            throw input_error(where + "two " + face_role_name(ra) +
                                              " faces meet at a corner");
                    }
                }
            }
        }

        // Positive definiteness at the box center and toward each corner.
        std::vector<double> dscratch;
        std::array<double, kDim> x;
        for (int sample = 0; sample <= (1 << kDim); ++sample) {
            for (int axis = 0; axis < kDim; ++axis) {
                double mid = 0.5 * (ch.lo[axis] + ch.hi[axis]);
                if (sample == (1 << kDim)) {
                    x[axis] = mid;
                } else {
                    double corner = (sample >> axis) & 1 ? ch.hi[axis] : ch.lo[axis];
                    x[axis] = mid + 0.731 * (corner - mid);
                }
            }
            std::array<double, 10> g;
            for (int k = 0; k < 10; ++k) g[k] = ch.metric[k].eval(x, dscratch);
            if (!spd_det(g))
                throw input_error(where + "metric is not positive definite at (" +
                                  format_number(x[0]) + ", " + format_number(x[1]) + ", " +
                                  format_number(x[2]) + ", " + format_number(x[3]) + ")");
        }
    }
}

Scene load_scene_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open scene file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    Scene scene = parse_scene(buf.str(), path);
    validate_scene(scene);
    return scene;
}

std::string print_scene(const Scene& scene) {
    std::ostringstream out;
    if (scene.chi) out << "chi = " << *scene.chi << "\n";
    if (!scene.omega.empty()) out << "omega = " << scene.omega.text() << "\n";
    for (const Chart& ch : scene.charts) {
        out << "[chart " << ch.name << "]\n";
        out << "box = ";
        for (int axis = 0; axis < kDim; ++axis) {
            if (axis > 0) out << " x ";
            out << "[" << format_number(ch.lo[axis]) << ", " << format_number(ch.hi[axis]) << "]";
        }
        out << "\n";
        for (int i = 0; i < kDim; ++i) {
            for (int j = i; j < kDim; ++j) {
                int k = sym_index(i, j);
                if (!ch.metric_given[k]) continue;
                out << "g_" << (i + 1) << (j + 1) << " = " << ch.metric[k].text() << "\n";
            }
        }
        if (!ch.omega.empty()) out << "omega = " << ch.omega.text() << "\n";
        for (int axis = 0; axis < kDim; ++axis) {
            if (ch.periodic[axis]) out << "periodic x" << (axis + 1) << "\n";
        }
        for (int axis = 0; axis < kDim; ++axis) {
            for (int s = 0; s < 2; ++s) {
                FaceRole role = ch.face[axis][s];
                if (role == FaceRole::kGlue) continue;
                const char* side = s == 0 ? "lo" : "hi";
                if (role == FaceRole::kSingular) {
                    out << "singular x" << (axis + 1) << "=" << side << "\n";
                } else {
                    out << "face x" << (axis + 1) << "=" << side << " : "
                        << face_role_name(role) << "\n";
                }
            }
        }
    }
    return out.str();
}

std::vector<FaceId> labeled_faces(const Scene& scene, FaceRole role) {
    std::vector<FaceId> faces;
    for (int c = 0; c < static_cast<int>(scene.charts.size()); ++c) {
        for (int axis = 0; axis < kDim; ++axis) {
            for (int s = 0; s < 2; ++s) {
                if (scene.charts[c].face[axis][s] == role)
                    faces.push_back({c, axis, static_cast<Side>(s)});
            }
        }
    }
    return faces;
}

std::vector<CornerId> labeled_corners(const Scene& scene) {
    std::vector<CornerId> corners;
    for (int c = 0; c < static_cast<int>(scene.charts.size()); ++c) {
        const Chart& ch = scene.charts[c];
        for (int a = 0; a < kDim; ++a) {
            for (int b = a + 1; b < kDim; ++b) {
                for (int sa = 0; sa < 2; ++sa) {
                    for (int sb = 0; sb < 2; ++sb) {
                        FaceRole ra = ch.face[a][sa], rb = ch.face[b][sb];
                        if (ra == FaceRole::kM && rb == FaceRole::kN) {
                            corners.push_back({c, a, static_cast<Side>(sa),
                                               b, static_cast<Side>(sb)});
                        } else if (ra == FaceRole::kN && rb == FaceRole::kM) {
                            corners.push_back({c, b, static_cast<Side>(sb),
                                               a, static_cast<Side>(sa)});
                        }
                    }
                }
            }
        }
    }
    return corners;
}

ChartEvaluator::ChartEvaluator(const Scene& scene, int chart_index, int degree)
    : chart_(&scene.charts.at(chart_index)), omega_(&scene.omega), degree_(degree) {
    if (!chart_->omega.empty()) omega_ = &chart_->omega;
    for (int axis = 0; axis < kDim; ++axis)
        coords_[axis] = Jet::variable(axis, 0.0, kDim, degree);
}

void ChartEvaluator::coordinate_jets(std::span<const double> x) {
    if (static_cast<int>(x.size()) != kDim)
        throw input_error("chart points must have 4 coordinates");
    for (int axis = 0; axis < kDim; ++axis) coords_[axis][0] = x[axis];
}

void ChartEvaluator::metric_jets(std::span<const double> x, std::span<Jet> out10) {
    if (out10.size() != 10) throw input_error("metric_jets needs 10 output slots");
    coordinate_jets(x);
    std::span<const Jet> coords(coords_.data(), kDim);
    for (int k = 0; k < 10; ++k) out10[k] = chart_->metric[k].eval(coords, jet_scratch_);
    if (conformal()) {
        Jet factor = exp(2.0 * omega_->eval(coords, jet_scratch_));
        for (int k = 0; k < 10; ++k) out10[k] = factor * out10[k];
    }
}

double ChartEvaluator::volume_density(std::span<const double> x) {
    std::array<double, 10> g;
    for (int k = 0; k < 10; ++k) g[k] = chart_->metric[k].eval(x, val_scratch_);
    auto det = spd_det(g);
    if (!det)
        throw numerical_error("metric is not positive definite at a quadrature node");
    double density = std::sqrt(*det);
    if (conformal()) density *= std::exp(4.0 * omega_->eval(x, val_scratch_));
    return density;
}

Jet ChartEvaluator::omega_jet(std::span<const double> x) {
    coordinate_jets(x);
    if (omega_->empty()) return Jet::constant(0.0, kDim, degree_);
    return omega_->eval(std::span<const Jet>(coords_.data(), kDim), jet_scratch_);
}

double ChartEvaluator::omega_value(std::span<const double> x) {
    if (omega_->empty()) return 0.0;
    return omega_->eval(x, val_scratch_);
}

} // namespace cgb
