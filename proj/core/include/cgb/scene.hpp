#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cgb/expression.hpp"
#include "cgb/jet.hpp"

namespace cgb {

inline constexpr int kDim = 4;

enum class Side : int { kLo = 0, kHi = 1 };

/// How a box face participates in the geometry. Glue faces are interior
/// seams between charts and carry no boundary terms; singular faces are
/// coordinate degeneracies (polar centers, axis sets) where the chart metric
/// collapses but the underlying manifold is smooth.
enum class FaceRole : std::uint8_t { kGlue, kM, kN, kSingular };

const char* face_role_name(FaceRole role);

/// Index of the symmetric 4x4 component (i, j), 0-based, in the packed
/// upper-triangular order 11, 12, 13, 14, 22, 23, 24, 33, 34, 44.
int sym_index(int i, int j);

struct Chart {
    std::string name;
    std::array<double, kDim> lo{}, hi{};
    std::array<Expression, 10> metric;   // packed symmetric components
    std::array<bool, 10> metric_given{}; // which components the source supplied
    std::array<bool, kDim> periodic{};
    std::array<std::array<FaceRole, 2>, kDim> face{}; // [axis][side]
    Expression omega; // per-chart override of the scene-level conformal exponent

    FaceRole face_role(int axis, Side side) const {
        return face[axis][static_cast<int>(side)];
    }
    double side_coordinate(int axis, Side side) const {
        return side == Side::kLo ? lo[axis] : hi[axis];
    }
};

struct Scene {
    std::vector<Chart> charts;
    std::optional<int> chi;
    Expression omega; // conformal exponent; empty means the metric is used as written
    std::string name;
};

struct FaceId {
    int chart;
    int axis;
    Side side;
};

struct CornerId {
    int chart;
    FaceId m_face() const { return {chart, axis_m, side_m}; }
    FaceId n_face() const { return {chart, axis_n, side_n}; }
    int axis_m;
    Side side_m;
    int axis_n;
    Side side_n;
};

/// Syntax only; throws input_error with a line number on malformed input.
Scene parse_scene(const std::string& text, const std::string& name = "<memory>");
/// Semantic checks: required metric components, role consistency, no
/// same-label corners, positive definiteness at interior sample points.
void validate_scene(const Scene& scene);
Scene load_scene_file(const std::string& path);
/// Canonical text form; parses back to an equivalent scene.
std::string print_scene(const Scene& scene);

/// Faces of the given label across all charts.
std::vector<FaceId> labeled_faces(const Scene& scene, FaceRole role);
/// All corners where an M face meets an N face within a chart.
std::vector<CornerId> labeled_corners(const Scene& scene);

/// Evaluates chart metric components as jets or doubles at interior points,
/// applying the scene's conformal factor e^{2 omega} when present. Holds
/// scratch buffers so per-node evaluation does not allocate.
class ChartEvaluator {
public:
    ChartEvaluator(const Scene& scene, int chart_index, int degree);

    const Chart& chart() const { return *chart_; }
    int degree() const { return degree_; }
    bool conformal() const { return !omega_->empty(); }

    /// Packed symmetric metric jets at x, in 4 variables at the held degree.
    void metric_jets(std::span<const double> x, std::span<Jet> out10);
    /// sqrt(det g) at x from plain double evaluation.
    double volume_density(std::span<const double> x);
    /// Conformal exponent omega at x as a jet; zero jet when absent.
    Jet omega_jet(std::span<const double> x);
    double omega_value(std::span<const double> x);

private:
    void coordinate_jets(std::span<const double> x);

    const Chart* chart_;
    const Expression* omega_;
    int degree_;
    std::array<Jet, kDim> coords_;
    std::vector<Jet> jet_scratch_;
    std::vector<double> val_scratch_;
};

} // namespace cgb
