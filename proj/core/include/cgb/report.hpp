#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cgb {

/// Max/mean of an absolute residual over a deterministic sample set.
struct ResidualStat {
    std::string name;
    double max = 0.0;
    double mean = 0.0;
    int samples = 0;
};

/// Everything one verification run produces. Both assembly routes are kept
/// per piece: path A is the curvature decomposition (interior energy,
/// third-order face terms, angle terms), path B integrates the raw measure
/// densities, rescaled to the same normalization. The defects are absolute,
/// |total - target|, taken before any formatting.
struct Report {
    std::string scene;
    int chi = 0;
    int quad_order = 0;
    int theta_order = 0;
    std::uint64_t seed = 0;
    int samples_per_stratum = 0;

    double target = 0.0; // 4 pi^2 chi

    double interior_a = 0.0, boundary_m_a = 0.0, boundary_n_a = 0.0, corner_a = 0.0;
    double interior_b = 0.0, boundary_m_b = 0.0, boundary_n_b = 0.0, corner_b = 0.0;
    double total_a = 0.0, total_b = 0.0;
    double defect_a = 0.0, defect_b = 0.0;

    /// total_a - total_b, signed; the two routes discretize different
    /// integrands, so this gap is a live diagnostic, not a tautology.
    double path_gap = 0.0;
    /// Half-order rerun difference plus a round-off floor; the gap is graded
    /// against ten times this.
    double quad_error_estimate = 0.0;
    bool gap_within_bound = false;

    std::vector<ResidualStat> identities;
    std::vector<ResidualStat> laws;
    double elapsed_seconds = 0.0;
};

/// Residuals of the conformal transformation laws, pipeline-vs-pipeline:
/// every quantity is computed once for the scene metric and once with the
/// exponent added, then compared through the exact transformation rule.
struct LawSuite {
    std::string scene;
    std::string omega;
    std::uint64_t seed = 0;
    int samples_per_stratum = 0;
    std::vector<ResidualStat> laws;
    double elapsed_seconds = 0.0;
};

struct SweepRow {
    int order = 0;
    double total_a = 0.0, defect_a = 0.0;
    double total_b = 0.0, defect_b = 0.0;
    double elapsed_seconds = 0.0;
};

/// Totals and defects across a list of quadrature orders.
struct SweepTable {
    std::string scene;
    double target = 0.0;
    std::vector<SweepRow> rows;
    /// False when a defect grows from one order to the next by more than the
    /// round-off floor.
    bool monotone = true;
};

/// Human-readable rendering. Doubles are printed with %.17g so the text is
/// lossless; with include_timings off the output is byte-identical across
/// runs with the same inputs, seeds, and orders.
std::string format_text(const Report& report, bool include_timings = true);
std::string format_text(const LawSuite& suite, bool include_timings = true);
std::string format_text(const SweepTable& table, bool include_timings = true);

/// Structured rendering with fields named exactly as in the structs above.
std::string format_json(const Report& report, bool include_timings = true);
std::string format_json(const LawSuite& suite, bool include_timings = true);
std::string format_json(const SweepTable& table, bool include_timings = true);

} // namespace cgb
