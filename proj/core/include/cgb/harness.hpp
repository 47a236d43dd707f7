#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cgb/expression.hpp"
#include "cgb/report.hpp"
#include "cgb/scene.hpp"

namespace cgb {

struct VerifyOptions {
    int quad_order = 16;
    int theta_order = 32;
    /// Pointwise identity samples per stratum folded into the report;
    /// 0 skips the suite.
    int residual_samples = 10;
    std::uint64_t seed = 1;
    /// Rerun the integrals at half order to estimate the quadrature error.
    /// When off, the estimate falls back to the round-off floor.
    bool error_estimate = true;
};

/// Integrates both decompositions of the total curvature over every stratum
/// and grades them against 4 pi^2 chi. The scene must declare chi; topology
/// is trusted input, never inferred. Throws input_error on a malformed
/// request and numerical_error when a node evaluation degenerates.
Report verify_gauss_bonnet(const Scene& scene, const VerifyOptions& options = {});

/// Deterministic sample plan for the pointwise suites. Points are drawn from
/// a seeded generator, one derived stream per stratum, and land in the inner
/// band of each free coordinate so coordinate degeneracies on the box walls
/// stay out of the sample set.
struct SampleSpec {
    int samples_per_stratum = 100;
    std::uint64_t seed = 1;
};

/// Pointwise agreement of independently computed densities: the interior
/// measure density against the curvature decomposition, the face density
/// against its third-order form, and the corner density closed form against
/// both the angle quadrature and the assembled integrand.
std::vector<ResidualStat> identity_residuals(const Scene& scene, const SampleSpec& spec = {},
                                             int theta_order = 32);

/// Runs the full pipeline on the scene metric and on the metric with omega
/// added to the conformal exponent, then checks every transformation law
/// pointwise: weight laws for the invariant quantities, operator corrections
/// for the third-order and angle terms, covariance of the operators on a
/// fixed test field, and invariance of the corner angle. Chart-local and
/// pointwise; omega only has to be smooth on the sampled charts.
LawSuite conformal_law_check(const Scene& scene, const Expression& omega,
                             const SampleSpec& spec = {});

/// Verification totals across increasing quadrature orders; flags defect
/// growth beyond round-off. Orders must be strictly increasing.
SweepTable convergence_sweep(const Scene& scene, std::span<const int> orders,
                             const VerifyOptions& base = {});

} // namespace cgb
