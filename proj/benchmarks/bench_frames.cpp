#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "cgb/boundary.hpp"
#include "cgb/catalog.hpp"
#include "cgb/corner.hpp"
#include "cgb/harness.hpp"
#include "cgb/jet.hpp"
#include "cgb/scene.hpp"

namespace {

cgb::Jet random_entry(std::mt19937_64& gen, int n, int degree) {
    cgb::Jet j = cgb::Jet::constant(0.0, n, degree);
    for (int i = 0; i < j.size(); ++i)
        j[i] = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
    return j;
}

std::vector<cgb::Jet> random_metric(std::mt19937_64& gen, int n, int degree) {
    std::vector<cgb::Jet> g;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            cgb::Jet e = random_entry(gen, n, degree);
            e *= 0.05;
            e[0] = i == j ? 1.0 + 0.1 * e[0] : 0.05 * e[0];
            g.push_back(e);
        }
    }
    return g;
}

void BM_boundary_frame(benchmark::State& state) {
    std::mt19937_64 gen(5);
    auto g = random_metric(gen, 4, 4);
    for (auto _ : state) {
        cgb::BoundaryFrame frame(g, 0, cgb::Side::kHi);
        benchmark::DoNotOptimize(cgb::aw_boundary_density(frame));
    }
}
BENCHMARK(BM_boundary_frame);

void BM_corner_frame_closed(benchmark::State& state) {
    std::mt19937_64 gen(6);
    auto g = random_metric(gen, 4, 4);
    for (auto _ : state) {
        cgb::CornerFrame frame(g, 0, cgb::Side::kHi, 1, cgb::Side::kLo);
        benchmark::DoNotOptimize(cgb::aw_corner_density(frame));
    }
}
BENCHMARK(BM_corner_frame_closed);

void BM_corner_frame_quadrature(benchmark::State& state) {
    std::mt19937_64 gen(7);
    auto g = random_metric(gen, 4, 4);
    int order = static_cast<int>(state.range(0));
    for (auto _ : state) {
        cgb::CornerFrame frame(g, 0, cgb::Side::kHi, 1, cgb::Side::kLo);
        benchmark::DoNotOptimize(
            cgb::aw_corner_density(frame, cgb::CornerRule::kQuadrature, order));
    }
}
BENCHMARK(BM_corner_frame_quadrature)->Arg(8)->Arg(32);

void BM_verify_scene(benchmark::State& state) {
    cgb::Scene scene = state.range(0) == 0 ? cgb::flat_bidisk().scene : cgb::hemiball().scene;
    cgb::VerifyOptions options;
    options.quad_order = static_cast<int>(state.range(1));
    options.residual_samples = 0;
    options.error_estimate = false;
    for (auto _ : state) {
        cgb::Report r = cgb::verify_gauss_bonnet(scene, options);
        benchmark::DoNotOptimize(r.defect_a);
    }
}
BENCHMARK(BM_verify_scene)
    ->Args({0, 4})
    ->Args({0, 8})
    ->Args({1, 4})
    ->Args({1, 8})
    ->Unit(benchmark::kMillisecond);

} // namespace
