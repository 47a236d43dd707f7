#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "cgb/curvature.hpp"
#include "cgb/jet.hpp"

namespace {

cgb::Jet random_jet(std::mt19937_64& gen, int n, int degree) {
    cgb::Jet j = cgb::Jet::constant(0.0, n, degree);
    for (int i = 0; i < j.size(); ++i)
        j[i] = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
    j[0] += 1.5;
    return j;
}

std::vector<cgb::Jet> random_metric(std::mt19937_64& gen, int n, int degree) {
    std::vector<cgb::Jet> g;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            cgb::Jet e = random_jet(gen, n, degree);
            e *= 0.05;
            e[0] = i == j ? 1.0 + 0.1 * e[0] : 0.05 * e[0];
            g.push_back(e);
        }
    }
    return g;
}

void BM_jet_multiply(benchmark::State& state) {
    std::mt19937_64 gen(1);
    int degree = static_cast<int>(state.range(0));
    cgb::Jet a = random_jet(gen, 4, degree);
    cgb::Jet b = random_jet(gen, 4, degree);
    for (auto _ : state) {
        cgb::Jet c = a * b;
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(BM_jet_multiply)->Arg(2)->Arg(3)->Arg(4);

void BM_jet_exp(benchmark::State& state) {
    std::mt19937_64 gen(2);
    cgb::Jet a = random_jet(gen, 4, 4);
    for (auto _ : state) {
        cgb::Jet c = exp(a);
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(BM_jet_exp);

void BM_metric_geometry(benchmark::State& state) {
    std::mt19937_64 gen(3);
    int n = static_cast<int>(state.range(0));
    auto g = random_metric(gen, n, 4);
    cgb::MetricGeometry geo(n);
    for (auto _ : state) {
        geo.compute(g);
        benchmark::DoNotOptimize(geo.scalar_value());
    }
}
BENCHMARK(BM_metric_geometry)->Arg(2)->Arg(3)->Arg(4);

void BM_interior_quantities(benchmark::State& state) {
    std::mt19937_64 gen(4);
    auto g = random_metric(gen, 4, 4);
    cgb::MetricGeometry geo(4);
    geo.compute(g);
    for (auto _ : state) {
        cgb::InteriorQuantities q = cgb::interior_quantities(geo);
        benchmark::DoNotOptimize(q.integrand);
    }
}
BENCHMARK(BM_interior_quantities);

} // namespace

BENCHMARK_MAIN();
