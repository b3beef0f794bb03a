// Serial reference path against the OpenMP kernels.

#include "cvembem/harness/harness.hpp"

#include <benchmark/benchmark.h>

using namespace cvembem;

namespace {

const bem::Partition& ellipse_partition(int cells)
{
    static std::map<int, bem::Partition> cache;
    auto it = cache.find(cells);
    if (it == cache.end()) {
        const auto mesh = geometry::build_ring_mesh(geometry::make_circle(1.0), geometry::make_ellipse(50.0, 15.0), 2, cells, 0);
        it = cache.emplace(cells, geometry::extract_boundary_partition(mesh, geometry::BoundaryTag::Outer)).first;
    }
    return it->second;
}

Execution mode(const benchmark::State& state) { return state.range(1) ? Execution::Parallel : Execution::Serial; }

void single_layer(benchmark::State& state)
{
    const auto space = bem::make_bem_space(ellipse_partition(static_cast<int>(state.range(0))), 3);
    for (auto _ : state) benchmark::DoNotOptimize(bem::assemble_V_hat(space, {}, mode(state)));
}

void double_layer(benchmark::State& state)
{
    const auto& part = ellipse_partition(static_cast<int>(state.range(0)));
    const auto space = bem::make_bem_space(part, 3);
    const auto trace = bem::make_trace_space(part, 3);
    for (auto _ : state) benchmark::DoNotOptimize(bem::assemble_K_hat(space, trace, {}, mode(state)));
}

void global_system(benchmark::State& state)
{
    harness::RunConfig config;
    auto mesh = std::make_shared<const geometry::CurvedMesh>(harness::build_mesh(config, static_cast<int>(state.range(0))));
    solver::AssemblyOptions options;
    options.exec = mode(state);
    const auto f = [](const Point&) { return 0.0; };
    for (auto _ : state) benchmark::DoNotOptimize(solver::assemble_global(mesh, 3, 3, f, options));
}

} // namespace

BENCHMARK(single_layer)->ArgNames({"cells", "parallel"})->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(double_layer)->ArgNames({"cells", "parallel"})->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(global_system)->ArgNames({"level", "parallel"})->ArgsProduct({{1, 2}, {0, 1}})->Unit(benchmark::kMillisecond);

int main(int argc, char** argv)
{
    cvembem::configure_threads();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
