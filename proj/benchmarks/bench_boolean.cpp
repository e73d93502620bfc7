#include <benchmark/benchmark.h>

#include "geomlaw/boolean_model.hpp"
#include "geomlaw/density.hpp"
#include "geomlaw/packing_online.hpp"
#include "geomlaw/point_process.hpp"

namespace {

using namespace geomlaw;

MarkedPointSet disk_input(std::size_t n) {
    PointSet pts = sample_binomial(
        DensitySpec::uniform_box(Window::box({0.0, 0.0}, {1.0, 1.0})), n, 0xd15c5ull);
    return attach_radius_marks(std::move(pts), RadiusDist::constant(0.25), 7);
}

void BM_BuildScene(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const MarkedPointSet marked = disk_input(n);
    for (auto _ : state) {
        BooleanScene scene = build_scene(marked, n);
        benchmark::DoNotOptimize(scene);
    }
}

void BM_ClumpCounts(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const BooleanScene scene = build_scene(disk_input(n), n);
    for (auto _ : state) {
        ClumpCounts counts = clump_counts(scene);
        benchmark::DoNotOptimize(counts);
    }
}

void BM_SceneVolumeExact(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const BooleanScene scene = build_scene(disk_input(n), n);
    for (auto _ : state) {
        VolumeEstimate est = scene_volume_exact2d(scene);
        benchmark::DoNotOptimize(est);
    }
}

void BM_RsaPack(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    PointSet pts = sample_binomial(
        DensitySpec::uniform_box(Window::box({0.0}, {1.0})), n, 0xa2215ull);
    const MarkedPointSet marked = attach_arrival_marks(std::move(pts), 11);
    for (auto _ : state) {
        RsaResult packed = rsa_pack(marked, n);
        benchmark::DoNotOptimize(packed);
    }
}

BENCHMARK(BM_BuildScene)->Arg(1000)->Arg(10000);
BENCHMARK(BM_ClumpCounts)->Arg(1000)->Arg(10000);
BENCHMARK(BM_SceneVolumeExact)->Arg(1000)->Arg(4000);
BENCHMARK(BM_RsaPack)->Arg(10000)->Arg(100000);

}  // namespace
