#include <benchmark/benchmark.h>

#include <cmath>

#include "geomlaw/density.hpp"
#include "geomlaw/point_process.hpp"
#include "geomlaw/spatial_index.hpp"

namespace {

using namespace geomlaw;

PointSet cloud(std::size_t n, int dim) {
    std::vector<double> lo(static_cast<std::size_t>(dim), 0.0);
    std::vector<double> hi(static_cast<std::size_t>(dim), 1.0);
    return sample_binomial(DensitySpec::uniform_box(Window::box(lo, hi)), n, 0xbe5c01dull);
}

void BM_SampleUniform(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const DensitySpec density = DensitySpec::uniform_box(Window::box({0.0, 0.0}, {1.0, 1.0}));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        PointSet pts = sample_binomial(density, n, seed++);
        benchmark::DoNotOptimize(pts);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}

void BM_IndexBuild(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const PointSet pts = cloud(n, 2);
    for (auto _ : state) {
        SpatialIndex index(pts);
        benchmark::DoNotOptimize(index);
    }
}

void BM_KNearest(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto k = static_cast<std::size_t>(state.range(1));
    const SpatialIndex index(cloud(n, 2));
    std::size_t q = 0;
    for (auto _ : state) {
        auto nb = index.k_nearest_of(q, k);
        benchmark::DoNotOptimize(nb);
        q = (q + 1) % n;
    }
}

void BM_RangeQuery(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const SpatialIndex index(cloud(n, 2));
    // radius chosen so a query returns a handful of points on average
    const double radius = 2.0 / std::sqrt(static_cast<double>(n));
    std::size_t q = 0;
    for (auto _ : state) {
        auto hits = index.range(index.points()[q], radius);
        benchmark::DoNotOptimize(hits);
        q = (q + 1) % n;
    }
}

BENCHMARK(BM_SampleUniform)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_IndexBuild)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_KNearest)->Args({10000, 1})->Args({10000, 8})->Args({100000, 8});
BENCHMARK(BM_RangeQuery)->Arg(10000)->Arg(100000);

}  // namespace
