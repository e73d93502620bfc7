#include <benchmark/benchmark.h>

#include <cmath>

#include "geomlaw/delaunay.hpp"
#include "geomlaw/density.hpp"
#include "geomlaw/functionals.hpp"
#include "geomlaw/graph_builders.hpp"
#include "geomlaw/point_process.hpp"

namespace {

using namespace geomlaw;

PointSet plane_cloud(std::size_t n) {
    return sample_binomial(DensitySpec::uniform_box(Window::box({0.0, 0.0}, {1.0, 1.0})), n,
                           0x9a5ull);
}

void BM_DelaunayVoronoi(benchmark::State& state) {
    const PointSet pts = plane_cloud(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        VoronoiDiagram vd = delaunay_voronoi_2d(pts, Window::box({0.0, 0.0}, {1.0, 1.0}));
        benchmark::DoNotOptimize(vd);
    }
}

void BM_MstGraph(benchmark::State& state) {
    const PointSet pts = plane_cloud(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        GeoGraph g = mst_graph(pts);
        benchmark::DoNotOptimize(g);
    }
}

void BM_KnnGraph(benchmark::State& state) {
    const PointSet pts = plane_cloud(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        GeoGraph g = knn_graph(pts, 4, false);
        benchmark::DoNotOptimize(g);
    }
}

void BM_GabrielGraph(benchmark::State& state) {
    const PointSet pts = plane_cloud(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        GeoGraph g = gabriel_graph(pts);
        benchmark::DoNotOptimize(g);
    }
}

void BM_WeightedLength(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const GeoGraph g = mst_graph(plane_cloud(n));
    const WeightFn phi = WeightFn::power(1.0);
    const double scale = std::sqrt(static_cast<double>(n));
    for (auto _ : state) {
        double v = weighted_length(g, phi, scale);
        benchmark::DoNotOptimize(v);
    }
}

BENCHMARK(BM_DelaunayVoronoi)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_MstGraph)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_KnnGraph)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_GabrielGraph)->Arg(1000)->Arg(10000);
BENCHMARK(BM_WeightedLength)->Arg(10000)->Arg(100000);

}  // namespace
