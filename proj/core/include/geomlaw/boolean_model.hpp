#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "geomlaw/geo_graph.hpp"
#include "geomlaw/point_process.hpp"
#include "geomlaw/point_set.hpp"

namespace geomlaw {

// Union-of-balls scene: each marked point carries a ball whose radius mark is
// shrunk by n_scale^{-1/d}. Overlap is closed: tangent balls intersect.
struct BooleanScene {
    PointSet centers;
    std::vector<double> radii;  // shrunk radii, one per center
    double scale = 1.0;         // the applied shrink factor n_scale^{-1/d}
    GeoGraph intersection_graph;         // edge iff |c_i - c_j| <= r_i + r_j
    std::vector<std::uint32_t> clump_id;  // connected component per ball
    std::size_t clump_count = 0;
};

struct ClumpCounts {
    std::size_t total = 0;                       // number of clumps U
    std::map<std::size_t, std::size_t> by_order;  // order k -> count U_k
};

struct VolumeEstimate {
    double value = 0.0;
    double stderr_ = 0.0;  // zero for the deterministic route
};

struct EulerResult {
    long long chi = 0;  // Euler characteristic of the union
    double total_curvature = 0.0;  // 2*pi*chi for unions of disks
};

struct PackingResult {
    std::vector<std::uint8_t> selected;  // 1 iff the ball is kept
    std::size_t count = 0;               // number selected
    bool exact = true;  // false when any clump fell back to the greedy rule
};

// Builds the scene from radius-marked points. Throws ConfigError when radius
// marks are missing/nonpositive or n_scale is zero.
BooleanScene build_scene(const MarkedPointSet& marked, std::size_t n_scale);

// Clump census from the component partition; sum of k*U_k equals ball count.
ClumpCounts clump_counts(const BooleanScene& scene);

// Area of the union (d=2 only). Clumps of at most three disks use
// inclusion-exclusion with closed-form lens/triple areas; larger clumps use
// the refined cross-section integrator with absolute tolerance 1e-6 each.
VolumeEstimate scene_volume_exact2d(const BooleanScene& scene, unsigned threads = 1);

// Hit-count estimate: samples uniformly in the bounding box of the union.
// Throws ConfigError when samples is zero.
VolumeEstimate scene_volume_montecarlo(const BooleanScene& scene, std::size_t samples,
                                       std::uint64_t seed);

// Euler characteristic via the nerve of the disk family: every clique of the
// intersection graph whose disks share a common point contributes
// (-1)^(size+1). Valid because the balls are convex. Throws
// std::runtime_error("supercritical clump") when a clique exceeds 20 disks.
EulerResult euler_curvature_2d(const BooleanScene& scene, unsigned threads = 1);

// Largest pairwise non-overlapping subfamily. Clumps of at most 30 balls are
// solved exactly by branch and bound; larger clumps fall back to a
// smallest-degree-first greedy rule and clear the exact flag.
PackingResult offline_packing(const BooleanScene& scene);

// CSV rows: cx,cy[,cz],radius,clump_id,selected_flag (header included).
void write_scene_csv(std::ostream& os, const BooleanScene& scene,
                     const PackingResult* packing = nullptr);
void write_scene_csv_file(const std::string& path, const BooleanScene& scene,
                          const PackingResult* packing = nullptr);

}  // namespace geomlaw
