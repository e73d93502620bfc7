#include "geomlaw/boolean_model.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "geomlaw/disk_geometry.hpp"
#include "geomlaw/functionals.hpp"
#include "geomlaw/parallel.hpp"
#include "geomlaw/rng.hpp"
#include "geomlaw/spatial_index.hpp"
#include "geomlaw/util.hpp"

namespace geomlaw {

namespace {

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

// balls of one clump, gathered in ball-index order
struct Clump {
    std::vector<std::uint32_t> members;
};

// clumps plus, for each ball, its position inside its clump's member list
std::pair<std::vector<Clump>, std::vector<std::uint32_t>> gather_clumps(
    const BooleanScene& scene) {
    std::vector<Clump> clumps(scene.clump_count);
    std::vector<std::uint32_t> local(scene.clump_id.size());
    for (std::size_t i = 0; i < scene.clump_id.size(); ++i) {
        auto& mem = clumps[scene.clump_id[i]].members;
        local[i] = static_cast<std::uint32_t>(mem.size());
        mem.push_back(static_cast<std::uint32_t>(i));
    }
    return {std::move(clumps), std::move(local)};
}

}  // namespace

BooleanScene build_scene(const MarkedPointSet& marked, std::size_t n_scale) {
    if (!marked.has_radius())
        throw ConfigError("boolean scene requires radius marks");
    if (n_scale == 0) throw ConfigError("boolean scene requires a positive scale count");
    const std::size_t n = marked.size();
    const int d = marked.points.dim();
    if (n == 0) throw ConfigError("boolean scene requires at least one ball");
    for (double r : marked.radius)
        if (!(r > 0.0)) throw ConfigError("boolean scene requires positive radius marks");

    BooleanScene scene;
    scene.centers = marked.points;
    scene.scale = std::pow(static_cast<double>(n_scale), -1.0 / static_cast<double>(d));
    scene.radii.resize(n);
    for (std::size_t i = 0; i < n; ++i) scene.radii[i] = marked.radius[i] * scene.scale;

    const double max_r = *std::max_element(scene.radii.begin(), scene.radii.end());
    SpatialIndex index(scene.centers);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : index.range(scene.centers[i], scene.radii[i] + max_r)) {
            if (j <= i) continue;
            if (dist(scene.centers[i], scene.centers[j]) <= scene.radii[i] + scene.radii[j])
                edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
    }
    scene.intersection_graph = GeoGraph(scene.centers, std::move(edges), false);
    scene.clump_id = component_labels(scene.intersection_graph);
    scene.clump_count = component_count(scene.intersection_graph);
    return scene;
}

ClumpCounts clump_counts(const BooleanScene& scene) {
    std::vector<std::size_t> order(scene.clump_count, 0);
    for (std::uint32_t c : scene.clump_id) ++order[c];
    ClumpCounts out;
    out.total = scene.clump_count;
    for (std::size_t k : order) ++out.by_order[k];
    return out;
}

VolumeEstimate scene_volume_exact2d(const BooleanScene& scene, unsigned threads) {
    if (scene.centers.dim() != 2)
        throw ConfigError("exact scene volume is implemented for dimension 2 only");
    const auto [clumps, local] = gather_clumps(scene);
    std::vector<double> part(clumps.size(), 0.0);
    parallel_for_index(clumps.size(), threads, [&](std::size_t c) {
        const auto& mem = clumps[c].members;
        std::vector<std::array<double, 2>> cs(mem.size());
        std::vector<double> rs(mem.size());
        for (std::size_t t = 0; t < mem.size(); ++t) {
            const auto p = scene.centers[mem[t]];
            cs[t] = {p[0], p[1]};
            rs[t] = scene.radii[mem[t]];
        }
        if (mem.size() == 1) {
            part[c] = kPi * rs[0] * rs[0];
        } else if (mem.size() <= 3) {
            double a = 0.0;
            for (double r : rs) a += kPi * r * r;
            for (std::size_t u = 0; u < rs.size(); ++u)
                for (std::size_t v = u + 1; v < rs.size(); ++v)
                    a -= lens_area(rs[u], rs[v],
                                   std::hypot(cs[u][0] - cs[v][0], cs[u][1] - cs[v][1]));
            if (rs.size() == 3) a += disks_intersection_area(cs, rs);
            part[c] = a;
        } else {
            part[c] = union_area_refined(cs, rs, 1e-6);
        }
    });
    VolumeEstimate out;
    for (double a : part) out.value += a;
    return out;
}

VolumeEstimate scene_volume_montecarlo(const BooleanScene& scene, std::size_t samples,
                                       std::uint64_t seed) {
    if (samples == 0) throw ConfigError("volume sampling requires at least one sample");
    const int d = scene.centers.dim();
    const std::size_t n = scene.centers.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> lo(d, inf), hi(d, -inf);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = scene.centers[i];
        for (int k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], p[k] - scene.radii[i]);
            hi[k] = std::max(hi[k], p[k] + scene.radii[i]);
        }
    }
    double box = 1.0;
    for (int k = 0; k < d; ++k) box *= hi[k] - lo[k];

    SpatialIndex index(scene.centers);
    const double max_r = *std::max_element(scene.radii.begin(), scene.radii.end());
    RngStream rng(seed);
    std::vector<double> q(d);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (int k = 0; k < d; ++k) q[k] = lo[k] + (hi[k] - lo[k]) * rng.uniform01();
        for (std::size_t i : index.range(q, max_r)) {
            if (dist(q, scene.centers[i]) <= scene.radii[i]) {
                ++hits;
                break;
            }
        }
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    VolumeEstimate out;
    out.value = box * p;
    out.stderr_ = box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    return out;
}

namespace {

// Enumerates cliques of the clump and accumulates the nerve signs. Supersets
// of a clique with empty common intersection are pruned: intersections only
// shrink as disks are added.
struct NerveCounter {
    const BooleanScene& scene;
    const std::vector<std::uint32_t>& members;
    std::vector<std::vector<std::uint32_t>> adj;  // local ids, sorted
    std::vector<std::array<double, 2>> cs;
    std::vector<double> rs;
    long long chi = 0;
    std::vector<std::array<double, 2>> stack_c;
    std::vector<double> stack_r;

    NerveCounter(const BooleanScene& s, const std::vector<std::uint32_t>& m,
                 const std::vector<std::uint32_t>& local)
        : scene(s), members(m) {
        const std::size_t k = m.size();
        adj.resize(k);
        cs.resize(k);
        rs.resize(k);
        for (std::size_t t = 0; t < k; ++t) {
            const auto p = scene.centers[m[t]];
            cs[t] = {p[0], p[1]};
            rs[t] = scene.radii[m[t]];
            for (std::uint32_t w : scene.intersection_graph.undirected_neighbors(m[t]))
                adj[t].push_back(local[w]);
            std::sort(adj[t].begin(), adj[t].end());
        }
    }

    void extend(std::uint32_t v, const std::vector<std::uint32_t>& candidates) {
        stack_c.push_back(cs[v]);
        stack_r.push_back(rs[v]);
        if (stack_c.size() > 20) throw std::runtime_error("supercritical clump");
        const bool nonempty =
            stack_c.size() <= 2 || disks_common_point(stack_c, stack_r);
        if (nonempty) {
            chi += (stack_c.size() % 2 == 1) ? 1 : -1;
            std::vector<std::uint32_t> next;
            for (std::uint32_t w : candidates)
                if (w > v && std::binary_search(adj[v].begin(), adj[v].end(), w))
                    next.push_back(w);
            for (std::uint32_t w : next) extend(w, next);
        }
        stack_c.pop_back();
        stack_r.pop_back();
    }

    long long run() {
        std::vector<std::uint32_t> all(members.size());
        for (std::size_t t = 0; t < all.size(); ++t) all[t] = static_cast<std::uint32_t>(t);
        for (std::uint32_t v : all) extend(v, all);
        return chi;
    }
};

}  // namespace

EulerResult euler_curvature_2d(const BooleanScene& scene, unsigned threads) {
    if (scene.centers.dim() != 2)
        throw ConfigError("Euler characteristic is implemented for dimension 2 only");
    const auto [clumps, local] = gather_clumps(scene);
    std::vector<long long> part(clumps.size(), 0);
    parallel_for_index(clumps.size(), threads, [&](std::size_t c) {
        NerveCounter counter(scene, clumps[c].members, local);
        part[c] = counter.run();
    });
    EulerResult out;
    for (long long v : part) out.chi += v;
    out.total_curvature = 2.0 * kPi * static_cast<double>(out.chi);
    return out;
}

namespace {

// exact maximum independent set on <= 30 vertices: include/exclude branching
// on a max-degree pivot with a popcount upper bound
struct MisSolver {
    std::vector<std::uint64_t> nbr;
    std::uint64_t best_mask = 0;
    int best = -1;

    void solve(std::uint64_t open, std::uint64_t chosen) {
        const int upper = std::popcount(chosen) + std::popcount(open);
        if (upper <= best) return;
        if (open == 0) {
            best = std::popcount(chosen);
            best_mask = chosen;
            return;
        }
        int pivot = -1, pivot_deg = -1;
        for (std::uint64_t m = open; m != 0; m &= m - 1) {
            const int v = std::countr_zero(m);
            const int deg = std::popcount(nbr[static_cast<std::size_t>(v)] & open);
            if (deg > pivot_deg) {
                pivot_deg = deg;
                pivot = v;
            }
        }
        const std::uint64_t pbit = std::uint64_t{1} << pivot;
        if (pivot_deg <= 1) {  // isolated or pendant: always take it
            solve(open & ~(nbr[static_cast<std::size_t>(pivot)] | pbit), chosen | pbit);
            return;
        }
        solve(open & ~(nbr[static_cast<std::size_t>(pivot)] | pbit), chosen | pbit);
        solve(open & ~pbit, chosen);
    }
};

}  // namespace

PackingResult offline_packing(const BooleanScene& scene) {
    const auto [clumps, local] = gather_clumps(scene);
    PackingResult out;
    out.selected.assign(scene.centers.size(), 0);
    for (const auto& clump : clumps) {
        const std::size_t k = clump.members.size();
        std::vector<std::uint64_t> nbr(k, 0);
        std::vector<std::vector<std::uint32_t>> adj(k);
        for (std::size_t t = 0; t < k; ++t) {
            for (std::uint32_t w : scene.intersection_graph.undirected_neighbors(clump.members[t])) {
                adj[t].push_back(local[w]);
                if (k <= 30) nbr[t] |= std::uint64_t{1} << local[w];
            }
        }
        if (k <= 30) {
            MisSolver solver;
            solver.nbr = std::move(nbr);
            solver.solve((std::uint64_t{1} << k) - 1, 0);
            for (std::size_t t = 0; t < k; ++t)
                if (solver.best_mask >> t & 1) out.selected[clump.members[t]] = 1;
            out.count += static_cast<std::size_t>(solver.best);
        } else {
            // greedy: smallest remaining degree first, ties by index
            out.exact = false;
            std::vector<char> removed(k, 0);
            std::vector<std::size_t> deg(k);
            for (std::size_t t = 0; t < k; ++t) deg[t] = adj[t].size();
            for (std::size_t step = 0; step < k; ++step) {
                std::size_t pick = k;
                for (std::size_t t = 0; t < k; ++t)
                    if (!removed[t] && (pick == k || deg[t] < deg[pick])) pick = t;
                if (pick == k) break;
                out.selected[clump.members[pick]] = 1;
                ++out.count;
                removed[pick] = 1;
                for (std::uint32_t w : adj[pick]) {
                    if (removed[w]) continue;
                    removed[w] = 1;
                    for (std::uint32_t z : adj[w])
                        if (!removed[z] && deg[z] > 0) --deg[z];
                }
            }
        }
    }
    return out;
}

void write_scene_csv(std::ostream& os, const BooleanScene& scene,
                     const PackingResult* packing) {
    const int d = scene.centers.dim();
    os << (d == 3 ? "cx,cy,cz,radius,clump_id,selected_flag\n"
                  : "cx,cy,radius,clump_id,selected_flag\n");
    for (std::size_t i = 0; i < scene.centers.size(); ++i) {
        const auto p = scene.centers[i];
        for (int k = 0; k < d; ++k) os << format_double(p[k]) << ',';
        os << format_double(scene.radii[i]) << ',' << scene.clump_id[i] << ','
           << (packing != nullptr ? int{packing->selected[i]} : 0) << '\n';
    }
}

void write_scene_csv_file(const std::string& path, const BooleanScene& scene,
                          const PackingResult* packing) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file: " + path);
    write_scene_csv(os, scene, packing);
}

}  // namespace geomlaw
