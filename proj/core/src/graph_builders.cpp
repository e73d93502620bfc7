#include "geomlaw/graph_builders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "geomlaw/spatial_index.hpp"
#include "geomlaw/util.hpp"

namespace geomlaw {

namespace {

using Pair = std::pair<std::uint32_t, std::uint32_t>;

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::uint32_t>(i);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

// Kruskal over an explicit candidate edge set known to contain an MST.
std::vector<Pair> kruskal(const PointSet& pts, std::vector<Pair> candidates) {
    struct Cand {
        double len;
        std::uint32_t a, b;
    };
    std::vector<Cand> edges;
    edges.reserve(candidates.size());
    for (const auto& [a, b] : candidates)
        edges.push_back({distance(pts[a], pts[b]), a, b});
    std::sort(edges.begin(), edges.end(), [](const Cand& x, const Cand& y) {
        return std::tie(x.len, x.a, x.b) < std::tie(y.len, y.a, y.b);
    });
    UnionFind uf(pts.size());
    std::vector<Pair> tree;
    tree.reserve(pts.size() - 1);
    for (const auto& e : edges) {
        if (uf.unite(e.a, e.b)) {
            tree.emplace_back(e.a, e.b);
            if (tree.size() + 1 == pts.size()) break;
        }
    }
    return tree;
}

// Prim on the complete graph, O(n^2) time and O(n) memory; used where the
// Delaunay restriction is unavailable.
std::vector<Pair> prim(const PointSet& pts) {
    const std::size_t n = pts.size();
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::uint32_t> from(n, 0);
    std::vector<bool> done(n, false);
    std::vector<Pair> tree;
    tree.reserve(n - 1);
    std::size_t cur = 0;
    done[0] = true;
    for (std::size_t round = 1; round < n; ++round) {
        for (std::size_t j = 0; j < n; ++j) {
            if (done[j]) continue;
            const double d = squared_distance(pts[cur], pts[j]);
            if (d < best[j]) {
                best[j] = d;
                from[j] = static_cast<std::uint32_t>(cur);
            }
        }
        std::size_t pick = n;
        for (std::size_t j = 0; j < n; ++j)
            if (!done[j] && (pick == n || best[j] < best[pick])) pick = j;
        done[pick] = true;
        tree.emplace_back(std::min<std::uint32_t>(from[pick], static_cast<std::uint32_t>(pick)),
                          std::max<std::uint32_t>(from[pick], static_cast<std::uint32_t>(pick)));
        cur = pick;
    }
    return tree;
}

// Candidate pairs for the proximity graphs: Delaunay edges plus pairs at
// Delaunay graph distance two.  Boundary-degenerate inputs (where the open
// blocking rule can admit edges outside the Delaunay graph, e.g. cocircular
// corners) are covered by the two-hop closure; inputs the triangulation
// rejects fall back to all pairs.
std::vector<Pair> proximity_candidates(const PointSet& pts) {
    const std::size_t n = pts.size();
    if (pts.dim() == 2 && n >= 3) {
        try {
            const GeoGraph del = delaunay_graph(pts);
            std::set<Pair> out;
            for (const auto& e : del.edges()) out.emplace(e.a, e.b);
            for (std::uint32_t v = 0; v < n; ++v) {
                const auto nbrs = del.undirected_neighbors(v);
                for (std::size_t i = 0; i < nbrs.size(); ++i)
                    for (std::size_t j = i + 1; j < nbrs.size(); ++j)
                        out.emplace(std::min(nbrs[i], nbrs[j]), std::max(nbrs[i], nbrs[j]));
            }
            return {out.begin(), out.end()};
        } catch (const ConfigError&) {
            // fall through to all pairs
        }
    }
    std::vector<Pair> out;
    out.reserve(n * (n - 1) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
    return out;
}

}  // namespace

GeoGraph mst_graph(const PointSet& pts) {
    const std::size_t n = pts.size();
    if (n == 0) throw ConfigError("mst requires at least one point");
    if (n == 1) return GeoGraph(pts, {}, false);
    if (pts.dim() == 2 && n >= 3) {
        try {
            const GeoGraph del = delaunay_graph(pts);
            std::vector<Pair> cand;
            cand.reserve(del.edges().size());
            for (const auto& e : del.edges()) cand.emplace_back(e.a, e.b);
            return GeoGraph(pts, kruskal(pts, std::move(cand)), false);
        } catch (const ConfigError&) {
            // collinear or duplicate input: no triangulation; use Prim below
        }
    }
    return GeoGraph(pts, prim(pts), false);
}

GeoGraph knn_graph(const PointSet& pts, std::size_t k, bool directed) {
    const std::size_t n = pts.size();
    if (k == 0) throw ConfigError("knn requires k >= 1");
    if (n <= k) throw ConfigError("insufficient points");
    const SpatialIndex index(pts);
    std::vector<Pair> pairs;
    pairs.reserve(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& nb : index.k_nearest_of(i, k)) {
            const auto a = static_cast<std::uint32_t>(i);
            const auto b = static_cast<std::uint32_t>(nb.index);
            if (directed)
                pairs.emplace_back(a, b);
            else
                pairs.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    if (!directed) {
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    }
    return GeoGraph(pts, std::move(pairs), directed);
}

GeoGraph soi_graph(const PointSet& pts) {
    const std::size_t n = pts.size();
    if (n < 2) throw ConfigError("sphere-of-influence graph requires at least two points");
    const SpatialIndex index(pts);
    std::vector<double> r(n);
    double max_r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = index.k_nearest_of(i, 1)[0].dist;
        max_r = std::max(max_r, r[i]);
    }
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : index.range(pts[i], r[i] + max_r)) {
            if (j <= i) continue;
            if (distance(pts[i], pts[j]) <= r[i] + r[j])
                pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
    }
    return GeoGraph(pts, std::move(pairs), false);
}

GeoGraph gabriel_graph(const PointSet& pts) {
    const std::size_t n = pts.size();
    if (n < 2) throw ConfigError("gabriel graph requires at least two points");
    const int d = pts.dim();
    const SpatialIndex index(pts);
    std::vector<double> mid(static_cast<std::size_t>(d));
    std::vector<Pair> edges;
    for (const auto& [a, b] : proximity_candidates(pts)) {
        for (int c = 0; c < d; ++c) mid[static_cast<std::size_t>(c)] = 0.5 * (pts[a][c] + pts[b][c]);
        const double radius = 0.5 * distance(pts[a], pts[b]);
        bool blocked = false;
        for (std::size_t w : index.range(mid, radius)) {
            if (w == a || w == b) continue;
            if (distance(pts[w], mid) < radius) {  // open region: boundary does not block
                blocked = true;
                break;
            }
        }
        if (!blocked) edges.emplace_back(a, b);
    }
    return GeoGraph(pts, std::move(edges), false);
}

GeoGraph relative_neighborhood_graph(const PointSet& pts) {
    const std::size_t n = pts.size();
    if (n < 2) throw ConfigError("relative-neighborhood graph requires at least two points");
    const int d = pts.dim();
    const SpatialIndex index(pts);
    std::vector<double> mid(static_cast<std::size_t>(d));
    std::vector<Pair> edges;
    for (const auto& [a, b] : proximity_candidates(pts)) {
        const double len = distance(pts[a], pts[b]);
        for (int c = 0; c < d; ++c) mid[static_cast<std::size_t>(c)] = 0.5 * (pts[a][c] + pts[b][c]);
        bool blocked = false;
        // the lune is contained in the ball around the midpoint of radius
        // len * sqrt(3)/2
        for (std::size_t w : index.range(mid, len * 0.8660254037844387)) {
            if (w == a || w == b) continue;
            if (distance(pts[w], pts[a]) < len && distance(pts[w], pts[b]) < len) {
                blocked = true;
                break;
            }
        }
        if (!blocked) edges.emplace_back(a, b);
    }
    return GeoGraph(pts, std::move(edges), false);
}

GeoGraph delaunay_graph(const PointSet& pts) {
    return delaunay_voronoi_2d(pts).delaunay();
}

GraphSpec GraphSpec::parse(const std::string& name, std::size_t k, bool directed) {
    GraphSpec spec;
    spec.k = k;
    spec.directed = directed;
    if (name == "mst")
        spec.kind = Kind::mst;
    else if (name == "knn")
        spec.kind = Kind::knn;
    else if (name == "soi" || name == "sig")
        spec.kind = Kind::soi;
    else if (name == "gabriel")
        spec.kind = Kind::gabriel;
    else if (name == "rng")
        spec.kind = Kind::rng;
    else if (name == "delaunay")
        spec.kind = Kind::delaunay;
    else
        throw ConfigError("unknown graph kind: " + name);
    return spec;
}

std::string GraphSpec::name() const {
    switch (kind) {
        case Kind::mst: return "mst";
        case Kind::knn: return "knn";
        case Kind::soi: return "soi";
        case Kind::gabriel: return "gabriel";
        case Kind::rng: return "rng";
        case Kind::delaunay: return "delaunay";
    }
    return "mst";
}

GeoGraph build_graph(const GraphSpec& spec, const PointSet& pts) {
    switch (spec.kind) {
        case GraphSpec::Kind::mst: return mst_graph(pts);
        case GraphSpec::Kind::knn: return knn_graph(pts, spec.k, spec.directed);
        case GraphSpec::Kind::soi: return soi_graph(pts);
        case GraphSpec::Kind::gabriel: return gabriel_graph(pts);
        case GraphSpec::Kind::rng: return relative_neighborhood_graph(pts);
        case GraphSpec::Kind::delaunay: return delaunay_graph(pts);
    }
    throw ConfigError("unknown graph kind");
}

void write_edges_csv(std::ostream& os, const GeoGraph& g) {
    os << "i,j,length\n";
    for (const auto& e : g.edges())
        os << e.a << ',' << e.b << ',' << format_double(e.length) << '\n';
}

void write_graph_json(std::ostream& os, const GeoGraph& g, const GraphSpec& spec) {
    nlohmann::json j;
    j["kind"] = spec.name();
    if (spec.kind == GraphSpec::Kind::knn) {
        j["k"] = spec.k;
        j["directed"] = spec.directed;
    } else {
        j["directed"] = g.directed();
    }
    j["dim"] = g.vertices().dim();
    auto& verts = j["vertices"] = nlohmann::json::array();
    for (std::size_t i = 0; i < g.vertex_count(); ++i) {
        auto p = g.vertices()[i];
        verts.push_back(std::vector<double>(p.begin(), p.end()));
    }
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges())
        edges.push_back({{"i", e.a}, {"j", e.b}, {"length", e.length}});
    os << j.dump(2) << '\n';
}

}  // namespace geomlaw
