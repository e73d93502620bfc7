#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geomlaw/point_set.hpp"

namespace geomlaw {

struct GraphEdge {
    std::uint32_t a = 0, b = 0;  // undirected: a < b; directed: a -> b
    double length = 0.0;
};

// Geometric graph over a vertex set.  Construction canonicalizes and sorts
// the edge list, computes Euclidean lengths, and builds adjacency, so two
// builders producing the same edge set yield byte-identical graphs.
class GeoGraph {
public:
    GeoGraph() = default;
    GeoGraph(PointSet vertices, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
             bool directed);

    const PointSet& vertices() const { return vertices_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::span<const GraphEdge> edges() const { return edges_; }
    bool directed() const { return directed_; }

    // undirected: all incident edge ids; directed: out-edge ids
    std::span<const std::uint32_t> incident_ids(std::size_t v) const;
    // directed graphs only: in-edge ids
    std::span<const std::uint32_t> in_ids(std::size_t v) const;

    std::size_t degree(std::size_t v) const { return incident_ids(v).size(); }
    std::size_t in_degree(std::size_t v) const { return in_ids(v).size(); }

    // neighbor vertex sets of the undirected skeleton (deduplicated, sorted)
    std::vector<std::uint32_t> undirected_neighbors(std::size_t v) const;

    double total_length() const;

private:
    void check_vertex(std::size_t v) const;

    PointSet vertices_;
    std::vector<GraphEdge> edges_;
    bool directed_ = false;
    // CSR adjacency
    std::vector<std::uint32_t> adj_offset_, adj_edges_;
    std::vector<std::uint32_t> in_offset_, in_edges_;
};

// Local configuration to count around vertices: a fixed degree, a star with
// m rays, or an explicit connected graph on at most 6 vertices.
struct PatternSpec {
    enum class Kind { degree, star, explicit_graph };
    Kind kind = Kind::degree;
    int m = 0;
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;

    static PatternSpec degree(int m);
    static PatternSpec star(int m);
    static PatternSpec explicit_graph(int vertex_count,
                                      std::vector<std::pair<int, int>> edges);
    std::string describe() const;
};

}  // namespace geomlaw
