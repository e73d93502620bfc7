#include "geomlaw/geo_graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace geomlaw {

GeoGraph::GeoGraph(PointSet vertices,
                   std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                   bool directed)
    : vertices_(std::move(vertices)), directed_(directed) {
    const std::size_t n = vertices_.size();
    for (auto& [u, v] : edges) {
        if (u >= n || v >= n)
            throw std::invalid_argument("GeoGraph: edge endpoint out of range");
        if (u == v) throw std::invalid_argument("GeoGraph: self loop");
        if (!directed_ && u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw std::invalid_argument("GeoGraph: duplicate edge");

    edges_.reserve(edges.size());
    for (const auto& [u, v] : edges) {
        GraphEdge e;
        e.a = u;
        e.b = v;
        e.length = distance(vertices_[u], vertices_[v]);
        edges_.push_back(e);
    }

    // CSR adjacency (out edges, or both endpoints when undirected)
    adj_offset_.assign(n + 1, 0);
    for (const auto& e : edges_) {
        ++adj_offset_[e.a + 1];
        if (!directed_) ++adj_offset_[e.b + 1];
    }
    for (std::size_t i = 1; i <= n; ++i) adj_offset_[i] += adj_offset_[i - 1];
    adj_edges_.resize(adj_offset_[n]);
    {
        std::vector<std::uint32_t> cursor(adj_offset_.begin(), adj_offset_.end() - 1);
        for (std::uint32_t id = 0; id < edges_.size(); ++id) {
            adj_edges_[cursor[edges_[id].a]++] = id;
            if (!directed_) adj_edges_[cursor[edges_[id].b]++] = id;
        }
    }
    if (directed_) {
        in_offset_.assign(n + 1, 0);
        for (const auto& e : edges_) ++in_offset_[e.b + 1];
        for (std::size_t i = 1; i <= n; ++i) in_offset_[i] += in_offset_[i - 1];
        in_edges_.resize(in_offset_[n]);
        std::vector<std::uint32_t> cursor(in_offset_.begin(), in_offset_.end() - 1);
        for (std::uint32_t id = 0; id < edges_.size(); ++id)
            in_edges_[cursor[edges_[id].b]++] = id;
    }
}

void GeoGraph::check_vertex(std::size_t v) const {
    if (v >= vertices_.size())
        throw std::invalid_argument("GeoGraph: vertex index out of range");
}

std::span<const std::uint32_t> GeoGraph::incident_ids(std::size_t v) const {
    check_vertex(v);
    return {adj_edges_.data() + adj_offset_[v], adj_offset_[v + 1] - adj_offset_[v]};
}

std::span<const std::uint32_t> GeoGraph::in_ids(std::size_t v) const {
    check_vertex(v);
    if (!directed_)
        throw std::invalid_argument("GeoGraph: in-edges only exist for directed graphs");
    return {in_edges_.data() + in_offset_[v], in_offset_[v + 1] - in_offset_[v]};
}

std::vector<std::uint32_t> GeoGraph::undirected_neighbors(std::size_t v) const {
    check_vertex(v);
    std::vector<std::uint32_t> out;
    for (std::uint32_t id : incident_ids(v))
        out.push_back(edges_[id].a == v ? edges_[id].b : edges_[id].a);
    if (directed_) {
        for (std::uint32_t id : in_ids(v)) out.push_back(edges_[id].a);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double GeoGraph::total_length() const {
    double s = 0.0;
    for (const auto& e : edges_) s += e.length;
    return s;
}

PatternSpec PatternSpec::degree(int m) {
    if (m < 0) throw std::invalid_argument("pattern degree(m): m must be >= 0");
    PatternSpec p;
    p.kind = Kind::degree;
    p.m = m;
    return p;
}

PatternSpec PatternSpec::star(int m) {
    if (m < 1) throw std::invalid_argument("pattern star(m): m must be >= 1");
    PatternSpec p;
    p.kind = Kind::star;
    p.m = m;
    return p;
}

PatternSpec PatternSpec::explicit_graph(int vertex_count,
                                        std::vector<std::pair<int, int>> edges) {
    if (vertex_count < 1 || vertex_count > 6)
        throw std::invalid_argument("explicit pattern: vertex count must be in [1,6]");
    for (auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count || u == v)
            throw std::invalid_argument("explicit pattern: bad edge");
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    // connectivity check so the pattern search can stay local
    std::vector<int> label(static_cast<std::size_t>(vertex_count));
    for (int i = 0; i < vertex_count; ++i) label[static_cast<std::size_t>(i)] = i;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [u, v] : edges) {
            int lu = label[static_cast<std::size_t>(u)], lv = label[static_cast<std::size_t>(v)];
            if (lu != lv) {
                int m = std::min(lu, lv);
                for (int& l : label)
                    if (l == lu || l == lv) l = m;
                changed = true;
            }
        }
    }
    for (int l : label)
        if (l != label[0])
            throw std::invalid_argument("explicit pattern: must be connected");
    PatternSpec p;
    p.kind = Kind::explicit_graph;
    p.vertex_count = vertex_count;
    p.edges = std::move(edges);
    return p;
}

std::string PatternSpec::describe() const {
    switch (kind) {
        case Kind::degree: return "degree(" + std::to_string(m) + ")";
        case Kind::star: return "star(" + std::to_string(m) + ")";
        case Kind::explicit_graph:
            return "explicit(" + std::to_string(vertex_count) + "v," +
                   std::to_string(edges.size()) + "e)";
    }
    return "?";
}

}  // namespace geomlaw
