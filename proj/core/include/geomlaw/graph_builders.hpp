#pragma once

#include <iosfwd>
#include <string>

#include "geomlaw/delaunay.hpp"
#include "geomlaw/geo_graph.hpp"
#include "geomlaw/point_set.hpp"

namespace geomlaw {

// Minimum spanning tree.  Ties are broken by (length, smaller index, larger
// index) so the tree is unique and reproducible.  Planar inputs go through
// Kruskal restricted to Delaunay edges; other dimensions and degenerate
// planar inputs use Prim on the complete graph.
GeoGraph mst_graph(const PointSet& pts);

// k-nearest-neighbor graph.  Directed: k out-edges per vertex toward its k
// nearest neighbors.  Undirected: edge {x,y} when x is among y's k nearest
// and/or vice versa, deduplicated.  Requires n >= k+1.
GeoGraph knn_graph(const PointSet& pts, std::size_t k, bool directed);

// Sphere-of-influence graph: each point owns the ball whose radius is its
// nearest-neighbor distance; edge iff the two balls overlap (closed rule:
// tangency creates an edge).
GeoGraph soi_graph(const PointSet& pts);

// Gabriel graph: edge {x,y} iff the open ball with diameter xy contains no
// other point (boundary points do not block).
GeoGraph gabriel_graph(const PointSet& pts);

// Relative-neighborhood graph: edge {x,y} iff no other point z has
// max(|z-x|, |z-y|) < |x-y| (open lune rule).
GeoGraph relative_neighborhood_graph(const PointSet& pts);

// Delaunay graph (dimension 2 only).
GeoGraph delaunay_graph(const PointSet& pts);

// Named graph family, as written in configs and on the command line.
struct GraphSpec {
    enum class Kind { mst, knn, soi, gabriel, rng, delaunay };
    Kind kind = Kind::mst;
    std::size_t k = 1;      // knn only
    bool directed = false;  // knn only

    static GraphSpec parse(const std::string& name, std::size_t k = 1,
                           bool directed = false);
    std::string name() const;
};

GeoGraph build_graph(const GraphSpec& spec, const PointSet& pts);

// Edge list as CSV rows "i,j,length" with a header line.
void write_edges_csv(std::ostream& os, const GeoGraph& g);

// Vertices plus edges plus metadata (kind, k, directed) as JSON.
void write_graph_json(std::ostream& os, const GeoGraph& g, const GraphSpec& spec);

}  // namespace geomlaw
