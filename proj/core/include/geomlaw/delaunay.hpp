#pragma once

#include <array>
#include <optional>

#include "geomlaw/geo_graph.hpp"
#include "geomlaw/point_set.hpp"

namespace geomlaw {

// One Voronoi cell.  `verts` holds the dual vertices (triangle circumcenters)
// in counterclockwise order around the site; unbounded cells carry outgoing
// ray directions at both ends of the chain.  `area` is the exact cell area,
// clipped to the clip window when one was supplied, +inf for an unclipped
// unbounded cell.
struct VoronoiCell {
    std::vector<std::array<double, 2>> verts;
    bool bounded = false;
    std::array<double, 2> ray_start{0.0, 0.0};
    std::array<double, 2> ray_end{0.0, 0.0};
    double area = 0.0;
};

// Voronoi edge dual to the Delaunay edge with the same index.  Without a
// clip window `length` is the full dual-edge length and rays dual to hull
// edges are infinite; with a clip window it is the length of the dual edge
// intersected with the box (0 when the edge misses the box).
struct VoronoiEdgeRec {
    std::uint32_t site_a = 0, site_b = 0;
    double length = 0.0;
};

class VoronoiDiagram {
public:
    const PointSet& sites() const { return sites_; }
    const GeoGraph& delaunay() const { return delaunay_; }
    std::span<const VoronoiCell> cells() const { return cells_; }
    std::span<const VoronoiEdgeRec> edges() const { return vor_edges_; }
    const std::optional<Window>& clip() const { return clip_; }

    // ids into edges() / delaunay().edges() bounding the cell of `site`
    std::span<const std::uint32_t> cell_boundary_edge_ids(std::size_t site) const {
        return delaunay_.incident_ids(site);
    }

private:
    friend VoronoiDiagram delaunay_voronoi_2d(const PointSet&, std::optional<Window>);

    PointSet sites_;
    GeoGraph delaunay_;
    std::vector<VoronoiCell> cells_;
    std::vector<VoronoiEdgeRec> vor_edges_;
    std::optional<Window> clip_;
};

// Planar Delaunay triangulation plus its Voronoi dual.  Duplicate points are
// rejected; three or more points that are all collinear are rejected as a
// degenerate configuration.  When `clip` is given every cell area and every
// dual edge length is measured inside that box.
VoronoiDiagram delaunay_voronoi_2d(const PointSet& pts,
                                   std::optional<Window> clip = std::nullopt);

std::array<double, 2> circumcenter(std::span<const double> a,
                                   std::span<const double> b,
                                   std::span<const double> c);

}  // namespace geomlaw
