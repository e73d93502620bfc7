#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geomlaw/delaunay.hpp"
#include "geomlaw/geo_graph.hpp"
#include "geomlaw/graph_builders.hpp"
#include "geomlaw/point_set.hpp"

namespace geomlaw {

// Nonnegative edge-length weight defined on [0, +inf].  The value at +inf is
// explicit because Voronoi duals of hull edges have infinite length; applying
// a weight with nonzero value at infinity to a Voronoi diagram is an error.
class WeightFn {
public:
    enum class Kind { power, indicator, table, constant };

    // x^alpha with alpha >= 0; value at infinity is +inf (alpha > 0) or 1.
    static WeightFn power(double alpha);
    // 1 on [0, t], 0 beyond; value at infinity 0.
    static WeightFn indicator(double t);
    // piecewise linear through (x, value) knots with strictly increasing
    // nonnegative x, constant before the first and after the last knot;
    // value at infinity equals the final value.
    static WeightFn table(std::vector<std::pair<double, double>> knots);
    static WeightFn constant(double c = 1.0);

    // same weight with the value at infinity replaced (e.g. the identity
    // weight with a zero tail used for Voronoi edge sums)
    WeightFn with_value_at_infinity(double v) const;

    double operator()(double x) const;  // x in [0, +inf]
    double value_at_infinity() const { return vinf_; }
    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double threshold() const { return threshold_; }
    std::string describe() const;

    // metadata only: polynomial growth order when the caller declares one
    std::optional<double> growth_order;

private:
    WeightFn() = default;
    Kind kind_ = Kind::constant;
    double alpha_ = 0.0;      // power
    double threshold_ = 0.0;  // indicator
    double c_ = 1.0;          // constant
    std::vector<std::pair<double, double>> knots_;
    double vinf_ = 1.0;
};

// Per-point functional xi(x; X) evaluated on a configuration, optionally on
// a graph built over that configuration.  All built-ins depend only on
// relative geometry, so they are translation invariant by construction.
struct XiContext {
    const PointSet& points;
    const GeoGraph* graph = nullptr;
    const VoronoiDiagram* voronoi = nullptr;
};

struct XiPlugin {
    std::string name;
    std::optional<GraphSpec> graph_spec;           // graph to build on the scaled set
    bool needs_voronoi = false;                    // build the planar diagram instead
    std::optional<double> homogeneity_order;       // gamma when xi is homogeneous
    std::function<double(std::size_t, const XiContext&)> eval;
};

// Built-in plugins.
XiPlugin xi_constant(double c);
// number of other points within distance rho (no graph)
XiPlugin xi_count_within(double rho);
// half the phi-weighted incident edge length; directed graphs use in-edges
// without the half factor
XiPlugin xi_half_incident_weight(GraphSpec spec, WeightFn phi);
// reciprocal of the order of the component containing the vertex
XiPlugin xi_reciprocal_component_order(GraphSpec spec);
// indicator that some subgraph isomorphic to the pattern touches the vertex
XiPlugin xi_pattern_indicator(GraphSpec spec, PatternSpec pattern);
// half the phi-weighted boundary length of the vertex's Voronoi cell
// (d = 2); phi must have value 0 at infinity
XiPlugin xi_half_cell_boundary_weight(WeightFn phi);

// Per-point values of xi on the configuration scaled by `scale` about the
// origin; throws when xi produces a negative or non-finite value.
std::vector<double> xi_values(const PointSet& pts, const XiPlugin& xi, double scale);

// Sum of xi over all points of the scaled configuration.
double h_xi(const PointSet& pts, const XiPlugin& xi, double scale);

// (1/n) sum of squared deviations of the per-point xi values from their mean.
double sample_variance_xi(const PointSet& pts, const XiPlugin& xi, double scale);

// Sum of phi(scale * |e|) over edges.  The Voronoi overload requires
// phi(inf) = 0 and lets infinite dual edges contribute that zero.
double weighted_length(const GeoGraph& g, const WeightFn& phi, double scale);
double weighted_length(const VoronoiDiagram& vd, const WeightFn& phi, double scale);

// Connected components of the undirected skeleton.
std::size_t component_count(const GeoGraph& g);
std::vector<std::uint32_t> component_labels(const GeoGraph& g);
std::size_t component_order_of(const GeoGraph& g, std::size_t vertex);

// Number of vertices touched by some subgraph isomorphic to the pattern.
// degree(m) counts vertices of degree exactly m (in-degree for directed
// graphs), star(m) counts vertices of degree >= m, explicit patterns use an
// exhaustive local search.
std::size_t vertex_pattern_count(const GeoGraph& g, const PatternSpec& pattern);
bool pattern_touches_vertex(const GeoGraph& g, const PatternSpec& pattern,
                            std::size_t vertex);

// Empirical distribution values at the given grid points.
struct Ecdf {
    std::vector<std::pair<double, double>> points;  // (t, fraction <= t)
    bool empty_input = false;                       // no edges / no cells
};

// fraction of edges with scale * |e| <= t
Ecdf edge_length_ecdf(const GeoGraph& g, double scale, std::span<const double> t_grid);
// fraction of cells with scale * area <= t; unbounded cells never count
Ecdf cell_area_ecdf(const VoronoiDiagram& vd, double scale,
                    std::span<const double> t_grid);

void write_ecdf_csv(std::ostream& os, const Ecdf& ecdf);

}  // namespace geomlaw
