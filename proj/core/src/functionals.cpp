#include "geomlaw/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "geomlaw/util.hpp"

namespace geomlaw {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------- WeightFn

WeightFn WeightFn::power(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw ConfigError("power weight requires alpha >= 0");
    WeightFn w;
    w.kind_ = Kind::power;
    w.alpha_ = alpha;
    w.vinf_ = alpha > 0.0 ? kInf : 1.0;
    return w;
}

WeightFn WeightFn::indicator(double t) {
    if (!(t >= 0.0))
        throw ConfigError("indicator weight requires a nonnegative threshold");
    WeightFn w;
    w.kind_ = Kind::indicator;
    w.threshold_ = t;
    w.vinf_ = 0.0;
    return w;
}

WeightFn WeightFn::table(std::vector<std::pair<double, double>> knots) {
    if (knots.empty()) throw ConfigError("table weight requires at least one knot");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!(knots[i].first >= 0.0) || !std::isfinite(knots[i].first) ||
            !(knots[i].second >= 0.0) || !std::isfinite(knots[i].second))
            throw ConfigError("table weight knots must be finite and nonnegative");
        if (i > 0 && !(knots[i - 1].first < knots[i].first))
            throw ConfigError("table weight knots must have strictly increasing abscissae");
    }
    WeightFn w;
    w.kind_ = Kind::table;
    w.vinf_ = knots.back().second;
    w.knots_ = std::move(knots);
    return w;
}

WeightFn WeightFn::constant(double c) {
    if (!(c >= 0.0) || !std::isfinite(c))
        throw ConfigError("constant weight requires a finite nonnegative value");
    WeightFn w;
    w.kind_ = Kind::constant;
    w.c_ = c;
    w.vinf_ = c;
    return w;
}

WeightFn WeightFn::with_value_at_infinity(double v) const {
    if (!(v >= 0.0) || !std::isfinite(v))
        throw ConfigError("value at infinity must be finite and nonnegative");
    WeightFn w = *this;
    w.vinf_ = v;
    return w;
}

double WeightFn::operator()(double x) const {
    if (std::isnan(x) || x < 0.0)
        throw std::runtime_error("weight evaluated at a negative or NaN length");
    if (std::isinf(x)) return vinf_;
    switch (kind_) {
        case Kind::power: return std::pow(x, alpha_);
        case Kind::indicator: return x <= threshold_ ? 1.0 : 0.0;
        case Kind::constant: return c_;
        case Kind::table: {
            if (x <= knots_.front().first) return knots_.front().second;
            if (x >= knots_.back().first) return knots_.back().second;
            const auto it = std::upper_bound(
                knots_.begin(), knots_.end(), x,
                [](double v, const std::pair<double, double>& k) { return v < k.first; });
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double t = (x - lo.first) / (hi.first - lo.first);
            return lo.second + t * (hi.second - lo.second);
        }
    }
    return 0.0;
}

std::string WeightFn::describe() const {
    switch (kind_) {
        case Kind::power: return "power(" + format_double(alpha_) + ")";
        case Kind::indicator: return "indicator[0," + format_double(threshold_) + "]";
        case Kind::table: return "table(" + std::to_string(knots_.size()) + " knots)";
        case Kind::constant: return "constant(" + format_double(c_) + ")";
    }
    return "constant";
}

// ------------------------------------------------------------- xi plugins

XiPlugin xi_constant(double c) {
    XiPlugin xi;
    xi.name = "constant(" + format_double(c) + ")";
    xi.homogeneity_order = 0.0;
    xi.eval = [c](std::size_t, const XiContext&) { return c; };
    return xi;
}

XiPlugin xi_count_within(double rho) {
    if (!(rho > 0.0)) throw ConfigError("count radius must be positive");
    XiPlugin xi;
    xi.name = "count_within(" + format_double(rho) + ")";
    xi.eval = [rho](std::size_t i, const XiContext& ctx) {
        const auto p = ctx.points[i];
        double count = 0.0;
        for (std::size_t j = 0; j < ctx.points.size(); ++j) {
            if (j == i) continue;
            if (distance(p, ctx.points[j]) <= rho) count += 1.0;
        }
        return count;
    };
    return xi;
}

XiPlugin xi_half_incident_weight(GraphSpec spec, WeightFn phi) {
    XiPlugin xi;
    xi.name = "half_incident_weight(" + spec.name() + ", " + phi.describe() + ")";
    xi.graph_spec = spec;
    if (phi.kind() == WeightFn::Kind::power) xi.homogeneity_order = phi.alpha();
    xi.eval = [phi](std::size_t i, const XiContext& ctx) {
        const GeoGraph& g = *ctx.graph;
        if (g.directed()) {
            // in-edges, no half factor: summing over vertices recovers the
            // total over all directed edges
            double sum = 0.0;
            for (std::uint32_t e : g.in_ids(i)) sum += phi(g.edges()[e].length);
            return sum;
        }
        double sum = 0.0;
        for (std::uint32_t e : g.incident_ids(i)) sum += phi(g.edges()[e].length);
        return 0.5 * sum;
    };
    return xi;
}

XiPlugin xi_reciprocal_component_order(GraphSpec spec) {
    XiPlugin xi;
    xi.name = "reciprocal_component_order(" + spec.name() + ")";
    xi.graph_spec = spec;
    xi.homogeneity_order = 0.0;
    xi.eval = [](std::size_t i, const XiContext& ctx) {
        return 1.0 / static_cast<double>(component_order_of(*ctx.graph, i));
    };
    return xi;
}

XiPlugin xi_pattern_indicator(GraphSpec spec, PatternSpec pattern) {
    XiPlugin xi;
    xi.name = "pattern_indicator(" + spec.name() + ", " + pattern.describe() + ")";
    xi.graph_spec = spec;
    xi.homogeneity_order = 0.0;
    xi.eval = [pattern](std::size_t i, const XiContext& ctx) {
        return pattern_touches_vertex(*ctx.graph, pattern, i) ? 1.0 : 0.0;
    };
    return xi;
}

XiPlugin xi_half_cell_boundary_weight(WeightFn phi) {
    if (phi.value_at_infinity() != 0.0)
        throw ConfigError("voronoi weighting requires a weight with value 0 at infinity");
    XiPlugin xi;
    xi.name = "half_cell_boundary_weight(" + phi.describe() + ")";
    xi.needs_voronoi = true;
    if (phi.kind() == WeightFn::Kind::power) xi.homogeneity_order = phi.alpha();
    xi.eval = [phi](std::size_t i, const XiContext& ctx) {
        const VoronoiDiagram& vd = *ctx.voronoi;
        double sum = 0.0;
        for (std::uint32_t e : vd.cell_boundary_edge_ids(i)) {
            const double len = vd.edges()[e].length;
            sum += std::isinf(len) ? 0.0 : phi(len);
        }
        return 0.5 * sum;
    };
    return xi;
}

// ------------------------------------------------------------ evaluation

std::vector<double> xi_values(const PointSet& pts, const XiPlugin& xi, double scale) {
    if (!(scale > 0.0)) throw ConfigError("scale must be positive");
    if (!xi.eval) throw ConfigError("xi plugin has no evaluator");
    const PointSet scaled = pts.scaled(scale);
    GeoGraph graph;
    VoronoiDiagram voronoi;
    XiContext ctx{scaled, nullptr, nullptr};
    if (xi.needs_voronoi) {
        voronoi = delaunay_voronoi_2d(scaled);
        ctx.voronoi = &voronoi;
        ctx.graph = &voronoi.delaunay();
    } else if (xi.graph_spec) {
        graph = build_graph(*xi.graph_spec, scaled);
        ctx.graph = &graph;
    }
    std::vector<double> values(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double v = xi.eval(i, ctx);
        if (!std::isfinite(v) || v < 0.0)
            throw std::runtime_error("functional returned a negative or non-finite value");
        values[i] = v;
    }
    return values;
}

double h_xi(const PointSet& pts, const XiPlugin& xi, double scale) {
    double sum = 0.0;
    for (double v : xi_values(pts, xi, scale)) sum += v;
    return sum;
}

double sample_variance_xi(const PointSet& pts, const XiPlugin& xi, double scale) {
    if (pts.size() < 2) throw ConfigError("sample variance requires at least two points");
    const std::vector<double> values = xi_values(pts, xi, scale);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(values.size());
}

// ---------------------------------------------------------- edge weights

double weighted_length(const GeoGraph& g, const WeightFn& phi, double scale) {
    if (!(scale > 0.0)) throw ConfigError("scale must be positive");
    double sum = 0.0;
    for (const auto& e : g.edges()) sum += phi(scale * e.length);
    return sum;
}

double weighted_length(const VoronoiDiagram& vd, const WeightFn& phi, double scale) {
    if (!(scale > 0.0)) throw ConfigError("scale must be positive");
    if (phi.value_at_infinity() != 0.0)
        throw ConfigError("voronoi weighting requires a weight with value 0 at infinity");
    double sum = 0.0;
    for (const auto& e : vd.edges())
        if (!std::isinf(e.length)) sum += phi(scale * e.length);
    return sum;
}

// ------------------------------------------------------------ components

std::vector<std::uint32_t> component_labels(const GeoGraph& g) {
    const std::size_t n = g.vertex_count();
    std::vector<std::uint32_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::uint32_t>(i);
    const auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& e : g.edges()) {
        const std::uint32_t a = find(e.a), b = find(e.b);
        if (a != b) parent[b] = a;
    }
    // relabel components 0..K-1 in order of first appearance
    std::vector<std::uint32_t> labels(n);
    std::vector<std::uint32_t> remap(n, std::numeric_limits<std::uint32_t>::max());
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t root = find(static_cast<std::uint32_t>(i));
        if (remap[root] == std::numeric_limits<std::uint32_t>::max()) remap[root] = next++;
        labels[i] = remap[root];
    }
    return labels;
}

std::size_t component_count(const GeoGraph& g) {
    const auto labels = component_labels(g);
    std::uint32_t max_label = 0;
    for (std::uint32_t l : labels) max_label = std::max(max_label, l);
    return g.vertex_count() == 0 ? 0 : static_cast<std::size_t>(max_label) + 1;
}

std::size_t component_order_of(const GeoGraph& g, std::size_t vertex) {
    if (vertex >= g.vertex_count()) throw ConfigError("vertex index out of range");
    const auto labels = component_labels(g);
    std::size_t order = 0;
    for (std::uint32_t l : labels)
        if (l == labels[vertex]) ++order;
    return order;
}

// ---------------------------------------------------------- pattern count

namespace {

// exhaustive search for a subgraph isomorphic to the pattern that uses
// `anchor`; pattern vertex `root` is mapped to the anchor and the rest are
// extended over the anchor's graph neighborhood
bool extend_embedding(const GeoGraph& g, const PatternSpec& pattern,
                      const std::vector<std::vector<int>>& pat_adj,
                      std::vector<std::uint32_t>& image, std::vector<bool>& used_slot,
                      std::size_t placed) {
    const std::size_t m = static_cast<std::size_t>(pattern.vertex_count);
    if (placed == m) return true;
    // next unplaced pattern vertex adjacent to an already-placed one (the
    // pattern is connected, so one always exists)
    int next = -1;
    for (std::size_t v = 0; v < m && next < 0; ++v) {
        if (used_slot[v]) continue;
        for (int u : pat_adj[v]) {
            if (used_slot[static_cast<std::size_t>(u)]) {
                next = static_cast<int>(v);
                break;
            }
        }
    }
    const std::size_t v = static_cast<std::size_t>(next);
    // candidates: graph neighbors of the images of v's placed pattern
    // neighbors
    int anchor_pat = -1;
    for (int u : pat_adj[v])
        if (used_slot[static_cast<std::size_t>(u)]) {
            anchor_pat = u;
            break;
        }
    const auto candidates = g.undirected_neighbors(image[static_cast<std::size_t>(anchor_pat)]);
    for (std::uint32_t cand : candidates) {
        bool ok = true;
        for (std::size_t u = 0; u < m && ok; ++u)
            if (used_slot[u] && image[u] == cand) ok = false;  // injective
        if (!ok) continue;
        // all edges from v to placed pattern vertices must exist in g
        for (int u : pat_adj[v]) {
            if (!used_slot[static_cast<std::size_t>(u)]) continue;
            const auto nbrs = g.undirected_neighbors(cand);
            if (!std::binary_search(nbrs.begin(), nbrs.end(), image[static_cast<std::size_t>(u)])) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        image[v] = cand;
        used_slot[v] = true;
        if (extend_embedding(g, pattern, pat_adj, image, used_slot, placed + 1)) return true;
        used_slot[v] = false;
    }
    return false;
}

}  // namespace

bool pattern_touches_vertex(const GeoGraph& g, const PatternSpec& pattern,
                            std::size_t vertex) {
    if (vertex >= g.vertex_count()) throw ConfigError("vertex index out of range");
    switch (pattern.kind) {
        case PatternSpec::Kind::degree: {
            const std::size_t deg = g.directed() ? g.in_degree(vertex) : g.degree(vertex);
            return deg == static_cast<std::size_t>(pattern.m);
        }
        case PatternSpec::Kind::star: {
            const std::size_t deg = g.directed() ? g.in_degree(vertex) : g.degree(vertex);
            return deg >= static_cast<std::size_t>(pattern.m);
        }
        case PatternSpec::Kind::explicit_graph: {
            const std::size_t m = static_cast<std::size_t>(pattern.vertex_count);
            std::vector<std::vector<int>> pat_adj(m);
            for (const auto& [a, b] : pattern.edges) {
                pat_adj[static_cast<std::size_t>(a)].push_back(b);
                pat_adj[static_cast<std::size_t>(b)].push_back(a);
            }
            std::vector<std::uint32_t> image(m);
            std::vector<bool> used(m, false);
            for (std::size_t root = 0; root < m; ++root) {
                image[root] = static_cast<std::uint32_t>(vertex);
                used[root] = true;
                if (extend_embedding(g, pattern, pat_adj, image, used, 1)) return true;
                used[root] = false;
            }
            return false;
        }
    }
    return false;
}

std::size_t vertex_pattern_count(const GeoGraph& g, const PatternSpec& pattern) {
    std::size_t count = 0;
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (pattern_touches_vertex(g, pattern, v)) ++count;
    return count;
}

// ------------------------------------------------------------------ ECDFs

namespace {

Ecdf ecdf_from_values(const std::vector<double>& values, std::span<const double> t_grid) {
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] < t_grid[i - 1])
            throw ConfigError("ecdf grid must be sorted ascending");
    Ecdf out;
    out.empty_input = values.empty();
    out.points.reserve(t_grid.size());
    for (double t : t_grid) {
        double frac = 0.0;
        if (!values.empty()) {
            std::size_t c = 0;
            for (double v : values)
                if (v <= t) ++c;
            frac = static_cast<double>(c) / static_cast<double>(values.size());
        }
        out.points.emplace_back(t, frac);
    }
    return out;
}

}  // namespace

Ecdf edge_length_ecdf(const GeoGraph& g, double scale, std::span<const double> t_grid) {
    if (!(scale > 0.0)) throw ConfigError("scale must be positive");
    std::vector<double> values;
    values.reserve(g.edges().size());
    for (const auto& e : g.edges()) values.push_back(scale * e.length);
    return ecdf_from_values(values, t_grid);
}

Ecdf cell_area_ecdf(const VoronoiDiagram& vd, double scale,
                    std::span<const double> t_grid) {
    if (!(scale > 0.0)) throw ConfigError("scale must be positive");
    std::vector<double> values;
    values.reserve(vd.cells().size());
    for (const auto& c : vd.cells())
        values.push_back(c.bounded ? scale * c.area : kInf);  // unbounded: never <= t
    return ecdf_from_values(values, t_grid);
}

void write_ecdf_csv(std::ostream& os, const Ecdf& ecdf) {
    os << "t,value\n";
    for (const auto& [t, v] : ecdf.points)
        os << format_double(t) << ',' << format_double(v) << '\n';
}

}  // namespace geomlaw
