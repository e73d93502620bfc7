#include "geomlaw/limits.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "geomlaw/boolean_model.hpp"
#include "geomlaw/packing_online.hpp"
#include "geomlaw/parallel.hpp"
#include "geomlaw/rng.hpp"
#include "geomlaw/util.hpp"

namespace geomlaw {

namespace {

// frozen 97.5% standard normal quantile for the 95% intervals
constexpr double kZ975 = 1.959963984540054;

double norm_of(std::span<const double> p) {
    double s = 0.0;
    for (double x : p) s += x * x;
    return std::sqrt(s);
}

void finish_interval(EstimateResult& r) {
    r.lo = r.mean - kZ975 * r.stderr_;
    r.hi = r.mean + kZ975 * r.stderr_;
}

}  // namespace

StabilizationProbe StabilizationProbe::standard(double tau, int dim) {
    if (!(tau > 0.0))
        throw ConfigError("stabilization schedule requires a positive intensity");
    if (dim < 1) throw ConfigError("stabilization schedule requires dimension >= 1");
    const double base = std::pow(tau, -1.0 / static_cast<double>(dim));
    StabilizationProbe p;
    p.schedule = {base, 2.0 * base, 4.0 * base, 8.0 * base, 16.0 * base};
    return p;
}

void StabilizationProbe::validate() const {
    if (schedule.size() < 2)
        throw ConfigError("stabilization schedule needs at least two radii");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0))
            throw ConfigError("stabilization schedule radii must be positive");
        if (i > 0 && !(schedule[i] > schedule[i - 1]))
            throw ConfigError("stabilization schedule must be strictly increasing");
    }
    if (probe_count == 0)
        throw ConfigError("stabilization requires at least one probe");
    if (!(tolerance >= 0.0))
        throw ConfigError("stabilization tolerance must be nonnegative");
}

OriginFunctional origin_constant(double c) {
    OriginFunctional fn;
    fn.name = "constant";
    fn.homogeneity_order = 0.0;
    fn.value = [c](const OriginContext&) { return c; };
    return fn;
}

OriginFunctional origin_fixed_radius_count(double rho) {
    if (!(rho > 0.0))
        throw ConfigError("fixed-radius count requires a positive radius");
    OriginFunctional fn;
    fn.name = "fixed_radius_count";
    fn.value = [rho](const OriginContext& ctx) {
        const auto o = ctx.marked.points[ctx.origin];
        double count = 0.0;
        for (std::size_t i = 0; i < ctx.marked.size(); ++i) {
            if (i == ctx.origin) continue;
            const auto p = ctx.marked.points[i];
            double s = 0.0;
            for (std::size_t k = 0; k < o.size(); ++k) s += (p[k] - o[k]) * (p[k] - o[k]);
            if (std::sqrt(s) <= rho) count += 1.0;
        }
        return count;
    };
    return fn;
}

OriginFunctional origin_half_incident_weight(GraphSpec spec, WeightFn phi) {
    OriginFunctional fn;
    fn.name = "half_incident_weight:" + spec.name();
    fn.graph_spec = spec;
    fn.homogeneity_order = phi.growth_order;
    fn.value = [phi](const OriginContext& ctx) {
        const GeoGraph& g = *ctx.graph;
        double sum = 0.0;
        if (g.directed()) {
            // in-edges, unhalved: every edge counts once across all vertices
            for (std::uint32_t id : g.in_ids(ctx.origin)) sum += phi(g.edges()[id].length);
            return sum;
        }
        for (std::uint32_t id : g.incident_ids(ctx.origin)) sum += phi(g.edges()[id].length);
        return 0.5 * sum;
    };
    return fn;
}

OriginFunctional origin_reciprocal_component_order(GraphSpec spec) {
    OriginFunctional fn;
    fn.name = "reciprocal_component_order:" + spec.name();
    fn.graph_spec = spec;
    fn.homogeneity_order = 0.0;  // component structure is scale invariant
    fn.value = [](const OriginContext& ctx) {
        return 1.0 / static_cast<double>(component_order_of(*ctx.graph, ctx.origin));
    };
    return fn;
}

OriginFunctional origin_pattern_indicator(GraphSpec spec, PatternSpec pattern) {
    OriginFunctional fn;
    fn.name = "pattern_indicator:" + spec.name();
    fn.graph_spec = spec;
    fn.homogeneity_order = 0.0;  // adjacency patterns are scale invariant
    fn.value = [pattern](const OriginContext& ctx) {
        return pattern_touches_vertex(*ctx.graph, pattern, ctx.origin) ? 1.0 : 0.0;
    };
    return fn;
}

OriginFunctional origin_half_dual_length(WeightFn phi) {
    if (phi(std::numeric_limits<double>::infinity()) != 0.0)
        throw ConfigError("cell boundary weighting requires a weight with value 0 at infinity");
    OriginFunctional fn;
    fn.name = "half_dual_length";
    fn.needs_voronoi = true;
    fn.homogeneity_order = phi.growth_order;
    fn.value = [phi](const OriginContext& ctx) {
        const VoronoiDiagram& vd = *ctx.voronoi;
        double sum = 0.0;
        for (std::uint32_t id : vd.cell_boundary_edge_ids(ctx.origin))
            sum += phi(vd.edges()[id].length);
        return 0.5 * sum;
    };
    return fn;
}

OriginFunctional origin_reciprocal_clump_order(RadiusDist dist) {
    OriginFunctional fn;
    fn.name = "reciprocal_clump_order";
    fn.marks = OriginFunctional::Marks::radius;
    fn.radius_dist = dist;
    fn.value = [](const OriginContext& ctx) {
        const BooleanScene scene = build_scene(ctx.marked, 1);
        const std::uint32_t c = scene.clump_id[ctx.origin];
        std::size_t order = 0;
        for (std::uint32_t id : scene.clump_id)
            if (id == c) ++order;
        return 1.0 / static_cast<double>(order);
    };
    return fn;
}

OriginFunctional origin_rsa_indicator() {
    OriginFunctional fn;
    fn.name = "rsa_indicator";
    fn.marks = OriginFunctional::Marks::arrival;
    fn.value = [](const OriginContext& ctx) {
        // unit-volume balls: the rescaled picture of volume-1/n packing
        const RsaResult res = rsa_pack(ctx.marked, 1);
        return res.packed[ctx.origin] != 0 ? 1.0 : 0.0;
    };
    return fn;
}

namespace {

struct LevelEval {
    bool defined = false;
    double value = 0.0;
    std::vector<double> signature;  // origin neighbor coords, count-prefixed
};

LevelEval evaluate_level(const OriginFunctional& fn, const MarkedPointSet& mp,
                         std::size_t origin, StabilizationProbe::MatchRule rule) {
    LevelEval out;
    try {
        OriginContext ctx{mp, origin, nullptr, nullptr};
        GeoGraph g;
        std::optional<VoronoiDiagram> vd;
        if (fn.needs_voronoi) {
            vd = delaunay_voronoi_2d(mp.points, std::nullopt);
            ctx.voronoi = &*vd;
            ctx.graph = &vd->delaunay();
        } else if (fn.graph_spec) {
            g = build_graph(*fn.graph_spec, mp.points);
            ctx.graph = &g;
        }
        out.value = fn.value(ctx);
        if (rule == StabilizationProbe::MatchRule::edge_set && ctx.graph != nullptr) {
            std::vector<std::vector<double>> nb;
            for (std::uint32_t w : ctx.graph->undirected_neighbors(origin)) {
                const auto p = mp.points[w];
                nb.emplace_back(p.begin(), p.end());
            }
            std::sort(nb.begin(), nb.end());
            out.signature.push_back(static_cast<double>(nb.size()));
            for (const auto& v : nb)
                out.signature.insert(out.signature.end(), v.begin(), v.end());
        }
        out.defined = true;
    } catch (const ConfigError&) {
        out.defined = false;  // the structure rejected this configuration
    }
    return out;
}

bool level_match(const LevelEval& a, const LevelEval& b,
                 StabilizationProbe::MatchRule rule, double tol) {
    if (!a.defined || !b.defined) return false;
    if (rule == StabilizationProbe::MatchRule::edge_set) return a.signature == b.signature;
    return std::abs(a.value - b.value) <=
           tol * std::max({1.0, std::abs(a.value), std::abs(b.value)});
}

MarkedPointSet restrict_ball(const MarkedPointSet& mp, double m, std::size_t origin,
                             std::size_t* new_origin) {
    MarkedPointSet out;
    out.points = PointSet(mp.points.dim());
    for (std::size_t i = 0; i < mp.size(); ++i) {
        if (norm_of(mp.points[i]) > m) continue;
        if (i == origin) *new_origin = out.points.size();
        out.points.add(mp.points[i]);
        if (mp.has_arrival()) out.arrival.push_back(mp.arrival[i]);
        if (mp.has_radius()) out.radius.push_back(mp.radius[i]);
    }
    return out;
}

void append_point(MarkedPointSet& mp, std::span<const double> p,
                  const OriginFunctional& fn, RngStream& stream) {
    mp.points.add(p);
    if (fn.marks == OriginFunctional::Marks::arrival)
        mp.arrival.push_back(stream.uniform01());
    else if (fn.marks == OriginFunctional::Marks::radius)
        mp.radius.push_back(fn.radius_dist->sample(stream));
}

std::vector<double> sample_annulus(int dim, double r_lo, double r_hi, RngStream& stream) {
    std::vector<double> p(dim);
    while (true) {
        for (int k = 0; k < dim; ++k) p[k] = (2.0 * stream.uniform01() - 1.0) * r_hi;
        const double nrm = norm_of(p);
        if (nrm > r_lo && nrm <= r_hi) return p;
    }
}

// randomized edit of the configuration outside B(0; r_hat); the variants
// cycle through annulus redraw, clustered shell insertion, outside deletion,
// and dense insertion
MarkedPointSet probe_edit(const MarkedPointSet& mp, const OriginFunctional& fn,
                          double tau, double r_hat, double m_max, std::size_t variant,
                          RngStream& stream, std::size_t origin,
                          std::size_t* new_origin) {
    const int dim = mp.points.dim();
    MarkedPointSet out;
    out.points = PointSet(dim);
    const bool drop_outside = variant == 0 || variant == 2;
    for (std::size_t i = 0; i < mp.size(); ++i) {
        if (drop_outside && i != origin && norm_of(mp.points[i]) > r_hat) continue;
        if (i == origin) *new_origin = out.points.size();
        out.points.add(mp.points[i]);
        if (mp.has_arrival()) out.arrival.push_back(mp.arrival[i]);
        if (mp.has_radius()) out.radius.push_back(mp.radius[i]);
    }
    const double vol_annulus =
        unit_ball_volume(dim) * (std::pow(m_max, dim) - std::pow(r_hat, dim));
    if (variant == 0) {  // fresh draw of the outside configuration
        const std::size_t count = stream.poisson(tau * vol_annulus);
        for (std::size_t t = 0; t < count; ++t)
            append_point(out, sample_annulus(dim, r_hat, m_max, stream), fn, stream);
    } else if (variant == 1) {  // tight cluster just outside the radius
        std::vector<double> dir = sample_annulus(dim, 0.0, 1.0, stream);
        const double nrm = norm_of(dir);
        const double shell = std::min(1.05 * r_hat, 0.5 * (r_hat + m_max));
        for (int k = 0; k < dim; ++k) dir[k] *= shell / nrm;
        const std::size_t count = 1 + stream.poisson(3.0);
        std::vector<double> q(dim);
        for (std::size_t t = 0; t < count; ++t) {
            while (true) {
                for (int k = 0; k < dim; ++k)
                    q[k] = dir[k] + 0.02 * r_hat * (2.0 * stream.uniform01() - 1.0);
                const double qn = norm_of(q);
                if (qn > r_hat && qn <= m_max) break;
            }
            append_point(out, q, fn, stream);
        }
    } else if (variant == 3) {  // dense insertion on top of the existing points
        const std::size_t count = stream.poisson(4.0 * tau * vol_annulus);
        for (std::size_t t = 0; t < count; ++t)
            append_point(out, sample_annulus(dim, r_hat, m_max, stream), fn, stream);
    }
    return out;
}

}  // namespace

XiInfinitySample sample_origin_limit(const OriginFunctional& fn, double tau,
                                     const StabilizationProbe& probe,
                                     std::uint64_t seed, int dim) {
    probe.validate();
    if (!(tau > 0.0)) throw ConfigError("origin sampling requires a positive intensity");
    if (dim < 1) throw ConfigError("origin sampling requires dimension >= 1");
    if (!fn.value) throw ConfigError("origin functional has no value rule");
    if (fn.needs_voronoi && dim != 2)
        throw ConfigError("cell-based origin functionals require dimension 2");
    if (probe.match_rule == StabilizationProbe::MatchRule::edge_set &&
        !(fn.graph_spec.has_value() || fn.needs_voronoi))
        throw ConfigError("edge-set matching requires a graph-based functional");
    if (fn.marks == OriginFunctional::Marks::radius && !fn.radius_dist.has_value())
        throw ConfigError("radius marks require a radius distribution");

    const double m_max = probe.schedule.back();
    const std::vector<double> zero(dim, 0.0);
    const Window window = Window::ball(zero, m_max);
    PointSet pts = sample_poisson(tau, window, derive_seed(seed, "limit.points"), true);
    const std::size_t origin_full = pts.size() - 1;

    MarkedPointSet marked;
    if (fn.marks == OriginFunctional::Marks::arrival)
        marked = attach_arrival_marks(std::move(pts), derive_seed(seed, "limit.marks"));
    else if (fn.marks == OriginFunctional::Marks::radius)
        marked =
            attach_radius_marks(std::move(pts), *fn.radius_dist, derive_seed(seed, "limit.marks"));
    else
        marked.points = std::move(pts);

    const std::size_t levels = probe.schedule.size();
    std::vector<LevelEval> evals(levels);
    for (std::size_t li = 0; li < levels; ++li) {
        std::size_t o = 0;
        const MarkedPointSet sub = restrict_ball(marked, probe.schedule[li], origin_full, &o);
        evals[li] = evaluate_level(fn, sub, o, probe.match_rule);
    }

    XiInfinitySample out;
    out.value = evals.back().defined ? evals.back().value
                                     : std::numeric_limits<double>::quiet_NaN();
    out.r_hat = std::numeric_limits<double>::infinity();
    if (evals.back().defined) {
        for (std::size_t k = 0; k < levels; ++k) {
            bool all = true;
            for (std::size_t j = k; j + 1 < levels; ++j) {
                if (!level_match(evals[j], evals.back(), probe.match_rule, probe.tolerance)) {
                    all = false;
                    break;
                }
            }
            if (all) {
                out.r_hat = probe.schedule[k];
                break;
            }
        }
    }
    if (!(out.r_hat <= probe.schedule[levels - 2])) return out;  // top two must agree

    bool ok = true;
    for (std::size_t j = 0; j < probe.probe_count && ok; ++j) {
        RngStream stream(derive_seed(seed, "limit.probe", j));
        std::size_t o = 0;
        const MarkedPointSet mod =
            probe_edit(marked, fn, tau, out.r_hat, m_max, j % 4, stream, origin_full, &o);
        const LevelEval ev = evaluate_level(fn, mod, o, probe.match_rule);
        if (!level_match(ev, evals.back(), probe.match_rule, probe.tolerance)) ok = false;
    }
    out.stabilized = ok;
    return out;
}

EstimateResult estimate_origin_limit(const OriginFunctional& fn, double tau,
                                     const StabilizationProbe& probe,
                                     std::size_t replicates, std::uint64_t seed,
                                     int dim, unsigned threads) {
    if (replicates < 2)
        throw ConfigError("origin estimates require at least two replicates");
    std::vector<XiInfinitySample> samples(replicates);
    parallel_for_index(replicates, threads, [&](std::size_t r) {
        samples[r] =
            sample_origin_limit(fn, tau, probe, derive_seed(seed, "limit.replicate", r), dim);
    });
    std::vector<double> vals;
    vals.reserve(replicates);
    for (const auto& s : samples)
        if (s.stabilized) vals.push_back(s.value);

    EstimateResult out;
    out.unstabilized_fraction =
        1.0 - static_cast<double>(vals.size()) / static_cast<double>(replicates);
    if (vals.empty())
        throw std::runtime_error("no replicate stabilized within the window schedule");
    out.replicates = vals.size();
    for (double v : vals) out.mean += v;
    out.mean /= static_cast<double>(vals.size());
    if (vals.size() > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - out.mean) * (v - out.mean);
        out.stderr_ = std::sqrt(ss / (static_cast<double>(vals.size() - 1) *
                                      static_cast<double>(vals.size())));
    }
    finish_interval(out);
    return out;
}

EstimateResult incident_weight_constant(const GraphSpec& spec, const WeightFn& phi,
                                        int dim, const StabilizationProbe& probe,
                                        std::size_t replicates, std::uint64_t seed,
                                        unsigned threads) {
    return estimate_origin_limit(origin_half_incident_weight(spec, phi), 1.0, probe,
                                 replicates, seed, dim, threads);
}

EstimateResult rhs_integral(const DensitySpec& density, const OriginFunctional& fn,
                            const StabilizationProbe& probe, std::size_t outer_samples,
                            std::size_t inner_replicates, std::uint64_t seed,
                            unsigned threads) {
    if (outer_samples == 0)
        throw ConfigError("limit integral requires at least one outer sample");
    const int dim = density.dim();

    if (fn.homogeneity_order.has_value()) {
        // separated form: unit-intensity constant times the density integral
        const double gamma = *fn.homogeneity_order;
        const EstimateResult unit = estimate_origin_limit(
            fn, 1.0, probe, inner_replicates, derive_seed(seed, "rhs.unit"), dim, threads);
        double m2 = 1.0, v2 = 0.0;
        if (gamma != 0.0) {
            // importance sampling: integral of f^((d-gamma)/d) = E_f[f^(-gamma/d)]
            const PointSet xs =
                sample_binomial(density, outer_samples, derive_seed(seed, "rhs.outer"));
            std::vector<double> w(outer_samples);
            for (std::size_t j = 0; j < outer_samples; ++j) {
                const double fx = density(xs[j]);
                if (!(fx > 0.0))
                    throw std::runtime_error("sampled a point with zero density");
                w[j] = std::pow(fx, -gamma / static_cast<double>(dim));
            }
            m2 = 0.0;
            for (double v : w) m2 += v;
            m2 /= static_cast<double>(outer_samples);
            if (outer_samples > 1) {
                double ss = 0.0;
                for (double v : w) ss += (v - m2) * (v - m2);
                v2 = ss / (static_cast<double>(outer_samples - 1) *
                           static_cast<double>(outer_samples));
            }
        }
        EstimateResult out;
        const double m1 = unit.mean;
        const double v1 = unit.stderr_ * unit.stderr_;
        out.mean = m1 * m2;
        out.stderr_ = std::sqrt(m1 * m1 * v2 + m2 * m2 * v1 + v1 * v2);
        out.replicates = unit.replicates;
        out.unstabilized_fraction = unit.unstabilized_fraction;
        finish_interval(out);
        return out;
    }

    // nested form: outer x ~ f, inner origin estimate at intensity f(x)
    const PointSet xs = sample_binomial(density, outer_samples, derive_seed(seed, "rhs.outer"));
    std::vector<double> means(outer_samples);
    std::vector<double> unstab(outer_samples);
    for (std::size_t j = 0; j < outer_samples; ++j) {
        const double fx = density(xs[j]);
        if (!(fx > 0.0)) throw std::runtime_error("sampled a point with zero density");
        StabilizationProbe scaled = probe;
        const double factor = std::pow(fx, -1.0 / static_cast<double>(dim));
        for (double& m : scaled.schedule) m *= factor;
        const EstimateResult inner =
            estimate_origin_limit(fn, fx, scaled, inner_replicates,
                                  derive_seed(seed, "rhs.inner", j), dim, threads);
        means[j] = inner.mean;
        unstab[j] = inner.unstabilized_fraction;
    }
    EstimateResult out;
    out.replicates = outer_samples;
    for (double v : means) out.mean += v;
    out.mean /= static_cast<double>(outer_samples);
    if (outer_samples > 1) {
        double ss = 0.0;
        for (double v : means) ss += (v - out.mean) * (v - out.mean);
        out.stderr_ = std::sqrt(ss / (static_cast<double>(outer_samples - 1) *
                                      static_cast<double>(outer_samples)));
    }
    for (double v : unstab) out.unstabilized_fraction += v;
    out.unstabilized_fraction /= static_cast<double>(outer_samples);
    finish_interval(out);
    return out;
}

namespace {

bool same_point_sets(const PointSet& a, const PointSet& b) {
    if (a.size() != b.size() || a.dim() != b.dim()) return false;
    std::vector<std::size_t> pa(a.size()), pb(b.size());
    std::iota(pa.begin(), pa.end(), 0);
    std::iota(pb.begin(), pb.end(), 0);
    std::sort(pa.begin(), pa.end(),
              [&](std::size_t u, std::size_t v) { return lex_less(a[u], a[v]); });
    std::sort(pb.begin(), pb.end(),
              [&](std::size_t u, std::size_t v) { return lex_less(b[u], b[v]); });
    for (std::size_t i = 0; i < pa.size(); ++i)
        if (!coords_equal(a[pa[i]], b[pb[i]])) return false;
    return true;
}

}  // namespace

std::vector<CouplingRow> coupling_match_curve(const DensitySpec& density, double K,
                                              const std::vector<std::size_t>& n_grid,
                                              std::size_t replicates, std::uint64_t seed,
                                              unsigned threads) {
    if (!(K > 0.0)) throw ConfigError("coupling comparison requires a positive radius");
    if (n_grid.empty()) throw ConfigError("coupling curve requires a size grid");
    if (!std::is_sorted(n_grid.begin(), n_grid.end()))
        throw ConfigError("coupling curve size grid must be ascending");
    if (replicates == 0) throw ConfigError("coupling curve requires replicates");
    for (std::size_t n : n_grid)
        if (n < 2) throw ConfigError("coupling curve sizes must be at least 2");

    std::vector<CouplingRow> rows;
    rows.reserve(n_grid.size());
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::size_t n = n_grid[gi];
        std::vector<std::uint8_t> match(replicates, 0);
        parallel_for_index(replicates, threads, [&](std::size_t rep) {
            const CoupledPair cp = sample_coupled_pair(
                density, n, K, derive_seed(seed, "couple", gi * replicates + rep));
            match[rep] = same_point_sets(cp.rescaled_binomial, cp.cox) ? 1 : 0;
        });
        CouplingRow row;
        row.n = n;
        row.replicates = replicates;
        std::size_t hits = 0;
        for (std::uint8_t m : match) hits += m;
        row.match_probability = static_cast<double>(hits) / static_cast<double>(replicates);
        row.stderr_ = std::sqrt(row.match_probability * (1.0 - row.match_probability) /
                                static_cast<double>(replicates));
        rows.push_back(row);
    }
    return rows;
}

void write_coupling_csv(std::ostream& os, const std::vector<CouplingRow>& rows) {
    os << "n,match_probability,stderr,replicates\n";
    for (const auto& r : rows)
        os << r.n << ',' << format_double(r.match_probability) << ','
           << format_double(r.stderr_) << ',' << r.replicates << '\n';
}

void write_coupling_csv_file(const std::string& path,
                             const std::vector<CouplingRow>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file: " + path);
    write_coupling_csv(os, rows);
}

}  // namespace geomlaw
