#include "geomlaw/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "geomlaw/boolean_model.hpp"
#include "geomlaw/delaunay.hpp"
#include "geomlaw/packing_online.hpp"
#include "geomlaw/parallel.hpp"
#include "geomlaw/rng.hpp"
#include "geomlaw/util.hpp"

namespace geomlaw {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing required key \"") + key + "\"");
    return *it;
}

double as_double(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

std::size_t as_count(const json& j, const std::string& where) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        fail(where, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

std::vector<double> as_doubles(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_double(j[i], where + "/" + std::to_string(i)));
    return out;
}

std::vector<double> load_numbers_csv(const std::string& path, const std::string& where) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(where, "cannot open file: " + path);
    std::vector<double> out;
    std::string token;
    auto flush = [&]() {
        if (token.empty()) return;
        double v = 0.0;
        const auto* b = token.data();
        const auto* e = b + token.size();
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc{} || p != e)
            fail(where, "not a number in " + path + ": \"" + token + "\"");
        out.push_back(v);
        token.clear();
    };
    char c = 0;
    while (is.get(c)) {
        if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t')
            flush();
        else
            token.push_back(c);
    }
    flush();
    if (out.empty()) fail(where, "no numbers in " + path);
    return out;
}

DensitySpec parse_density(const json& j, const std::string& where, ordered_json& echo) {
    const std::string kind = need(j, "kind", where).get<std::string>();
    echo["kind"] = kind;
    try {
        if (kind == "uniform_box") {
            auto lo = as_doubles(need(j, "lo", where), where + "/lo");
            auto hi = as_doubles(need(j, "hi", where), where + "/hi");
            echo["lo"] = lo;
            echo["hi"] = hi;
            return DensitySpec::uniform_box(Window::box(lo, hi));
        }
        if (kind == "uniform_polygon") {
            const json& v = need(j, "vertices", where);
            if (!v.is_array() || v.size() < 3)
                fail(where + "/vertices", "expected at least three [x,y] rows");
            std::vector<std::array<double, 2>> verts;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const std::string vw = where + "/vertices/" + std::to_string(i);
                if (!v[i].is_array() || v[i].size() != 2) fail(vw, "expected [x,y]");
                verts.push_back({as_double(v[i][0], vw), as_double(v[i][1], vw)});
            }
            echo["vertices"] = v;
            return DensitySpec::uniform_polygon(std::move(verts));
        }
        if (kind == "grid") {
            auto lo = as_doubles(need(j, "lo", where), where + "/lo");
            auto hi = as_doubles(need(j, "hi", where), where + "/hi");
            const json& js = need(j, "shape", where);
            if (!js.is_array() || js.empty()) fail(where + "/shape", "expected an array");
            std::vector<std::size_t> shape;
            for (std::size_t i = 0; i < js.size(); ++i)
                shape.push_back(as_count(js[i], where + "/shape/" + std::to_string(i)));
            std::vector<double> weights;
            if (j.contains("weights_csv"))
                weights = load_numbers_csv(j.at("weights_csv").get<std::string>(),
                                           where + "/weights_csv");
            else
                weights = as_doubles(need(j, "weights", where), where + "/weights");
            echo["lo"] = lo;
            echo["hi"] = hi;
            echo["shape"] = shape;
            echo["weights"] = weights;  // normalized echo is self-contained
            return DensitySpec::grid(Window::box(lo, hi), std::move(shape),
                                     std::move(weights));
        }
        if (kind == "truncated_gaussian") {
            auto mean = as_doubles(need(j, "mean", where), where + "/mean");
            auto sigma = as_doubles(need(j, "sigma", where), where + "/sigma");
            auto lo = as_doubles(need(j, "lo", where), where + "/lo");
            auto hi = as_doubles(need(j, "hi", where), where + "/hi");
            echo["mean"] = mean;
            echo["sigma"] = sigma;
            echo["lo"] = lo;
            echo["hi"] = hi;
            return DensitySpec::truncated_gaussian(std::move(mean), std::move(sigma),
                                                   Window::box(lo, hi));
        }
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.rfind(where, 0) == 0) throw;  // already located
        fail(where, msg);
    }
    fail(where + "/kind", "unknown density kind \"" + kind + "\"");
}

GraphSpec parse_graph(const json& j, const std::string& where, ordered_json& echo) {
    const std::string kind = need(j, "kind", where).get<std::string>();
    std::size_t k = 1;
    bool directed = false;
    if (j.contains("k")) k = as_count(j.at("k"), where + "/k");
    if (j.contains("directed")) {
        if (!j.at("directed").is_boolean()) fail(where + "/directed", "expected a boolean");
        directed = j.at("directed").get<bool>();
    }
    echo["kind"] = kind;
    echo["k"] = k;
    echo["directed"] = directed;
    try {
        return GraphSpec::parse(kind, k, directed);
    } catch (const ConfigError& e) {
        fail(where + "/kind", e.what());
    }
}

WeightFn parse_weight(const json& j, const std::string& where, ordered_json& echo) {
    const std::string kind = need(j, "kind", where).get<std::string>();
    echo["kind"] = kind;
    WeightFn phi = WeightFn::constant(1.0);
    try {
        if (kind == "power") {
            const double alpha = as_double(need(j, "alpha", where), where + "/alpha");
            echo["alpha"] = alpha;
            phi = WeightFn::power(alpha);
        } else if (kind == "indicator") {
            const double t = as_double(need(j, "threshold", where), where + "/threshold");
            echo["threshold"] = t;
            phi = WeightFn::indicator(t);
        } else if (kind == "table") {
            const json& kn = need(j, "knots", where);
            if (!kn.is_array() || kn.empty()) fail(where + "/knots", "expected an array");
            std::vector<std::pair<double, double>> knots;
            for (std::size_t i = 0; i < kn.size(); ++i) {
                const std::string kw = where + "/knots/" + std::to_string(i);
                if (!kn[i].is_array() || kn[i].size() != 2) fail(kw, "expected [x,value]");
                knots.emplace_back(as_double(kn[i][0], kw), as_double(kn[i][1], kw));
            }
            echo["knots"] = kn;
            phi = WeightFn::table(std::move(knots));
        } else if (kind == "constant") {
            const double c = j.contains("value") ? as_double(j.at("value"), where + "/value") : 1.0;
            echo["value"] = c;
            phi = WeightFn::constant(c);
        } else {
            fail(where + "/kind", "unknown weight kind \"" + kind + "\"");
        }
        if (j.contains("value_at_infinity")) {
            const double v = as_double(j.at("value_at_infinity"), where + "/value_at_infinity");
            echo["value_at_infinity"] = v;
            phi = phi.with_value_at_infinity(v);
        }
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.rfind(where, 0) == 0) throw;
        fail(where, msg);
    }
    return phi;
}

PatternSpec parse_pattern(const json& j, const std::string& where, ordered_json& echo) {
    const std::string kind = need(j, "kind", where).get<std::string>();
    echo["kind"] = kind;
    try {
        if (kind == "degree" || kind == "star") {
            const json& jm = need(j, "m", where);
            if (!jm.is_number_integer()) fail(where + "/m", "expected an integer");
            const int m = jm.get<int>();
            echo["m"] = m;
            return kind == "degree" ? PatternSpec::degree(m) : PatternSpec::star(m);
        }
        if (kind == "explicit") {
            const int count =
                static_cast<int>(as_count(need(j, "vertex_count", where), where + "/vertex_count"));
            const json& je = need(j, "edges", where);
            if (!je.is_array()) fail(where + "/edges", "expected an array of [a,b]");
            std::vector<std::pair<int, int>> edges;
            for (std::size_t i = 0; i < je.size(); ++i) {
                const std::string ew = where + "/edges/" + std::to_string(i);
                if (!je[i].is_array() || je[i].size() != 2) fail(ew, "expected [a,b]");
                edges.emplace_back(static_cast<int>(as_count(je[i][0], ew)),
                                   static_cast<int>(as_count(je[i][1], ew)));
            }
            echo["vertex_count"] = count;
            echo["edges"] = je;
            return PatternSpec::explicit_graph(count, std::move(edges));
        }
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.rfind(where, 0) == 0) throw;
        fail(where, msg);
    }
    fail(where + "/kind", "unknown pattern kind \"" + kind + "\"");
}

RadiusDist parse_radius(const json& j, const std::string& where, ordered_json& echo) {
    const std::string kind = need(j, "kind", where).get<std::string>();
    echo["kind"] = kind;
    try {
        if (kind == "constant") {
            const double v = as_double(need(j, "value", where), where + "/value");
            echo["value"] = v;
            return RadiusDist::constant(v);
        }
        if (kind == "uniform") {
            const double lo = as_double(need(j, "lo", where), where + "/lo");
            const double hi = as_double(need(j, "hi", where), where + "/hi");
            echo["lo"] = lo;
            echo["hi"] = hi;
            return RadiusDist::uniform_interval(lo, hi);
        }
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        if (msg.rfind(where, 0) == 0) throw;
        fail(where, msg);
    }
    fail(where + "/kind", "unknown radius kind \"" + kind + "\"");
}

StabilizationProbe parse_probe(const json& j, const std::string& where, int dim,
                               ordered_json& echo) {
    StabilizationProbe probe = StabilizationProbe::standard(1.0, dim);
    if (j.contains("schedule"))
        probe.schedule = as_doubles(j.at("schedule"), where + "/schedule");
    if (j.contains("probe_count"))
        probe.probe_count = as_count(j.at("probe_count"), where + "/probe_count");
    if (j.contains("match_rule")) {
        const std::string rule = j.at("match_rule").get<std::string>();
        if (rule == "value")
            probe.match_rule = StabilizationProbe::MatchRule::value;
        else if (rule == "edge_set")
            probe.match_rule = StabilizationProbe::MatchRule::edge_set;
        else
            fail(where + "/match_rule", "expected \"value\" or \"edge_set\"");
    }
    if (j.contains("tolerance"))
        probe.tolerance = as_double(j.at("tolerance"), where + "/tolerance");
    try {
        probe.validate();
    } catch (const ConfigError& e) {
        fail(where, e.what());
    }
    echo["schedule"] = probe.schedule;
    echo["probe_count"] = probe.probe_count;
    echo["match_rule"] =
        probe.match_rule == StabilizationProbe::MatchRule::value ? "value" : "edge_set";
    echo["tolerance"] = probe.tolerance;
    return probe;
}

const char* limit_source_name(ExperimentConfig::LimitSource s) {
    switch (s) {
        case ExperimentConfig::LimitSource::none: return "none";
        case ExperimentConfig::LimitSource::fixed: return "fixed";
        case ExperimentConfig::LimitSource::rhs_integral: return "rhs_integral";
    }
    return "none";
}

void validate_functional(const ExperimentConfig& cfg) {
    const std::string& name = cfg.functional;
    if (name.empty()) return;
    static const char* known[] = {"edge_weight",   "voronoi_weight", "component_count",
                                  "pattern_count", "clump_count",    "boolean_volume",
                                  "euler_w",       "offline_packing", "rsa"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return name == k; }) == std::end(known))
        fail("/functional/name", "unknown functional \"" + name + "\"");

    const bool needs_graph = name == "edge_weight" || name == "component_count" ||
                             name == "pattern_count";
    if (needs_graph && !cfg.graph.has_value())
        fail("/graph", "required by functional \"" + name + "\"");
    if (name == "edge_weight" && !cfg.weight.has_value())
        fail("/functional/weight", "required by functional \"edge_weight\"");
    if (name == "voronoi_weight") {
        if (cfg.density.dim() != 2)
            fail("/density", "voronoi_weight requires dimension 2");
        if (!cfg.weight.has_value())
            fail("/functional/weight", "required by functional \"voronoi_weight\"");
        if ((*cfg.weight)(std::numeric_limits<double>::infinity()) != 0.0)
            fail("/functional/weight",
                 "voronoi_weight requires a weight with value 0 at infinity");
    }
    if (name == "pattern_count" && !cfg.pattern.has_value())
        fail("/functional/pattern", "required by functional \"pattern_count\"");
    const bool needs_radius = name == "clump_count" || name == "boolean_volume" ||
                              name == "euler_w" || name == "offline_packing";
    if (needs_radius && !cfg.radius.has_value())
        fail("/functional/radius", "required by functional \"" + name + "\"");
    if ((name == "boolean_volume" || name == "euler_w") && cfg.density.dim() != 2)
        fail("/density", name + " requires dimension 2");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("/: expected a JSON object");

    ExperimentConfig cfg;
    ordered_json echo = ordered_json::object();

    if (j.contains("experiment")) {
        if (!j.at("experiment").is_string()) fail("/experiment", "expected a string");
        cfg.experiment = j.at("experiment").get<std::string>();
        echo["experiment"] = cfg.experiment;
    }

    {
        ordered_json de = ordered_json::object();
        cfg.density = parse_density(need(j, "density", "/"), "/density", de);
        echo["density"] = de;
    }
    if (j.contains("graph")) {
        ordered_json ge = ordered_json::object();
        cfg.graph = parse_graph(j.at("graph"), "/graph", ge);
        echo["graph"] = ge;
    }
    if (j.contains("functional")) {
        const json& f = j.at("functional");
        ordered_json fe = ordered_json::object();
        cfg.functional = need(f, "name", "/functional").get<std::string>();
        fe["name"] = cfg.functional;
        if (f.contains("weight")) {
            ordered_json we = ordered_json::object();
            cfg.weight = parse_weight(f.at("weight"), "/functional/weight", we);
            fe["weight"] = we;
        }
        if (f.contains("pattern")) {
            ordered_json pe = ordered_json::object();
            cfg.pattern = parse_pattern(f.at("pattern"), "/functional/pattern", pe);
            fe["pattern"] = pe;
        }
        if (f.contains("radius")) {
            ordered_json re = ordered_json::object();
            cfg.radius = parse_radius(f.at("radius"), "/functional/radius", re);
            fe["radius"] = re;
        }
        echo["functional"] = fe;
    }

    if (j.contains("n_grid")) {
        const json& g = j.at("n_grid");
        if (!g.is_array() || g.empty()) fail("/n_grid", "expected a nonempty array");
        for (std::size_t i = 0; i < g.size(); ++i) {
            const std::size_t n = as_count(g[i], "/n_grid/" + std::to_string(i));
            if (n == 0) fail("/n_grid/" + std::to_string(i), "sizes must be positive");
            cfg.n_grid.push_back(n);
        }
        if (!std::is_sorted(cfg.n_grid.begin(), cfg.n_grid.end()))
            fail("/n_grid", "sizes must be ascending");
        echo["n_grid"] = cfg.n_grid;
    }
    if (j.contains("replicates")) {
        cfg.replicates = as_count(j.at("replicates"), "/replicates");
        if (cfg.replicates == 0) fail("/replicates", "must be positive");
    }
    echo["replicates"] = cfg.replicates;
    if (j.contains("n")) {
        cfg.n = as_count(j.at("n"), "/n");
        if (cfg.n == 0) fail("/n", "must be positive");
    } else if (!cfg.n_grid.empty()) {
        cfg.n = cfg.n_grid.back();
    }
    if (cfg.n != 0) echo["n"] = cfg.n;

    {
        ordered_json pe = ordered_json::object();
        if (j.contains("probe")) {
            cfg.probe = parse_probe(j.at("probe"), "/probe", cfg.density.dim(), pe);
        } else {
            cfg.probe = StabilizationProbe::standard(1.0, cfg.density.dim());
            pe["schedule"] = cfg.probe.schedule;
            pe["probe_count"] = cfg.probe.probe_count;
            pe["match_rule"] = "value";
            pe["tolerance"] = cfg.probe.tolerance;
        }
        echo["probe"] = pe;
    }
    if (j.contains("tau")) {
        cfg.tau = as_double(j.at("tau"), "/tau");
        if (!(cfg.tau > 0.0)) fail("/tau", "must be positive");
    }
    echo["tau"] = cfg.tau;

    if (j.contains("limit")) {
        const json& l = j.at("limit");
        const std::string source = need(l, "source", "/limit").get<std::string>();
        if (source == "none") {
            cfg.limit_source = LimitSource::none;
        } else if (source == "fixed") {
            cfg.limit_source = LimitSource::fixed;
            cfg.limit_value = as_double(need(l, "value", "/limit"), "/limit/value");
        } else if (source == "rhs_integral") {
            cfg.limit_source = LimitSource::rhs_integral;
            if (l.contains("outer_samples")) {
                cfg.outer_samples = as_count(l.at("outer_samples"), "/limit/outer_samples");
                if (cfg.outer_samples == 0) fail("/limit/outer_samples", "must be positive");
            }
            if (l.contains("inner_replicates")) {
                cfg.inner_replicates =
                    as_count(l.at("inner_replicates"), "/limit/inner_replicates");
                if (cfg.inner_replicates < 2)
                    fail("/limit/inner_replicates", "must be at least 2");
            }
        } else {
            fail("/limit/source", "expected \"none\", \"fixed\" or \"rhs_integral\"");
        }
    }
    {
        ordered_json le = ordered_json::object();
        le["source"] = limit_source_name(cfg.limit_source);
        if (cfg.limit_source == LimitSource::fixed) le["value"] = cfg.limit_value;
        if (cfg.limit_source == LimitSource::rhs_integral) {
            le["outer_samples"] = cfg.outer_samples;
            le["inner_replicates"] = cfg.inner_replicates;
        }
        echo["limit"] = le;
    }

    if (j.contains("coupling")) {
        cfg.coupling_radius =
            as_double(need(j.at("coupling"), "radius", "/coupling"), "/coupling/radius");
        if (!(cfg.coupling_radius > 0.0)) fail("/coupling/radius", "must be positive");
        echo["coupling"] = ordered_json{{"radius", cfg.coupling_radius}};
    }
    if (j.contains("montecarlo_samples")) {
        cfg.montecarlo_samples = as_count(j.at("montecarlo_samples"), "/montecarlo_samples");
        echo["montecarlo_samples"] = cfg.montecarlo_samples;
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) fail("/seed", "expected an unsigned integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    echo["seed"] = cfg.seed;
    if (j.contains("threads")) cfg.threads = static_cast<unsigned>(as_count(j.at("threads"), "/threads"));
    echo["threads"] = cfg.threads;
    if (j.contains("out")) {
        if (!j.at("out").is_string()) fail("/out", "expected a string");
        cfg.out_dir = j.at("out").get<std::string>();
        echo["out"] = cfg.out_dir;
    }

    validate_functional(cfg);
    cfg.echo_ = echo.dump(2) + "\n";
    return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return from_json_text(ss.str());
}

double replicate_value(const ExperimentConfig& cfg, const PointSet& pts,
                       std::size_t n, std::uint64_t mark_seed) {
    const int d = cfg.density.dim();
    const double scale = std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d));
    const double dn = static_cast<double>(n);
    const std::string& name = cfg.functional;

    if (name == "edge_weight")
        return weighted_length(build_graph(*cfg.graph, pts), *cfg.weight, scale) / dn;
    if (name == "voronoi_weight")
        // tessellation length is measured inside the sampling window so that
        // boundary cells do not contribute their exterior dual geometry
        return weighted_length(delaunay_voronoi_2d(pts, cfg.density.bounding_box()),
                               *cfg.weight, scale) /
               dn;
    if (name == "component_count")
        return static_cast<double>(component_count(build_graph(*cfg.graph, pts))) / dn;
    if (name == "pattern_count")
        return static_cast<double>(
                   vertex_pattern_count(build_graph(*cfg.graph, pts), *cfg.pattern)) /
               dn;
    if (name == "clump_count" || name == "boolean_volume" || name == "euler_w" ||
        name == "offline_packing") {
        const MarkedPointSet marked = attach_radius_marks(pts, *cfg.radius, mark_seed);
        const BooleanScene scene = build_scene(marked, n);
        if (name == "clump_count")
            return static_cast<double>(clump_counts(scene).total) / dn;
        if (name == "boolean_volume") return scene_volume_exact2d(scene).value;
        if (name == "euler_w") return euler_curvature_2d(scene).total_curvature / dn;
        return static_cast<double>(offline_packing(scene).count) / dn;
    }
    if (name == "rsa") {
        const MarkedPointSet marked = attach_arrival_marks(pts, mark_seed);
        return static_cast<double>(rsa_pack(marked, n).count) / dn;
    }
    throw ConfigError("/functional/name: unknown functional \"" + name + "\"");
}

OriginFunctional origin_functional_for(const ExperimentConfig& cfg) {
    const std::string& name = cfg.functional;
    if (name == "edge_weight") return origin_half_incident_weight(*cfg.graph, *cfg.weight);
    if (name == "voronoi_weight") return origin_half_dual_length(*cfg.weight);
    if (name == "component_count") return origin_reciprocal_component_order(*cfg.graph);
    if (name == "pattern_count") return origin_pattern_indicator(*cfg.graph, *cfg.pattern);
    if (name == "clump_count") return origin_reciprocal_clump_order(*cfg.radius);
    if (name == "rsa") return origin_rsa_indicator();
    throw ConfigError("/limit/source: rhs_integral is not available for functional \"" +
                      name + "\"");
}

ConvergenceReport run_convergence(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.functional.empty())
        throw ConfigError("/functional: required for convergence runs");
    if (cfg.n_grid.empty()) throw ConfigError("/n_grid: required for convergence runs");

    ConvergenceReport report;
    report.limit_source = cfg.limit_source;
    report.limit = std::numeric_limits<double>::quiet_NaN();
    if (cfg.limit_source == ExperimentConfig::LimitSource::fixed) {
        report.limit = cfg.limit_value;
    } else if (cfg.limit_source == ExperimentConfig::LimitSource::rhs_integral) {
        const EstimateResult est =
            rhs_integral(cfg.density, origin_functional_for(cfg), cfg.probe,
                         cfg.outer_samples, cfg.inner_replicates,
                         derive_seed(cfg.seed, "limit.integral"), cfg.threads);
        report.limit = est.mean;
        report.limit_stderr = est.stderr_;
        report.unstabilized_fraction = est.unstabilized_fraction;
    }

    for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
        const std::size_t n = cfg.n_grid[gi];
        std::vector<double> vals(cfg.replicates, 0.0);
        parallel_for_index(cfg.replicates, cfg.threads, [&](std::size_t rep) {
            const std::uint64_t pseed =
                derive_seed(cfg.seed, "converge.points", gi * cfg.replicates + rep);
            const std::uint64_t mseed =
                derive_seed(cfg.seed, "converge.marks", gi * cfg.replicates + rep);
            const PointSet pts = sample_binomial(cfg.density, n, pseed);
            vals[rep] = replicate_value(cfg, pts, n, mseed);
        });
        ConvergenceRow row;
        row.n = n;
        for (double v : vals) row.mean += v;
        row.mean /= static_cast<double>(vals.size());
        if (vals.size() > 1) {
            double ss = 0.0;
            for (double v : vals) ss += (v - row.mean) * (v - row.mean);
            row.stderr_ = std::sqrt(ss / (static_cast<double>(vals.size() - 1) *
                                          static_cast<double>(vals.size())));
        }
        if (std::isnan(report.limit)) {
            row.abs_err = std::numeric_limits<double>::quiet_NaN();
            row.l2_err = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.abs_err = std::abs(row.mean - report.limit);
            double sq = 0.0;
            for (double v : vals) sq += (v - report.limit) * (v - report.limit);
            row.l2_err = std::sqrt(sq / static_cast<double>(vals.size()));
        }
        report.rows.push_back(row);
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
    os << "n,mean,stderr,abs_err,l2_err\n";
    for (const auto& r : report.rows)
        os << r.n << ',' << format_double(r.mean) << ',' << format_double(r.stderr_) << ','
           << format_double(r.abs_err) << ',' << format_double(r.l2_err) << '\n';
}

void write_convergence_csv_file(const std::string& path, const ConvergenceReport& report) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file: " + path);
    write_convergence_csv(os, report);
}

std::string convergence_summary_json(const ExperimentConfig& cfg,
                                     const ConvergenceReport& report) {
    ordered_json out;
    out["config"] = ordered_json::parse(cfg.echo_json());
    ordered_json lim;
    lim["source"] = limit_source_name(report.limit_source);
    if (std::isnan(report.limit))
        lim["value"] = nullptr;
    else
        lim["value"] = report.limit;
    lim["stderr"] = report.limit_stderr;
    lim["unstabilized_fraction"] = report.unstabilized_fraction;
    out["limit"] = lim;
    ordered_json rows = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json row;
        row["n"] = r.n;
        row["mean"] = r.mean;
        row["stderr"] = r.stderr_;
        if (std::isnan(r.abs_err)) {
            row["abs_err"] = nullptr;
            row["l2_err"] = nullptr;
        } else {
            row["abs_err"] = r.abs_err;
            row["l2_err"] = r.l2_err;
        }
        rows.push_back(row);
    }
    out["rows"] = rows;
    out["wall_seconds"] = report.wall_seconds;
    return out.dump(2) + "\n";
}

}  // namespace geomlaw
