#include "geomlaw/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "geomlaw/boolean_model.hpp"
#include "geomlaw/delaunay.hpp"
#include "geomlaw/experiment.hpp"
#include "geomlaw/graph_builders.hpp"
#include "geomlaw/limits.hpp"
#include "geomlaw/packing_online.hpp"
#include "geomlaw/point_process.hpp"
#include "geomlaw/rng.hpp"
#include "geomlaw/util.hpp"

namespace geomlaw {

namespace {

namespace fs = std::filesystem;

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("GEOMLAW_SEED");
    if (s == nullptr) return std::nullopt;
    std::uint64_t v = 0;
    const char* end = s + std::strlen(s);
    auto [p, ec] = std::from_chars(s, end, v);
    if (ec != std::errc{} || p != end || s == end)
        throw ConfigError("GEOMLAW_SEED must be an unsigned 64-bit integer");
    return v;
}

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out_dir;
    std::string format = "csv";
    bool validate = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required,
                bool with_out_dir = true) {
    auto* opt = cmd->add_option("--config", flags.config_path, "experiment config JSON");
    if (config_required) opt->required();
    cmd->add_option("--seed", flags.seed, "master seed override");
    cmd->add_option("--threads", flags.threads, "worker threads (0 = all cores)");
    if (with_out_dir) cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--format", flags.format, "primary output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--validate", flags.validate, "validate the config and exit");
}

// seed precedence: environment > --seed flag > config file
ExperimentConfig finalize(ExperimentConfig cfg, const CommonFlags& flags) {
    if (flags.seed.has_value()) cfg.seed = *flags.seed;
    if (auto env = env_seed(); env.has_value()) cfg.seed = *env;
    if (flags.threads.has_value()) cfg.threads = *flags.threads;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (cfg.out_dir.empty()) cfg.out_dir = ".";
    return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

PointSet read_points_auto(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open points file '" + path + "'");
    std::string first;
    if (!std::getline(is, first)) throw ConfigError("points file is empty: " + path);
    const int dim =
        1 + static_cast<int>(std::count(first.begin(), first.end(), ','));
    is.clear();
    is.seekg(0);
    return PointSet::read_csv(is, dim);
}

int handle_validate(const ExperimentConfig& cfg) {
    std::cout << "ok\n" << cfg.echo_json();
    return 0;
}

int cmd_sample(const ExperimentConfig& cfg, std::size_t n_flag, const std::string& fmt) {
    const std::size_t n = n_flag != 0 ? n_flag : cfg.n;
    if (n == 0) throw ConfigError("sample requires n (config \"n\" or --n)");
    const PointSet pts =
        sample_binomial(cfg.density, n, derive_seed(cfg.seed, "sample.points"));
    const std::string path = out_path(cfg, fmt == "json" ? "points.json" : "points.csv");
    if (fmt == "json") {
        nlohmann::ordered_json out;
        out["dim"] = pts.dim();
        out["n"] = pts.size();
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < pts.size(); ++i)
            rows.push_back(std::vector<double>(pts[i].begin(), pts[i].end()));
        out["points"] = rows;
        std::ofstream os(path, std::ios::binary);
        if (!os) throw ConfigError("cannot open output file: " + path);
        os << out.dump(2) << '\n';
    } else {
        pts.write_csv_file(path, true);
    }
    std::cout << "wrote " << path << " (" << pts.size() << " points)\n";
    return 0;
}

int cmd_graph(const std::optional<ExperimentConfig>& cfg, const std::string& kind,
              std::size_t k, bool directed, const std::string& in_path,
              std::string out_file, const std::string& fmt) {
    GraphSpec spec;
    if (!kind.empty())
        spec = GraphSpec::parse(kind, k, directed);
    else if (cfg.has_value() && cfg->graph.has_value())
        spec = *cfg->graph;
    else
        throw ConfigError("graph requires --kind or a config with a graph section");
    if (in_path.empty()) throw ConfigError("graph requires --in points CSV");
    const PointSet pts = read_points_auto(in_path);
    const GeoGraph g = build_graph(spec, pts);
    if (out_file.empty())
        out_file = fmt == "json" ? "graph.json" : "edges.csv";
    if (fmt == "json") {
        std::ofstream os(out_file, std::ios::binary);
        if (!os) throw ConfigError("cannot open output file: " + out_file);
        write_graph_json(os, g, spec);
    } else {
        std::ofstream os(out_file, std::ios::binary);
        if (!os) throw ConfigError("cannot open output file: " + out_file);
        write_edges_csv(os, g);
    }
    std::cout << "wrote " << out_file << " (" << g.edges().size() << " edges)\n";
    return 0;
}

int cmd_functional(const ExperimentConfig& cfg, std::size_t n_flag,
                   const std::string& in_path) {
    if (cfg.functional.empty()) throw ConfigError("/functional: required");
    PointSet pts;
    std::size_t n = 0;
    if (!in_path.empty()) {
        pts = read_points_auto(in_path);
        n = pts.size();
    } else {
        n = n_flag != 0 ? n_flag : cfg.n;
        if (n == 0) throw ConfigError("functional requires n or --in points");
        pts = sample_binomial(cfg.density, n, derive_seed(cfg.seed, "converge.points"));
    }
    const double value = replicate_value(cfg, pts, n, derive_seed(cfg.seed, "converge.marks"));
    const std::string path = out_path(cfg, "functional.csv");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file: " + path);
    os << "n,value\n" << n << ',' << format_double(value) << '\n';
    std::cout << cfg.functional << " at n=" << n << ": " << format_double(value) << '\n';
    return 0;
}

void write_estimate(const ExperimentConfig& cfg, const EstimateResult& est,
                    const std::string& fmt, const std::string& stem) {
    if (fmt == "json") {
        nlohmann::ordered_json out;
        out["mean"] = est.mean;
        out["stderr"] = est.stderr_;
        out["lo"] = est.lo;
        out["hi"] = est.hi;
        out["confidence"] = est.confidence;
        out["replicates"] = est.replicates;
        out["unstabilized_fraction"] = est.unstabilized_fraction;
        const std::string path = out_path(cfg, stem + ".json");
        std::ofstream os(path, std::ios::binary);
        if (!os) throw ConfigError("cannot open output file: " + path);
        os << out.dump(2) << '\n';
        std::cout << "wrote " << path << '\n';
    } else {
        const std::string path = out_path(cfg, stem + ".csv");
        std::ofstream os(path, std::ios::binary);
        if (!os) throw ConfigError("cannot open output file: " + path);
        os << "mean,stderr,lo,hi,replicates,unstabilized_fraction\n"
           << format_double(est.mean) << ',' << format_double(est.stderr_) << ','
           << format_double(est.lo) << ',' << format_double(est.hi) << ','
           << est.replicates << ',' << format_double(est.unstabilized_fraction) << '\n';
        std::cout << "wrote " << path << '\n';
    }
}

int cmd_limit(const ExperimentConfig& cfg, const std::string& fmt) {
    if (cfg.functional.empty()) throw ConfigError("/functional: required");
    const OriginFunctional fn = origin_functional_for(cfg);
    EstimateResult est;
    if (cfg.limit_source == ExperimentConfig::LimitSource::rhs_integral) {
        est = rhs_integral(cfg.density, fn, cfg.probe, cfg.outer_samples,
                           cfg.inner_replicates, derive_seed(cfg.seed, "limit.integral"),
                           cfg.threads);
    } else {
        est = estimate_origin_limit(fn, cfg.tau, cfg.probe, cfg.inner_replicates,
                                    derive_seed(cfg.seed, "limit.estimate"),
                                    cfg.density.dim(), cfg.threads);
    }
    write_estimate(cfg, est, fmt, "limit");
    std::cout << "mean " << format_double(est.mean) << " stderr "
              << format_double(est.stderr_) << " unstabilized "
              << format_double(est.unstabilized_fraction) << '\n';
    return 0;
}

int cmd_converge(const ExperimentConfig& cfg, const std::string& fmt) {
    const ConvergenceReport report = run_convergence(cfg);
    const std::string csv_path = out_path(cfg, "converge.csv");
    write_convergence_csv_file(csv_path, report);
    const std::string json_path = out_path(cfg, "converge_summary.json");
    {
        std::ofstream os(json_path, std::ios::binary);
        if (!os) throw ConfigError("cannot open output file: " + json_path);
        os << convergence_summary_json(cfg, report);
    }
    std::cout << "wrote " << csv_path << " and " << json_path << '\n';
    if (fmt == "json") {
        std::cout << convergence_summary_json(cfg, report);
    } else {
        std::ostringstream ss;
        write_convergence_csv(ss, report);
        std::cout << ss.str();
    }
    return 0;
}

int cmd_couple(const ExperimentConfig& cfg) {
    if (cfg.n_grid.empty()) throw ConfigError("/n_grid: required for coupling runs");
    const auto rows =
        coupling_match_curve(cfg.density, cfg.coupling_radius, cfg.n_grid, cfg.replicates,
                             derive_seed(cfg.seed, "couple"), cfg.threads);
    const std::string path = out_path(cfg, "couple.csv");
    write_coupling_csv_file(path, rows);
    std::cout << "wrote " << path << '\n';
    return 0;
}

int cmd_boolean(const ExperimentConfig& cfg, std::size_t n_flag) {
    if (!cfg.radius.has_value())
        throw ConfigError("/functional/radius: required for boolean scenes");
    const std::size_t n = n_flag != 0 ? n_flag : cfg.n;
    if (n == 0) throw ConfigError("boolean requires n (config \"n\" or --n)");
    const PointSet pts =
        sample_binomial(cfg.density, n, derive_seed(cfg.seed, "boolean.points"));
    const MarkedPointSet marked =
        attach_radius_marks(pts, *cfg.radius, derive_seed(cfg.seed, "boolean.marks"));
    const BooleanScene scene = build_scene(marked, n);
    const ClumpCounts counts = clump_counts(scene);
    const PackingResult packing = offline_packing(scene);

    const std::string scene_path = out_path(cfg, "scene.csv");
    write_scene_csv_file(scene_path, scene, &packing);

    nlohmann::ordered_json out;
    out["n"] = n;
    out["clumps"] = counts.total;
    nlohmann::ordered_json orders = nlohmann::ordered_json::object();
    for (const auto& [k, c] : counts.by_order) orders[std::to_string(k)] = c;
    out["clump_orders"] = orders;
    if (cfg.density.dim() == 2) {
        const VolumeEstimate vol = scene_volume_exact2d(scene, cfg.threads);
        out["volume"] = vol.value;
        const EulerResult euler = euler_curvature_2d(scene, cfg.threads);
        out["chi"] = euler.chi;
        out["total_curvature"] = euler.total_curvature;
    }
    if (cfg.montecarlo_samples > 0) {
        const VolumeEstimate mc = scene_volume_montecarlo(
            scene, cfg.montecarlo_samples, derive_seed(cfg.seed, "boolean.volume"));
        out["volume_montecarlo"] = mc.value;
        out["volume_montecarlo_stderr"] = mc.stderr_;
    }
    out["packed"] = packing.count;
    out["packing_exact"] = packing.exact;
    const std::string json_path = out_path(cfg, "boolean_summary.json");
    std::ofstream os(json_path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file: " + json_path);
    os << out.dump(2) << '\n';
    std::cout << "wrote " << scene_path << " and " << json_path << '\n';
    return 0;
}

int cmd_pack(const ExperimentConfig& cfg) {
    if (cfg.n_grid.empty()) throw ConfigError("/n_grid: required for packing runs");
    const auto rows = rsa_fraction_experiment(cfg.density, cfg.n_grid, cfg.replicates,
                                              cfg.seed, cfg.threads);
    const std::string path = out_path(cfg, "pack.csv");
    write_rsa_csv_file(path, rows);
    std::cout << "wrote " << path << '\n';
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"geometric-functional experiment toolkit"};
    app.require_subcommand(1);

    CommonFlags sample_f, graph_f, functional_f, limit_f, converge_f, couple_f,
        boolean_f, pack_f;
    std::size_t sample_n = 0, functional_n = 0, boolean_n = 0;
    std::string graph_kind, graph_in, graph_out, functional_in;
    std::size_t graph_k = 1;
    bool graph_directed = false;

    auto* sample = app.add_subcommand("sample", "draw points from the config density");
    add_common(sample, sample_f, true);
    sample->add_option("--n", sample_n, "number of points");

    auto* graph = app.add_subcommand("graph", "build a graph from a points CSV");
    add_common(graph, graph_f, false, false);
    graph->add_option("--kind", graph_kind, "graph kind (mst|knn|soi|gabriel|rng|delaunay)");
    graph->add_option("--k", graph_k, "neighbor count for knn");
    graph->add_flag("--directed", graph_directed, "directed knn edges");
    graph->add_option("--in", graph_in, "input points CSV");
    graph->add_option("--out", graph_out, "output edge-list file");

    auto* functional = app.add_subcommand("functional", "evaluate the scaled total once");
    add_common(functional, functional_f, true);
    functional->add_option("--n", functional_n, "number of points");
    functional->add_option("--in", functional_in, "input points CSV");

    auto* limit = app.add_subcommand("limit", "estimate the limiting constant");
    add_common(limit, limit_f, true);

    auto* converge = app.add_subcommand("converge", "run the convergence experiment");
    add_common(converge, converge_f, true);

    auto* couple = app.add_subcommand("couple", "coupling match-probability curve");
    add_common(couple, couple_f, true);

    auto* boolean_cmd = app.add_subcommand("boolean", "build and analyze a ball scene");
    add_common(boolean_cmd, boolean_f, true);
    boolean_cmd->add_option("--n", boolean_n, "number of balls");

    auto* pack = app.add_subcommand("pack", "sequential packing fraction table");
    add_common(pack, pack_f, true);

    try {
        // CLI11 consumes the token vector in reverse order
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        auto load = [](const CommonFlags& f) {
            return finalize(ExperimentConfig::load_file(f.config_path), f);
        };
        if (sample->parsed()) {
            const ExperimentConfig cfg = load(sample_f);
            if (sample_f.validate) return handle_validate(cfg);
            return cmd_sample(cfg, sample_n, sample_f.format);
        }
        if (graph->parsed()) {
            std::optional<ExperimentConfig> cfg;
            if (!graph_f.config_path.empty()) cfg = load(graph_f);
            if (graph_f.validate && cfg.has_value()) return handle_validate(*cfg);
            return cmd_graph(cfg, graph_kind, graph_k, graph_directed, graph_in, graph_out,
                             graph_f.format);
        }
        if (functional->parsed()) {
            const ExperimentConfig cfg = load(functional_f);
            if (functional_f.validate) return handle_validate(cfg);
            return cmd_functional(cfg, functional_n, functional_in);
        }
        if (limit->parsed()) {
            const ExperimentConfig cfg = load(limit_f);
            if (limit_f.validate) return handle_validate(cfg);
            return cmd_limit(cfg, limit_f.format);
        }
        if (converge->parsed()) {
            const ExperimentConfig cfg = load(converge_f);
            if (converge_f.validate) return handle_validate(cfg);
            return cmd_converge(cfg, converge_f.format);
        }
        if (couple->parsed()) {
            const ExperimentConfig cfg = load(couple_f);
            if (couple_f.validate) return handle_validate(cfg);
            return cmd_couple(cfg);
        }
        if (boolean_cmd->parsed()) {
            const ExperimentConfig cfg = load(boolean_f);
            if (boolean_f.validate) return handle_validate(cfg);
            return cmd_boolean(cfg, boolean_n);
        }
        if (pack->parsed()) {
            const ExperimentConfig cfg = load(pack_f);
            if (pack_f.validate) return handle_validate(cfg);
            return cmd_pack(cfg);
        }
        throw ConfigError("no subcommand selected");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace geomlaw
