#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geomlaw/density.hpp"
#include "geomlaw/functionals.hpp"
#include "geomlaw/graph_builders.hpp"
#include "geomlaw/limits.hpp"
#include "geomlaw/point_process.hpp"

namespace geomlaw {

// Parsed and validated experiment description. Parsing reports problems as
// ConfigError with a JSON-pointer-style location, e.g. "/functional/weight".
//
// Functional names: edge_weight, voronoi_weight, component_count,
// pattern_count, clump_count, boolean_volume, euler_w, offline_packing, rsa.
struct ExperimentConfig {
    enum class LimitSource { none, fixed, rhs_integral };

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig load_file(const std::string& path);

    // normalized JSON echo: re-parsing it reproduces this configuration
    const std::string& echo_json() const { return echo_; }

    std::string experiment;  // optional subcommand hint from the file

    DensitySpec density = DensitySpec::uniform_box(Window::box({0.0}, {1.0}));
    std::optional<GraphSpec> graph;
    std::string functional;
    std::optional<WeightFn> weight;
    std::optional<PatternSpec> pattern;
    std::optional<RadiusDist> radius;

    std::vector<std::size_t> n_grid;
    std::size_t replicates = 1;
    std::size_t n = 0;  // single-instance commands; defaults to last of n_grid

    StabilizationProbe probe;  // defaults to the standard unit-intensity one
    double tau = 1.0;          // intensity for direct origin estimates

    LimitSource limit_source = LimitSource::none;
    double limit_value = 0.0;
    std::size_t outer_samples = 64;
    std::size_t inner_replicates = 200;

    double coupling_radius = 1.0;
    std::size_t montecarlo_samples = 0;  // volume cross-check when > 0

    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = all hardware threads
    std::string out_dir;   // optional default output directory

    std::string echo_;  // normalized echo text (set by the parsers)
};

// One convergence row: replicate mean of the scaled total, its standard
// error, and the errors against the limit (NaN when no limit is configured).
struct ConvergenceRow {
    std::size_t n = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double abs_err = 0.0;
    double l2_err = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    ExperimentConfig::LimitSource limit_source = ExperimentConfig::LimitSource::none;
    double limit = 0.0;         // NaN when limit_source == none
    double limit_stderr = 0.0;  // estimation error, reported separately
    double unstabilized_fraction = 0.0;
    double wall_seconds = 0.0;
};

// Per-size replicate experiment for the configured functional; the limit is
// taken from the config (fixed value wins over the estimated integral).
ConvergenceReport run_convergence(const ExperimentConfig& cfg);

// The per-replicate scaled value n^-1 * H (or the scene statistic) that the
// convergence experiment averages; exposed for tests and the CLI.
double replicate_value(const ExperimentConfig& cfg, const PointSet& pts,
                       std::size_t n, std::uint64_t mark_seed);

// Maps the configured functional to its origin form for limit estimation;
// throws ConfigError when the functional has no origin form.
OriginFunctional origin_functional_for(const ExperimentConfig& cfg);

// CSV rows: n,mean,stderr,abs_err,l2_err (header included).
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);
void write_convergence_csv_file(const std::string& path, const ConvergenceReport& report);

// JSON summary: config echo, limit block, rows, wall time.
std::string convergence_summary_json(const ExperimentConfig& cfg,
                                     const ConvergenceReport& report);

}  // namespace geomlaw
