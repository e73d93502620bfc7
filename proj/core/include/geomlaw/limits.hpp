#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geomlaw/delaunay.hpp"
#include "geomlaw/density.hpp"
#include "geomlaw/functionals.hpp"
#include "geomlaw/geo_graph.hpp"
#include "geomlaw/graph_builders.hpp"
#include "geomlaw/point_process.hpp"

namespace geomlaw {

// Empirical stabilization detector settings. The origin's contribution is
// evaluated on nested windows B(0;m) for m in the schedule; it counts as
// stabilized when the top two levels agree under the match rule and the
// agreement survives randomized edits confined outside the detected radius.
struct StabilizationProbe {
    enum class MatchRule { value, edge_set };

    std::vector<double> schedule;   // strictly increasing window radii
    std::size_t probe_count = 8;    // randomized outside edits per sample
    MatchRule match_rule = MatchRule::value;
    double tolerance = 1e-12;  // relative tolerance for the value rule

    // radii {1,2,4,8,16} * tau^(-1/dim): doubling windows at the natural
    // interpoint scale of a homogeneous process of the given intensity
    static StabilizationProbe standard(double tau, int dim);
    void validate() const;
};

struct XiInfinitySample {
    double value = 0.0;     // origin contribution on the largest window
    bool stabilized = false;
    double r_hat = 0.0;  // first radius from which all later levels match
};

struct EstimateResult {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t replicates = 0;  // stabilized samples that entered the mean
    double confidence = 0.95;
    double lo = 0.0, hi = 0.0;           // confidence interval around mean
    double unstabilized_fraction = 0.0;  // quality metric, never hidden
};

// Everything a per-origin functional may look at for one window level.
struct OriginContext {
    const MarkedPointSet& marked;
    std::size_t origin;                   // index of the origin point
    const GeoGraph* graph = nullptr;      // built when graph_spec is set
    const VoronoiDiagram* voronoi = nullptr;  // built when needs_voronoi
};

// A functional of the origin of a (marked) point configuration, together
// with the structure it needs and its scaling order when one is known.
struct OriginFunctional {
    enum class Marks { none, radius, arrival };

    std::string name;
    std::optional<GraphSpec> graph_spec;
    bool needs_voronoi = false;  // build the planar cell diagram per level
    Marks marks = Marks::none;
    std::optional<RadiusDist> radius_dist;  // required when marks == radius
    // order gamma with value(a*X) = a^gamma * value(X); enables the
    // separated-integral shortcut in rhs_integral
    std::optional<double> homogeneity_order;
    std::function<double(const OriginContext&)> value;
};

OriginFunctional origin_constant(double c);
// number of other points within closed distance rho of the origin;
// stabilizes exactly at the first schedule level >= rho
OriginFunctional origin_fixed_radius_count(double rho);
// half the phi-weighted edge sum at the origin (in-edges, unhalved, for
// directed graphs so that vertex sums match the total edge weight)
OriginFunctional origin_half_incident_weight(GraphSpec spec, WeightFn phi);
// reciprocal of the order of the origin's connected component
OriginFunctional origin_reciprocal_component_order(GraphSpec spec);
// indicator that the origin participates in the given local pattern
OriginFunctional origin_pattern_indicator(GraphSpec spec, PatternSpec pattern);
// half the phi-weighted boundary of the origin's planar cell; requires
// phi(infinity) == 0 so unbounded cells contribute finitely
OriginFunctional origin_half_dual_length(WeightFn phi);
// reciprocal clump order of the origin's ball among radius-marked balls
OriginFunctional origin_reciprocal_clump_order(RadiusDist dist);
// indicator that the origin's unit-volume ball is kept by arrival-order
// sequential packing
OriginFunctional origin_rsa_indicator();

// One stabilization-checked sample of the origin functional on a homogeneous
// process of intensity tau (origin adjoined). Levels whose structure build
// rejects the configuration are undefined and never match.
XiInfinitySample sample_origin_limit(const OriginFunctional& fn, double tau,
                                     const StabilizationProbe& probe,
                                     std::uint64_t seed, int dim);

// Monte Carlo mean over stabilized samples; the unstabilized fraction is
// reported. Throws when every replicate fails to stabilize.
EstimateResult estimate_origin_limit(const OriginFunctional& fn, double tau,
                                     const StabilizationProbe& probe,
                                     std::size_t replicates, std::uint64_t seed,
                                     int dim, unsigned threads = 1);

// The weighted-graph limiting constant: half the expected phi-weighted edge
// sum at the origin of the unit-intensity process.
EstimateResult incident_weight_constant(const GraphSpec& spec, const WeightFn& phi,
                                        int dim, const StabilizationProbe& probe,
                                        std::size_t replicates, std::uint64_t seed,
                                        unsigned threads = 1);

// The density-weighted limit integral: outer draws x ~ f, inner estimates of
// the origin expectation at intensity f(x). When the functional declares a
// homogeneity order gamma, the separated shortcut is used instead: the unit
// intensity constant times E_f[f^(-gamma/dim)] by importance sampling. The
// probe schedule is interpreted at unit intensity and rescaled per level.
EstimateResult rhs_integral(const DensitySpec& density, const OriginFunctional& fn,
                            const StabilizationProbe& probe, std::size_t outer_samples,
                            std::size_t inner_replicates, std::uint64_t seed,
                            unsigned threads = 1);

struct CouplingRow {
    std::size_t n = 0;
    double match_probability = 0.0;
    double stderr_ = 0.0;
    std::size_t replicates = 0;
};

// Fraction of replicates in which the recentred rescaled sample and its
// constant-intensity coupling agree exactly inside the comparison ball.
std::vector<CouplingRow> coupling_match_curve(const DensitySpec& density, double K,
                                              const std::vector<std::size_t>& n_grid,
                                              std::size_t replicates, std::uint64_t seed,
                                              unsigned threads = 1);

// CSV rows: n,match_probability,stderr,replicates (header included).
void write_coupling_csv(std::ostream& os, const std::vector<CouplingRow>& rows);
void write_coupling_csv_file(const std::string& path,
                             const std::vector<CouplingRow>& rows);

}  // namespace geomlaw
