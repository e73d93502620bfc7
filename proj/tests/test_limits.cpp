#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "geomlaw/density.hpp"
#include "geomlaw/graph_builders.hpp"
#include "geomlaw/limits.hpp"
#include "geomlaw/point_set.hpp"
#include "geomlaw/util.hpp"

using namespace geomlaw;

namespace {

constexpr double kZ = 1.959963984540054;  // two-sided 95% normal quantile

double combined_gap_sigmas(const EstimateResult& a, const EstimateResult& b) {
    return std::abs(a.mean - b.mean) /
           std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
}

}  // namespace

TEST_CASE("standard probe schedule doubles from the intensity scale") {
    const StabilizationProbe probe = StabilizationProbe::standard(4.0, 2);
    REQUIRE(probe.schedule.size() == 5);
    const double base = std::pow(4.0, -0.5);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(probe.schedule[i] == doctest::Approx(base * std::pow(2.0, i)));
    CHECK(probe.probe_count == 8);
    CHECK_NOTHROW(probe.validate());

    StabilizationProbe bad = probe;
    bad.schedule = {2.0, 1.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = probe;
    bad.schedule.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = probe;
    bad.tolerance = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("fixed-radius count stabilizes at the first level covering it") {
    const double rho = 1.7;
    const OriginFunctional fn = origin_fixed_radius_count(rho);
    const StabilizationProbe probe = StabilizationProbe::standard(1.0, 2);
    // schedule is {1,2,4,8,16}; the count inside B(0;1.7) is already final
    // once the window reaches 2
    int stabilized = 0;
    for (int rep = 0; rep < 40; ++rep) {
        const XiInfinitySample s =
            sample_origin_limit(fn, 1.0, probe, derive_seed(5, "frc", rep), 2);
        REQUIRE(s.stabilized);
        CHECK(s.r_hat == doctest::Approx(2.0));
        CHECK(s.value == doctest::Approx(std::round(s.value)));  // integer count
        CHECK(s.r_hat <= probe.schedule[probe.schedule.size() - 2]);
        ++stabilized;
    }
    CHECK(stabilized == 40);

    // the estimated mean is the expected count: tau * pi * rho^2
    const EstimateResult est = estimate_origin_limit(fn, 1.0, probe, 400, 11, 2, 2);
    CHECK(est.unstabilized_fraction == 0.0);
    CHECK(est.replicates == 400);
    const double want = kPi * rho * rho;
    CHECK(std::abs(est.mean - want) < 3.0 * est.stderr_);
    CHECK(est.lo == doctest::Approx(est.mean - kZ * est.stderr_));
    CHECK(est.hi == doctest::Approx(est.mean + kZ * est.stderr_));
}

TEST_CASE("constant functional estimates itself with zero spread") {
    const OriginFunctional fn = origin_constant(2.75);
    const StabilizationProbe probe = StabilizationProbe::standard(1.0, 2);
    const EstimateResult est = estimate_origin_limit(fn, 1.0, probe, 50, 3, 2);
    CHECK(est.mean == doctest::Approx(2.75));
    CHECK(est.stderr_ == doctest::Approx(0.0));
    CHECK(est.unstabilized_fraction == 0.0);
}

TEST_CASE("estimates are deterministic in the seed") {
    const OriginFunctional fn =
        origin_half_incident_weight(GraphSpec::parse("knn", 1), WeightFn::power(1.0));
    const StabilizationProbe probe = StabilizationProbe::standard(1.0, 2);
    const EstimateResult a = estimate_origin_limit(fn, 1.0, probe, 60, 9, 2, 1);
    const EstimateResult b = estimate_origin_limit(fn, 1.0, probe, 60, 9, 2, 3);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(a.unstabilized_fraction == b.unstabilized_fraction);
    CHECK(a.mean > 0.0);
}

TEST_CASE("an impossible schedule reports total failure") {
    const OriginFunctional fn =
        origin_half_incident_weight(GraphSpec::parse("mst"), WeightFn::power(1.0));
    StabilizationProbe probe = StabilizationProbe::standard(1.0, 2);
    probe.schedule = {0.001, 0.002};  // windows far below the interpoint scale
    CHECK_THROWS_AS(
        (void)estimate_origin_limit(fn, 1.0, probe, 10, 1, 2), std::runtime_error);
}

TEST_CASE("edge-set match rule stabilizes local graphs") {
    OriginFunctional fn =
        origin_half_incident_weight(GraphSpec::parse("knn", 1), WeightFn::power(1.0));
    StabilizationProbe probe = StabilizationProbe::standard(1.0, 2);
    probe.match_rule = StabilizationProbe::MatchRule::edge_set;
    const EstimateResult est = estimate_origin_limit(fn, 1.0, probe, 80, 21, 2, 2);
    CHECK(est.unstabilized_fraction < 0.5);
    CHECK(est.mean > 0.0);
    // the value rule on the same stream gives a statistically compatible mean
    const StabilizationProbe vp = StabilizationProbe::standard(1.0, 2);
    const EstimateResult vest = estimate_origin_limit(fn, 1.0, vp, 80, 21, 2, 2);
    CHECK(combined_gap_sigmas(est, vest) < 3.0);
}

TEST_CASE("edge-set rule requires a graph or cell structure") {
    const OriginFunctional fn = origin_fixed_radius_count(1.0);
    StabilizationProbe probe = StabilizationProbe::standard(1.0, 2);
    probe.match_rule = StabilizationProbe::MatchRule::edge_set;
    CHECK_THROWS_AS((void)sample_origin_limit(fn, 1.0, probe, 1, 2), ConfigError);
}

TEST_CASE("cell boundary functional rejects weights with heavy tails") {
    CHECK_THROWS_AS((void)origin_half_dual_length(WeightFn::power(1.0)), ConfigError);
    CHECK_NOTHROW(
        (void)origin_half_dual_length(WeightFn::power(1.0).with_value_at_infinity(0.0)));
}

TEST_CASE("intensity scaling of the one-nearest-neighbor edge weight") {
    // gamma = 1 homogeneity: the half edge weight at intensity tau scales
    // like tau^(-1/d); compare tau = 1 against tau = 4 in d = 2 (factor 2)
    const GraphSpec spec = GraphSpec::parse("knn", 1);
    const WeightFn phi = WeightFn::power(1.0);
    const StabilizationProbe p1 = StabilizationProbe::standard(1.0, 2);
    const StabilizationProbe p4 = StabilizationProbe::standard(4.0, 2);
    const EstimateResult at1 =
        incident_weight_constant(spec, phi, 2, p1, 300, 31, 2);
    const EstimateResult at4 =
        incident_weight_constant(spec, phi, 2, p4, 300, 32, 2);
    EstimateResult doubled = at4;
    doubled.mean *= 2.0;
    doubled.stderr_ *= 2.0;
    CHECK(combined_gap_sigmas(at1, doubled) < 3.0);
    CHECK(at1.mean > 0.0);
}

TEST_CASE("separated shortcut matches the nested integral route") {
    // half incident 1-NN edge weight is 1-homogeneous, so the shortcut
    // applies; erasing the declared order forces the nested route. Both
    // estimate the same density-weighted integral.
    const DensitySpec density = DensitySpec::uniform_box(
        Window::box({0.0, 0.0}, {2.0, 2.0}));  // f = 1/4 on a 4-area box
    const GraphSpec spec = GraphSpec::parse("knn", 1);
    const WeightFn phi = WeightFn::power(1.0);
    const StabilizationProbe probe = StabilizationProbe::standard(1.0, 2);

    OriginFunctional fn = origin_half_incident_weight(spec, phi);
    REQUIRE(fn.homogeneity_order.has_value());
    CHECK(*fn.homogeneity_order == doctest::Approx(1.0));
    const EstimateResult fast = rhs_integral(density, fn, probe, 64, 200, 41, 2);

    OriginFunctional nested = fn;
    nested.homogeneity_order.reset();
    const EstimateResult slow = rhs_integral(density, nested, probe, 24, 40, 42, 2);

    CHECK(combined_gap_sigmas(fast, slow) < 3.0);

    // the shortcut equals the unit constant times integral f^{1/2} = 2
    const EstimateResult unit =
        incident_weight_constant(spec, phi, 2, probe, 400, 43, 2);
    EstimateResult twice = unit;
    twice.mean *= 2.0;
    twice.stderr_ *= 2.0;
    CHECK(combined_gap_sigmas(fast, twice) < 3.0);
}

TEST_CASE("density independence of a scale-free functional") {
    // the reciprocal component order of the 1-NN graph is 0-homogeneous:
    // its density-weighted integral is the same for any density
    const OriginFunctional fn =
        origin_reciprocal_component_order(GraphSpec::parse("knn", 1));
    REQUIRE(fn.homogeneity_order.has_value());
    CHECK(*fn.homogeneity_order == doctest::Approx(0.0));
    const StabilizationProbe probe = StabilizationProbe::standard(1.0, 2);

    const DensitySpec uniform =
        DensitySpec::uniform_box(Window::box({0.0, 0.0}, {1.0, 1.0}));
    const DensitySpec two_level = DensitySpec::grid(
        Window::box({0.0, 0.0}, {1.0, 1.0}), {2, 1}, {1.0, 4.0});

    const EstimateResult a = rhs_integral(uniform, fn, probe, 32, 150, 51, 2);
    const EstimateResult b = rhs_integral(two_level, fn, probe, 32, 150, 52, 2);
    CHECK(combined_gap_sigmas(a, b) < 3.0);
    // gamma = 0 means the density factor is exactly 1 with no extra spread:
    // the outer importance-sampling factor has zero variance
    CHECK(a.mean > 0.05);
    CHECK(a.mean < 1.0);
}

TEST_CASE("coupling match curve rises toward certain agreement") {
    const DensitySpec density =
        DensitySpec::uniform_box(Window::box({0.0, 0.0}, {1.0, 1.0}));
    const std::vector<std::size_t> grid = {50, 500, 5000};
    const auto rows = coupling_match_curve(density, 1.26, grid, 120, 61, 2);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].n == grid[i]);
        CHECK(rows[i].replicates == 120);
        CHECK(rows[i].match_probability >= 0.0);
        CHECK(rows[i].match_probability <= 1.0);
    }
    // nondecreasing within two sigma, and the top level nearly always matches
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double slack = 2.0 * std::sqrt(rows[i].stderr_ * rows[i].stderr_ +
                                             rows[i - 1].stderr_ * rows[i - 1].stderr_);
        CHECK(rows[i].match_probability >= rows[i - 1].match_probability - slack);
    }
    CHECK(rows.back().match_probability > 0.8);

    const auto again = coupling_match_curve(density, 1.26, grid, 120, 61, 1);
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(again[i].match_probability == rows[i].match_probability);

    CHECK_THROWS_AS((void)coupling_match_curve(density, 0.0, grid, 10, 1), ConfigError);
    CHECK_THROWS_AS((void)coupling_match_curve(density, 1.0, {500, 50}, 10, 1),
                    ConfigError);
}

TEST_CASE("coupling csv shape") {
    std::vector<CouplingRow> rows = {{10, 0.75, 0.04330127018922193, 100}};
    std::ostringstream os;
    write_coupling_csv(os, rows);
    CHECK(os.str() ==
          "n,match_probability,stderr,replicates\n10,0.75,0.04330127018922193,100\n");
}
