#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <queue>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "geomlaw/boolean_model.hpp"
#include "geomlaw/disk_geometry.hpp"
#include "geomlaw/functionals.hpp"
#include "geomlaw/point_process.hpp"
#include "geomlaw/point_set.hpp"
#include "geomlaw/rng.hpp"
#include "geomlaw/util.hpp"

using namespace geomlaw;

namespace {

using Center = std::array<double, 2>;

struct MonteCarlo {
    double area = 0.0;
    double sigma = 0.0;
};

// hit-count area of {x : pred(x)} over the box [lo, hi]^2
template <class Pred>
MonteCarlo mc_area(const Center& lo, const Center& hi, std::uint64_t seed,
                   std::size_t samples, Pred pred) {
    RngStream rng(seed);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = rng.uniform(lo[0], hi[0]);
        const double y = rng.uniform(lo[1], hi[1]);
        if (pred(x, y)) ++hits;
    }
    const double box = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {box * p, box * std::sqrt(p * (1 - p) / static_cast<double>(samples))};
}

bool in_disk(const Center& c, double r, double x, double y) {
    const double dx = x - c[0], dy = y - c[1];
    return dx * dx + dy * dy <= r * r;
}

Center bound_lo(std::span<const Center> cs, std::span<const double> rs) {
    Center lo = {1e300, 1e300};
    for (std::size_t i = 0; i < cs.size(); ++i) {
        lo[0] = std::min(lo[0], cs[i][0] - rs[i]);
        lo[1] = std::min(lo[1], cs[i][1] - rs[i]);
    }
    return lo;
}

Center bound_hi(std::span<const Center> cs, std::span<const double> rs) {
    Center hi = {-1e300, -1e300};
    for (std::size_t i = 0; i < cs.size(); ++i) {
        hi[0] = std::max(hi[0], cs[i][0] + rs[i]);
        hi[1] = std::max(hi[1], cs[i][1] + rs[i]);
    }
    return hi;
}

MarkedPointSet random_scene_input(int n, std::uint64_t seed, double rlo, double rhi) {
    RngStream rng(seed);
    PointSet pts(2);
    for (int i = 0; i < n; ++i) pts.add({rng.uniform01(), rng.uniform01()});
    return attach_radius_marks(std::move(pts),
                               RadiusDist::uniform_interval(rlo, rhi),
                               derive_seed(seed, "marks"));
}

// exhaustive maximum independent set on <= 20 vertices
std::size_t mis_oracle(std::size_t n, const std::vector<std::uint32_t>& adj_mask) {
    std::size_t best = 0;
    for (std::uint32_t s = 0; s < (1u << n); ++s) {
        bool ok = true;
        for (std::size_t v = 0; v < n && ok; ++v)
            if ((s >> v & 1u) && (s & adj_mask[v])) ok = false;
        if (ok) best = std::max<std::size_t>(best, std::popcount(s));
    }
    return best;
}

// connected groups of pairwise-overlapping disks (breadth-first search over
// the overlap graph); the union of such a group is itself connected, so the
// component count of the whole union equals the group count exactly
std::vector<std::vector<std::size_t>> overlap_groups(std::span<const Center> cs,
                                                     std::span<const double> rs) {
    const std::size_t n = cs.size();
    std::vector<char> seen(n, 0);
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        groups.emplace_back();
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = 1;
        while (!q.empty()) {
            const std::size_t i = q.front();
            q.pop();
            groups.back().push_back(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (seen[j]) continue;
                if (std::hypot(cs[i][0] - cs[j][0], cs[i][1] - cs[j][1]) <=
                    rs[i] + rs[j]) {
                    seen[j] = 1;
                    q.push(j);
                }
            }
        }
    }
    return groups;
}

// holes of one disk group on a two-tier raster. Pixel centers decide
// adjacency (8-connected background), but a candidate pocket only counts as
// a hole when it contains at least one *certified* pixel whose entire square
// provably lies outside every disk. Boundary-straddling fragments such as
// cusp tips pinched off by a foreground pixel can never produce a certified
// pixel, so they are discarded instead of inflating the census.
long long certified_holes(std::span<const Center> cs, std::span<const double> rs,
                          const std::vector<std::size_t>& group,
                          std::size_t res) {
    Center lo = {1e300, 1e300}, hi = {-1e300, -1e300};
    for (std::size_t i : group) {
        lo[0] = std::min(lo[0], cs[i][0] - rs[i]);
        lo[1] = std::min(lo[1], cs[i][1] - rs[i]);
        hi[0] = std::max(hi[0], cs[i][0] + rs[i]);
        hi[1] = std::max(hi[1], cs[i][1] + rs[i]);
    }
    const double px =
        std::max(hi[0] - lo[0], hi[1] - lo[1]) / static_cast<double>(res);
    lo = {lo[0] - 3.0 * px, lo[1] - 3.0 * px};
    const std::size_t w =
        static_cast<std::size_t>(std::ceil((hi[0] - lo[0]) / px)) + 4;
    const std::size_t h =
        static_cast<std::size_t>(std::ceil((hi[1] - lo[1]) / px)) + 4;
    const double halfdiag = px * std::sqrt(0.5);
    std::vector<char> blocked(w * h, 0);  // pixel centre inside some disk
    std::vector<char> cert(w * h, 1);     // whole pixel square outside all
    for (std::size_t i : group) {
        const double reach = rs[i] + halfdiag;
        const auto x0 = static_cast<long long>(
            std::max(0.0, std::floor((cs[i][0] - reach - lo[0]) / px) - 1.0));
        const auto y0 = static_cast<long long>(
            std::max(0.0, std::floor((cs[i][1] - reach - lo[1]) / px) - 1.0));
        const long long x1 = std::min<long long>(
            w - 1, static_cast<long long>((cs[i][0] + reach - lo[0]) / px) + 1);
        const long long y1 = std::min<long long>(
            h - 1, static_cast<long long>((cs[i][1] + reach - lo[1]) / px) + 1);
        for (long long iy = y0; iy <= y1; ++iy)
            for (long long ix = x0; ix <= x1; ++ix) {
                const double x = lo[0] + (static_cast<double>(ix) + 0.5) * px;
                const double y = lo[1] + (static_cast<double>(iy) + 0.5) * px;
                const std::size_t idx = static_cast<std::size_t>(iy) * w +
                                        static_cast<std::size_t>(ix);
                // the square is certified outside the disk when even its
                // nearest point (per-axis clamp) clears the radius
                const double qx =
                    std::max(std::abs(cs[i][0] - x) - 0.5 * px, 0.0);
                const double qy =
                    std::max(std::abs(cs[i][1] - y) - 0.5 * px, 0.0);
                if (std::hypot(qx, qy) < rs[i]) cert[idx] = 0;
                if (std::hypot(x - cs[i][0], y - cs[i][1]) < rs[i])
                    blocked[idx] = 1;
            }
    }
    std::vector<char> vis(w * h, 0);
    // flood one free component; report whether it holds a certified pixel
    auto flood = [&](std::size_t start) {
        bool has_cert = false;
        std::queue<std::size_t> q;
        q.push(start);
        vis[start] = 1;
        while (!q.empty()) {
            const std::size_t cur = q.front();
            q.pop();
            if (cert[cur]) has_cert = true;
            const auto cy = static_cast<long long>(cur / w);
            const auto cx = static_cast<long long>(cur % w);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const long long ny = cy + dy, nx = cx + dx;
                    if (ny < 0 || nx < 0 || ny >= static_cast<long long>(h) ||
                        nx >= static_cast<long long>(w))
                        continue;
                    const std::size_t idx =
                        static_cast<std::size_t>(ny) * w +
                        static_cast<std::size_t>(nx);
                    if (!blocked[idx] && !vis[idx]) {
                        vis[idx] = 1;
                        q.push(idx);
                    }
                }
        }
        return has_cert;
    };
    for (std::size_t ix = 0; ix < w; ++ix)
        for (std::size_t iy : {std::size_t{0}, h - 1}) {
            const std::size_t idx = iy * w + ix;
            if (!blocked[idx] && !vis[idx]) flood(idx);
        }
    for (std::size_t iy = 0; iy < h; ++iy)
        for (std::size_t ix : {std::size_t{0}, w - 1}) {
            const std::size_t idx = iy * w + ix;
            if (!blocked[idx] && !vis[idx]) flood(idx);
        }
    long long holes = 0;
    for (std::size_t i = 0; i < w * h; ++i)
        if (!blocked[i] && !vis[i] && flood(i)) ++holes;
    return holes;
}

// Euler characteristic oracle: chi is additive over disjoint groups and each
// group is connected, so chi = sum over groups of (1 - holes). Every group's
// hole count is escalated to finer pixels until two consecutive resolutions
// agree; together with the certified classification this makes the census
// stable against sub-pixel artifacts on both sides of the boundary.
long long chi_raster(std::span<const Center> cs, std::span<const double> rs,
                     std::size_t base_res) {
    long long chi = 0;
    for (const std::vector<std::size_t>& group : overlap_groups(cs, rs)) {
        std::size_t res = base_res;
        long long holes = certified_holes(cs, rs, group, res);
        for (;;) {
            const long long next = certified_holes(cs, rs, group, 2 * res);
            if (next == holes) break;
            holes = next;
            res *= 2;
            if (res > 4096)
                throw std::runtime_error("pixel oracle failed to stabilize");
        }
        chi += 1 - holes;
    }
    return chi;
}

}  // namespace

TEST_CASE("lens area closed forms") {
    CHECK(lens_area(1.0, 1.0, 2.0) == 0.0);   // external tangency
    CHECK(lens_area(1.0, 1.0, 2.5) == 0.0);   // separated
    CHECK(lens_area(2.0, 0.5, 1.0) == doctest::Approx(kPi * 0.25));  // contained
    CHECK(lens_area(2.0, 0.5, 1.5) == doctest::Approx(kPi * 0.25));  // internal tangency
    CHECK(lens_area(1.0, 1.0, 0.0) == doctest::Approx(kPi));         // identical

    // two unit circles through each other's centers:
    // area = 2*pi/3 - sqrt(3)/2
    CHECK(lens_area(1.0, 1.0, 1.0) ==
          doctest::Approx(2.0 * kPi / 3.0 - std::sqrt(3.0) / 2.0).epsilon(1e-14));

    // symmetric in the radii
    CHECK(lens_area(0.7, 1.3, 1.1) == doctest::Approx(lens_area(1.3, 0.7, 1.1)));

    RngStream rng(2024);
    for (int t = 0; t < 5; ++t) {
        const double r1 = rng.uniform(0.3, 1.5), r2 = rng.uniform(0.3, 1.5);
        const double d = rng.uniform(0.0, r1 + r2);
        const Center c1 = {0.0, 0.0}, c2 = {d, 0.0};
        const auto mc = mc_area(bound_lo(std::array{c1, c2}, std::array{r1, r2}),
                                bound_hi(std::array{c1, c2}, std::array{r1, r2}),
                                derive_seed(1, "lens", t), 400000,
                                [&](double x, double y) {
                                    return in_disk(c1, r1, x, y) && in_disk(c2, r2, x, y);
                                });
        CHECK(std::abs(lens_area(r1, r2, d) - mc.area) < 4.0 * mc.sigma + 1e-6);
    }
}

TEST_CASE("multi-disk intersection area") {
    const std::vector<Center> one = {{0.3, -0.2}};
    const std::vector<double> r1 = {0.8};
    CHECK(disks_intersection_area(one, r1) == doctest::Approx(kPi * 0.64).epsilon(1e-14));

    // pair reduces to the lens
    const std::vector<Center> two = {{0.0, 0.0}, {1.1, 0.4}};
    const std::vector<double> r2 = {1.0, 0.9};
    CHECK(disks_intersection_area(two, r2) ==
          doctest::Approx(lens_area(1.0, 0.9, std::hypot(1.1, 0.4))).epsilon(1e-13));

    // three unit disks centered on an equilateral triangle of side 1:
    // the intersection is the Reuleaux triangle, area (pi - sqrt(3)) / 2
    const std::vector<Center> reuleaux = {
        {0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
    const std::vector<double> r3 = {1.0, 1.0, 1.0};
    CHECK(disks_intersection_area(reuleaux, r3) ==
          doctest::Approx((kPi - std::sqrt(3.0)) / 2.0).epsilon(1e-13));

    // pairwise overlap without a common point: zero area
    const double s = 1.9;
    const std::vector<Center> empty3 = {
        {0.0, 0.0}, {s, 0.0}, {s / 2.0, s * std::sqrt(3.0) / 2.0}};
    CHECK(disks_intersection_area(empty3, r3) == 0.0);
    CHECK(!disks_common_point(empty3, r3));

    // random 3- and 4-disk intersections against hit counting
    RngStream rng(31);
    int nonzero = 0;
    for (int t = 0; t < 10; ++t) {
        const std::size_t k = 3 + (t % 2);
        std::vector<Center> cs;
        std::vector<double> rs;
        for (std::size_t i = 0; i < k; ++i) {
            cs.push_back({rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
            rs.push_back(rng.uniform(0.5, 1.0));
        }
        const double got = disks_intersection_area(cs, rs);
        const auto mc = mc_area(bound_lo(cs, rs), bound_hi(cs, rs),
                                derive_seed(2, "inter", t), 400000,
                                [&](double x, double y) {
                                    for (std::size_t i = 0; i < k; ++i)
                                        if (!in_disk(cs[i], rs[i], x, y)) return false;
                                    return true;
                                });
        CHECK(std::abs(got - mc.area) < 4.0 * mc.sigma + 1e-6);
        if (got > 0.01) ++nonzero;
    }
    CHECK(nonzero > 5);  // the configuration scale keeps most cases nontrivial
}

TEST_CASE("union area against inclusion-exclusion and hit counting") {
    // one disk
    const std::vector<Center> one = {{5.0, -3.0}};
    const std::vector<double> r1 = {2.0};
    CHECK(union_area_refined(one, r1, 1e-9) ==
          doctest::Approx(4.0 * kPi).epsilon(1e-8));

    // disjoint pair: sum of areas
    const std::vector<Center> two = {{0.0, 0.0}, {5.0, 0.0}};
    const std::vector<double> r2 = {1.0, 2.0};
    CHECK(union_area_refined(two, r2, 1e-9) ==
          doctest::Approx(5.0 * kPi).epsilon(1e-8));

    // overlapping pair: inclusion-exclusion with the lens
    const std::vector<Center> pair = {{0.0, 0.0}, {1.2, 0.3}};
    const std::vector<double> rp = {1.0, 1.1};
    const double d = std::hypot(1.2, 0.3);
    CHECK(union_area_refined(pair, rp, 1e-9) ==
          doctest::Approx(kPi * (1.0 + 1.21) - lens_area(1.0, 1.1, d)).epsilon(1e-7));

    // overlapping triple: full inclusion-exclusion
    const std::vector<Center> triple = {{0.0, 0.0}, {1.0, 0.1}, {0.4, 0.9}};
    const std::vector<double> rt = {0.9, 0.8, 0.7};
    double ie = 0.0;
    for (double r : rt) ie += kPi * r * r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            ie -= lens_area(rt[i], rt[j],
                            std::hypot(triple[i][0] - triple[j][0],
                                       triple[i][1] - triple[j][1]));
    ie += disks_intersection_area(triple, rt);
    CHECK(union_area_refined(triple, rt, 1e-8) == doctest::Approx(ie).epsilon(1e-6));

    // larger random families against hit counting
    RngStream rng(77);
    for (int t = 0; t < 4; ++t) {
        std::vector<Center> cs;
        std::vector<double> rs;
        for (int i = 0; i < 7; ++i) {
            cs.push_back({rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)});
            rs.push_back(rng.uniform(0.2, 0.8));
        }
        const double got = union_area_refined(cs, rs, 1e-7);
        const auto mc = mc_area(bound_lo(cs, rs), bound_hi(cs, rs),
                                derive_seed(3, "union", t), 400000,
                                [&](double x, double y) {
                                    for (std::size_t i = 0; i < cs.size(); ++i)
                                        if (in_disk(cs[i], rs[i], x, y)) return true;
                                    return false;
                                });
        CHECK(std::abs(got - mc.area) < 4.0 * mc.sigma + 1e-6);
    }
}

TEST_CASE("common point detection") {
    const std::vector<double> runit = {1.0, 1.0, 1.0};
    const std::vector<Center> tight = {
        {0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
    CHECK(disks_common_point(tight, runit));

    // nonempty exactly when the circumradius s/sqrt(3) is at most the radius
    const double s_in = 1.6, s_out = 1.9;
    const std::vector<Center> in3 = {
        {0.0, 0.0}, {s_in, 0.0}, {s_in / 2.0, s_in * std::sqrt(3.0) / 2.0}};
    const std::vector<Center> out3 = {
        {0.0, 0.0}, {s_out, 0.0}, {s_out / 2.0, s_out * std::sqrt(3.0) / 2.0}};
    CHECK(disks_common_point(in3, runit));
    CHECK(!disks_common_point(out3, runit));

    // external tangency: the single shared point counts
    const std::vector<Center> tangent = {{0.0, 0.0}, {2.0, 0.0}};
    const std::vector<double> rt = {1.0, 1.0};
    CHECK(disks_common_point(tangent, rt));

    // nested disks: inner center is a witness
    const std::vector<Center> nested = {{0.0, 0.0}, {0.2, 0.0}};
    const std::vector<double> rn = {2.0, 0.3};
    CHECK(disks_common_point(nested, rn));
}

TEST_CASE("scene construction : closed overlap rule and clump labels") {
    const MarkedPointSet marked = random_scene_input(150, 11, 0.3, 0.9);
    const std::size_t n_scale = 150;
    const BooleanScene scene = build_scene(marked, n_scale);
    REQUIRE(scene.centers.size() == marked.size());
    CHECK(scene.scale == doctest::Approx(std::pow(150.0, -0.5)));
    for (std::size_t i = 0; i < scene.radii.size(); ++i)
        CHECK(scene.radii[i] == doctest::Approx(marked.radius[i] * scene.scale));

    // quadratic oracle for the intersection graph
    std::set<std::pair<std::uint32_t, std::uint32_t>> want;
    for (std::uint32_t i = 0; i < scene.centers.size(); ++i)
        for (std::uint32_t j = i + 1; j < scene.centers.size(); ++j)
            if (distance(scene.centers[i], scene.centers[j]) <=
                scene.radii[i] + scene.radii[j])
                want.emplace(i, j);
    std::set<std::pair<std::uint32_t, std::uint32_t>> got;
    for (const GraphEdge& e : scene.intersection_graph.edges()) got.emplace(e.a, e.b);
    CHECK(got == want);

    // clump ids are the connected components of that graph
    CHECK(scene.clump_count == component_count(scene.intersection_graph));
    const std::vector<std::uint32_t> labels =
        component_labels(scene.intersection_graph);
    for (const GraphEdge& e : scene.intersection_graph.edges())
        CHECK(scene.clump_id[e.a] == scene.clump_id[e.b]);
    std::set<std::uint32_t> ids(scene.clump_id.begin(), scene.clump_id.end());
    CHECK(ids.size() == scene.clump_count);
    (void)labels;
}

TEST_CASE("scene construction input validation") {
    PointSet pts(2);
    pts.add({0.5, 0.5});
    MarkedPointSet no_marks;
    no_marks.points = pts;
    CHECK_THROWS_AS((void)build_scene(no_marks, 1), ConfigError);
    const MarkedPointSet marked =
        attach_radius_marks(pts, RadiusDist::constant(0.5), 3);
    CHECK_THROWS_AS((void)build_scene(marked, 0), ConfigError);
}

TEST_CASE("clump census orders sum to the ball count") {
    for (std::uint64_t seed : {21ull, 22ull, 23ull}) {
        const MarkedPointSet marked = random_scene_input(200, seed, 0.2, 1.0);
        const BooleanScene scene = build_scene(marked, 200);
        const ClumpCounts counts = clump_counts(scene);
        CHECK(counts.total == scene.clump_count);
        std::size_t weighted = 0, total = 0;
        for (const auto& [k, u] : counts.by_order) {
            weighted += k * u;
            total += u;
        }
        CHECK(weighted == marked.size());
        CHECK(total == counts.total);
    }
}

TEST_CASE("exact area agrees with hit counting on mixed clump sizes") {
    for (std::uint64_t seed : {31ull, 32ull}) {
        // dense radii force clumps well beyond three disks, exercising the
        // cross-section integrator route next to the closed-form routes
        const MarkedPointSet marked = random_scene_input(120, seed, 0.4, 1.4);
        const BooleanScene scene = build_scene(marked, 120);
        const ClumpCounts counts = clump_counts(scene);
        CHECK(counts.by_order.rbegin()->first > 3);

        const VolumeEstimate exact = scene_volume_exact2d(scene, 2);
        CHECK(exact.stderr_ == 0.0);
        const VolumeEstimate mc = scene_volume_montecarlo(scene, 800000, 5);
        CHECK(std::abs(exact.value - mc.value) < 4.0 * mc.stderr_ + 1e-6);
    }
}

TEST_CASE("monte carlo volume input validation") {
    const MarkedPointSet marked = random_scene_input(10, 41, 0.3, 0.6);
    const BooleanScene scene = build_scene(marked, 10);
    CHECK_THROWS_AS((void)scene_volume_montecarlo(scene, 0, 1), ConfigError);
}

TEST_CASE("euler characteristic matches the pixel oracle") {
    // hand-built: two disjoint disks (chi 2), then a triangle of disks
    // leaving a hole in the middle (chi 0 for that clump)
    std::vector<Center> cs = {{-3.0, 0.0}, {3.0, 0.0}};
    std::vector<double> rs = {0.5, 0.5};
    const double s = 1.9;  // pairwise overlap, no common point: a ring
    cs.push_back({10.0, 0.0});
    cs.push_back({10.0 + s, 0.0});
    cs.push_back({10.0 + s / 2.0, s * std::sqrt(3.0) / 2.0});
    rs.insert(rs.end(), {1.0, 1.0, 1.0});

    PointSet pts(2);
    for (const Center& c : cs) pts.add({c[0], c[1]});
    MarkedPointSet marked;
    marked.points = pts;
    marked.radius = rs;
    const BooleanScene scene = build_scene(marked, 1);
    const EulerResult euler = euler_curvature_2d(scene);
    CHECK(euler.chi == 2 + 0);  // two dots plus one ring
    CHECK(euler.total_curvature == doctest::Approx(2.0 * kPi * euler.chi));
    CHECK(chi_raster(cs, rs, 700) == euler.chi);

    // random scenes against the certified escalating raster; these seeds
    // include pockets only a few thousandths wide, so the base resolution
    // starts fine enough for their certified cores to show up
    for (std::uint64_t seed : {51ull, 52ull, 53ull}) {
        const MarkedPointSet m = random_scene_input(60, seed, 0.5, 1.2);
        const BooleanScene sc = build_scene(m, 60);
        std::vector<Center> c2(sc.centers.size());
        for (std::size_t i = 0; i < sc.centers.size(); ++i)
            c2[i] = {sc.centers[i][0], sc.centers[i][1]};
        const EulerResult got = euler_curvature_2d(sc, 2);
        CHECK(got.chi == chi_raster(c2, sc.radii, 2048));
    }
}

TEST_CASE("supercritical clump aborts the nerve expansion") {
    PointSet pts(2);
    RngStream rng(61);
    for (int i = 0; i < 21; ++i)
        pts.add({rng.uniform(0.0, 0.01), rng.uniform(0.0, 0.01)});
    MarkedPointSet marked;
    marked.points = pts;
    marked.radius.assign(21, 1.0);
    const BooleanScene scene = build_scene(marked, 1);
    CHECK_THROWS_AS((void)euler_curvature_2d(scene), std::runtime_error);
}

TEST_CASE("offline packing is exact on small scenes") {
    for (std::uint64_t seed : {71ull, 72ull, 73ull, 74ull}) {
        const MarkedPointSet marked = random_scene_input(14, seed, 0.8, 2.0);
        const BooleanScene scene = build_scene(marked, 14);
        const PackingResult packing = offline_packing(scene);
        CHECK(packing.exact);

        // selected balls never overlap
        std::size_t count = 0;
        for (std::size_t i = 0; i < scene.centers.size(); ++i) {
            if (!packing.selected[i]) continue;
            ++count;
            for (std::size_t j = i + 1; j < scene.centers.size(); ++j)
                if (packing.selected[j])
                    CHECK(distance(scene.centers[i], scene.centers[j]) >
                          scene.radii[i] + scene.radii[j]);
        }
        CHECK(count == packing.count);

        std::vector<std::uint32_t> adj(scene.centers.size(), 0);
        for (const GraphEdge& e : scene.intersection_graph.edges()) {
            adj[e.a] |= 1u << e.b;
            adj[e.b] |= 1u << e.a;
        }
        CHECK(packing.count == mis_oracle(scene.centers.size(), adj));
    }
}

TEST_CASE("offline packing falls back to greedy on giant clumps") {
    PointSet pts(2);
    RngStream rng(81);
    for (int i = 0; i < 40; ++i)
        pts.add({rng.uniform(0.0, 0.2), rng.uniform(0.0, 0.2)});
    MarkedPointSet marked;
    marked.points = pts;
    marked.radius.assign(40, 0.15);
    const BooleanScene scene = build_scene(marked, 1);
    REQUIRE(scene.clump_count == 1);  // everything overlaps
    const PackingResult packing = offline_packing(scene);
    CHECK(!packing.exact);
    CHECK(packing.count >= 1);
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t j = i + 1; j < 40; ++j)
            if (packing.selected[i] && packing.selected[j])
                CHECK(distance(scene.centers[i], scene.centers[j]) >
                      scene.radii[i] + scene.radii[j]);
}

TEST_CASE("packing count dominates the clump count") {
    // one ball per clump is always independent, so M >= U
    const MarkedPointSet marked = random_scene_input(120, 91, 0.3, 1.0);
    const BooleanScene scene = build_scene(marked, 120);
    const PackingResult packing = offline_packing(scene);
    CHECK(packing.count >= scene.clump_count);
}

TEST_CASE("scene csv shape") {
    PointSet pts(2);
    pts.add({0.25, 0.75});
    MarkedPointSet marked;
    marked.points = pts;
    marked.radius = {0.5};
    const BooleanScene scene = build_scene(marked, 1);
    const PackingResult packing = offline_packing(scene);
    std::ostringstream os;
    write_scene_csv(os, scene, &packing);
    CHECK(os.str() == "cx,cy,radius,clump_id,selected_flag\n0.25,0.75,0.5,0,1\n");
}
