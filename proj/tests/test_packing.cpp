#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "geomlaw/density.hpp"
#include "geomlaw/packing_online.hpp"
#include "geomlaw/point_process.hpp"
#include "geomlaw/point_set.hpp"
#include "geomlaw/rng.hpp"
#include "geomlaw/util.hpp"

using namespace geomlaw;

namespace {

MarkedPointSet random_input(int n, std::uint64_t seed, int dim = 2) {
    RngStream rng(seed);
    PointSet pts(dim);
    for (int i = 0; i < n; ++i) {
        std::vector<double> p(dim);
        for (int d = 0; d < dim; ++d) p[d] = rng.uniform01();
        pts.add(p);
    }
    return attach_arrival_marks(std::move(pts), derive_seed(seed, "arrive"));
}

// one-dimensional reimplementation: sort by (arrival, coordinate, index),
// accept iff no earlier accepted point lies within the blocking distance
std::vector<std::uint8_t> rsa_oracle_1d(const MarkedPointSet& marked, double radius) {
    const std::size_t n = marked.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (marked.arrival[a] != marked.arrival[b])
            return marked.arrival[a] < marked.arrival[b];
        if (marked.points[a][0] != marked.points[b][0])
            return marked.points[a][0] < marked.points[b][0];
        return a < b;
    });
    std::vector<std::uint8_t> packed(n, 0);
    std::vector<double> accepted;
    for (std::size_t idx : order) {
        const double x = marked.points[idx][0];
        bool blocked = false;
        for (double y : accepted)
            if (std::abs(x - y) <= 2.0 * radius) {
                blocked = true;
                break;
            }
        if (!blocked) {
            packed[idx] = 1;
            accepted.push_back(x);
        }
    }
    return packed;
}

}  // namespace

TEST_CASE("packed balls never overlap and rejections are justified") {
    for (int dim : {1, 2, 3}) {
        const MarkedPointSet marked = random_input(400, 17 + dim, dim);
        const RsaResult res = rsa_pack(marked, 400);
        CHECK(res.radius ==
              doctest::Approx(std::pow(400.0 * unit_ball_volume(dim), -1.0 / dim)));
        std::size_t count = 0;
        for (std::size_t i = 0; i < marked.size(); ++i) {
            if (res.packed[i]) ++count;
        }
        CHECK(count == res.count);
        CHECK(count > 0);
        CHECK(count < marked.size());  // at this intensity some must collide

        const double block = 2.0 * res.radius;
        for (std::size_t i = 0; i < marked.size(); ++i)
            for (std::size_t j = i + 1; j < marked.size(); ++j)
                if (res.packed[i] && res.packed[j])
                    CHECK(distance(marked.points[i], marked.points[j]) > block);

        // maximality relative to arrival order: every rejected ball overlaps
        // some packed ball that arrived earlier
        for (std::size_t i = 0; i < marked.size(); ++i) {
            if (res.packed[i]) continue;
            bool witness = false;
            for (std::size_t j = 0; j < marked.size() && !witness; ++j) {
                if (!res.packed[j]) continue;
                if (distance(marked.points[i], marked.points[j]) <= block &&
                    marked.arrival[j] < marked.arrival[i])
                    witness = true;
            }
            CHECK(witness);
        }
    }
}

TEST_CASE("earliest arrival is always packed") {
    const MarkedPointSet marked = random_input(200, 29);
    const RsaResult res = rsa_pack(marked, 200);
    const std::size_t first = static_cast<std::size_t>(
        std::min_element(marked.arrival.begin(), marked.arrival.end()) -
        marked.arrival.begin());
    CHECK(res.packed[first] == 1);
}

TEST_CASE("deleting a rejected ball does not change the outcome") {
    const MarkedPointSet marked = random_input(300, 31);
    const RsaResult res = rsa_pack(marked, 300);
    std::size_t rejected = marked.size();
    for (std::size_t i = 0; i < marked.size(); ++i)
        if (!res.packed[i]) {
            rejected = i;
            break;
        }
    REQUIRE(rejected < marked.size());

    MarkedPointSet reduced;
    reduced.points = PointSet(2);
    for (std::size_t i = 0; i < marked.size(); ++i) {
        if (i == rejected) continue;
        reduced.points.add(marked.points[i]);
        reduced.arrival.push_back(marked.arrival[i]);
    }
    const RsaResult res2 = rsa_pack(reduced, 300);  // same n keeps the radius
    CHECK(res2.count == res.count);
    std::size_t k = 0;
    for (std::size_t i = 0; i < marked.size(); ++i) {
        if (i == rejected) continue;
        CHECK(res2.packed[k] == res.packed[i]);
        ++k;
    }
}

TEST_CASE("one-dimensional packing matches a sorted-scan reimplementation") {
    for (std::uint64_t seed : {41ull, 42ull, 43ull, 44ull}) {
        const MarkedPointSet marked = random_input(500, seed, 1);
        const RsaResult res = rsa_pack(marked, 500);
        const std::vector<std::uint8_t> oracle = rsa_oracle_1d(marked, res.radius);
        CHECK(res.packed == oracle);
    }
}

TEST_CASE("packing validates its input") {
    MarkedPointSet no_marks;
    no_marks.points = PointSet(2);
    no_marks.points.add({0.5, 0.5});
    CHECK_THROWS_AS((void)rsa_pack(no_marks, 10), ConfigError);
    const MarkedPointSet marked = random_input(10, 3);
    CHECK_THROWS_AS((void)rsa_pack(marked, 0), ConfigError);
}

TEST_CASE("fraction experiment rows and determinism") {
    const DensitySpec density =
        DensitySpec::uniform_box(Window::box({0.0}, {1.0}));
    const std::vector<std::size_t> grid = {100, 400};
    const auto rows = rsa_fraction_experiment(density, grid, 6, 77, 2);
    REQUIRE(rows.size() == 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].n == grid[i]);
        CHECK(rows[i].replicates == 6);
        CHECK(rows[i].mean > 0.0);
        CHECK(rows[i].mean < 1.0);
        CHECK(rows[i].stderr_ > 0.0);
    }
    const auto again = rsa_fraction_experiment(density, grid, 6, 77, 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(again[i].mean == rows[i].mean);
        CHECK(again[i].stderr_ == rows[i].stderr_);
    }

    CHECK_THROWS_AS(
        (void)rsa_fraction_experiment(density, {400, 100}, 3, 1), ConfigError);
    CHECK_THROWS_AS((void)rsa_fraction_experiment(density, grid, 0, 1), ConfigError);
}

TEST_CASE("rsa csv shape") {
    std::vector<RsaRow> rows = {{100, 0.5, 0.025, 4}};
    std::ostringstream os;
    write_rsa_csv(os, rows);
    CHECK(os.str() == "n,mean,stderr,replicates\n100,0.5,0.025,4\n");
}
