#pragma once

#include <cstdint>
#include <optional>

#include "geomlaw/density.hpp"
#include "geomlaw/point_set.hpp"
#include "geomlaw/rng.hpp"

namespace geomlaw {

// Points plus optional i.i.d. marks.  Arrival marks are uniform on [0,1];
// radius marks are drawn from a bounded distribution.
struct MarkedPointSet {
    PointSet points;
    std::vector<double> arrival;  // empty when absent
    std::vector<double> radius;   // empty when absent

    bool has_arrival() const { return !arrival.empty(); }
    bool has_radius() const { return !radius.empty(); }
    std::size_t size() const { return points.size(); }
};

// Bounded radius-mark distribution.
struct RadiusDist {
    enum class Kind { constant, uniform_interval };
    Kind kind = Kind::constant;
    double a = 1.0, b = 1.0;

    static RadiusDist constant(double r);
    static RadiusDist uniform_interval(double lo, double hi);
    double bound() const { return b; }
    double sample(RngStream& rng) const;
};

struct RejectionStats {
    std::uint64_t proposals = 0;
    std::uint64_t accepts = 0;
};

// n i.i.d. points with density f, by rejection from the bounding box.
PointSet sample_binomial(const DensitySpec& density, std::size_t n,
                         std::uint64_t seed, RejectionStats* stats = nullptr);

// Homogeneous Poisson process of the given intensity on a box or ball
// window; with_origin appends the exact origin (window must contain it).
PointSet sample_poisson(double intensity, const Window& window,
                        std::uint64_t seed, bool with_origin = false);
PointSet sample_poisson(double intensity, const Window& window, RngStream& rng,
                        bool with_origin = false);

MarkedPointSet attach_arrival_marks(PointSet pts, std::uint64_t seed);
MarkedPointSet attach_radius_marks(PointSet pts, const RadiusDist& dist,
                                   std::uint64_t seed);

// Output of the coupled binomial/Cox construction: both point sets are
// recentred at the anchor, rescaled by n^{1/d}, and clipped to the closed
// ball of the requested radius.
struct CoupledPair {
    PointSet rescaled_binomial;
    PointSet cox;
    double anchor_density = 0.0;
    std::vector<double> anchor;
    // points discarded from or added to the binomial side that landed inside
    // the comparison window; the two sets agree exactly iff this is 0 and no
    // height-selection difference occurred inside the window
    std::size_t adjust_in_window = 0;
};

// Couples an (n-1)-point binomial sample around a density-sampled anchor with
// the Cox field of constant intensity f(anchor): a single uniform-height
// Poisson field on box x [0, n*sup_f] drives both, points below n*f(x) make
// the inhomogeneous side, points below n*f(anchor) make the Cox side, and
// the inhomogeneous side is discarded/augmented at random down to n-1 points.
CoupledPair sample_coupled_pair(const DensitySpec& density, std::size_t n,
                                double window_radius, std::uint64_t seed);

}  // namespace geomlaw
