#include "geomlaw/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "geomlaw/util.hpp"

namespace geomlaw {

RadiusDist RadiusDist::constant(double r) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw ConfigError("radius mark: constant must be finite and > 0");
    RadiusDist d;
    d.kind = Kind::constant;
    d.a = d.b = r;
    return d;
}

RadiusDist RadiusDist::uniform_interval(double lo, double hi) {
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi))
        throw ConfigError("radius mark: need 0 < lo <= hi < inf");
    RadiusDist d;
    d.kind = Kind::uniform_interval;
    d.a = lo;
    d.b = hi;
    return d;
}

double RadiusDist::sample(RngStream& rng) const {
    if (kind == Kind::constant) return a;
    return rng.uniform(a, b);
}

namespace {

void uniform_in_box(const Window& box, RngStream& rng, std::vector<double>& out) {
    out.resize(box.lo().size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = rng.uniform(box.lo()[j], box.hi()[j]);
}

// One accepted draw from the density by rejection against sup_f.
void draw_from_density(const DensitySpec& density, RngStream& rng,
                       std::vector<double>& out, RejectionStats* stats) {
    const Window box = density.bounding_box();
    while (true) {
        uniform_in_box(box, rng, out);
        const double u = rng.uniform01();
        if (stats) ++stats->proposals;
        if (u * density.sup() <= density(out)) {
            if (stats) ++stats->accepts;
            return;
        }
    }
}

}  // namespace

PointSet sample_binomial(const DensitySpec& density, std::size_t n,
                         std::uint64_t seed, RejectionStats* stats) {
    RngStream rng(derive_seed(seed, "sample_binomial"));
    PointSet out(density.dim());
    out.reserve(n);
    std::vector<double> x;
    for (std::size_t i = 0; i < n; ++i) {
        draw_from_density(density, rng, x, stats);
        out.add(x);
    }
    return out;
}

PointSet sample_poisson(double intensity, const Window& window, RngStream& rng,
                        bool with_origin) {
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw std::invalid_argument("sample_poisson: intensity must be finite and >= 0");
    const std::vector<double> origin(static_cast<std::size_t>(window.dim()), 0.0);
    if (with_origin && !window.contains(origin))
        throw std::invalid_argument("sample_poisson: window must contain the origin");
    const Window box = window.bounding_box();
    PointSet out(window.dim());
    const std::uint64_t count = rng.poisson(intensity * window.volume());
    out.reserve(count + (with_origin ? 1 : 0));
    std::vector<double> x;
    for (std::uint64_t i = 0; i < count; ++i) {
        // ball windows sample uniformly by rejection from the enclosing box
        do {
            uniform_in_box(box, rng, x);
        } while (!window.contains(x));
        out.add(x);
    }
    if (with_origin) out.add(origin);
    return out;
}

PointSet sample_poisson(double intensity, const Window& window,
                        std::uint64_t seed, bool with_origin) {
    RngStream rng(derive_seed(seed, "sample_poisson"));
    return sample_poisson(intensity, window, rng, with_origin);
}

MarkedPointSet attach_arrival_marks(PointSet pts, std::uint64_t seed) {
    RngStream rng(derive_seed(seed, "marks.arrival"));
    MarkedPointSet out;
    out.arrival.resize(pts.size());
    for (double& t : out.arrival) t = rng.uniform01();
    out.points = std::move(pts);
    return out;
}

MarkedPointSet attach_radius_marks(PointSet pts, const RadiusDist& dist,
                                   std::uint64_t seed) {
    RngStream rng(derive_seed(seed, "marks.radius"));
    MarkedPointSet out;
    out.radius.resize(pts.size());
    for (double& r : out.radius) r = dist.sample(rng);
    out.points = std::move(pts);
    return out;
}

CoupledPair sample_coupled_pair(const DensitySpec& density, std::size_t n,
                                double window_radius, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_coupled_pair: n must be >= 1");
    if (!(window_radius > 0.0))
        throw std::invalid_argument("sample_coupled_pair: window radius must be > 0");
    const int d = density.dim();
    const double nd = static_cast<double>(n);
    const double scale = std::pow(nd, 1.0 / d);
    const Window box = density.bounding_box();

    CoupledPair out;
    out.rescaled_binomial = PointSet(d);
    out.cox = PointSet(d);

    // anchor drawn from the density itself
    {
        RngStream rng(derive_seed(seed, "couple.anchor"));
        draw_from_density(density, rng, out.anchor, nullptr);
    }
    out.anchor_density = density(out.anchor);
    const double anchor_level = nd * out.anchor_density;

    const double r2 = window_radius * window_radius;
    auto in_window = [&](std::span<const double> p) {
        // rescaled displacement from the anchor, closed ball
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            const double v = scale * (p[static_cast<std::size_t>(j)] -
                                      out.anchor[static_cast<std::size_t>(j)]);
            s += v * v;
        }
        return s <= r2;
    };
    auto push_rescaled = [&](PointSet& dst, std::span<const double> p) {
        std::vector<double> q(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j)
            q[static_cast<std::size_t>(j)] =
                scale * (p[static_cast<std::size_t>(j)] -
                         out.anchor[static_cast<std::size_t>(j)]);
        dst.add(q);
    };

    // driving field: unit-rate Poisson on box x [0, n*sup_f]
    const double height = nd * density.sup();
    PointSet below_density(d);  // heights <= n*f(x): the inhomogeneous side
    std::vector<bool> below_in_window;
    {
        RngStream rng(derive_seed(seed, "couple.drive"));
        const std::uint64_t total = rng.poisson(height * box.volume());
        std::vector<double> x;
        for (std::uint64_t i = 0; i < total; ++i) {
            uniform_in_box(box, rng, x);
            const double t = rng.uniform(0.0, height);
            const bool below_f = t <= nd * density(x);
            const bool below_anchor = t <= anchor_level;
            if (below_f) {
                below_density.add(x);
                below_in_window.push_back(in_window(x));
            }
            if (below_anchor && in_window(x)) push_rescaled(out.cox, x);
        }
    }

    // thin or pad the inhomogeneous side to exactly n-1 points
    const std::size_t target = n - 1;
    const std::size_t have = below_density.size();
    std::vector<bool> keep(have, true);
    if (have > target) {
        RngStream rng(derive_seed(seed, "couple.discard"));
        std::vector<std::uint32_t> order(have);
        for (std::size_t i = 0; i < have; ++i) order[i] = static_cast<std::uint32_t>(i);
        rng.shuffle(order);
        for (std::size_t i = 0; i < have - target; ++i) {
            keep[order[i]] = false;
            if (below_in_window[order[i]]) ++out.adjust_in_window;
        }
    }
    for (std::size_t i = 0; i < have; ++i)
        if (keep[i] && below_in_window[i]) push_rescaled(out.rescaled_binomial, below_density[i]);
    if (have < target) {
        RngStream rng(derive_seed(seed, "couple.augment"));
        std::vector<double> x;
        for (std::size_t i = have; i < target; ++i) {
            draw_from_density(density, rng, x, nullptr);
            if (in_window(x)) {
                push_rescaled(out.rescaled_binomial, x);
                ++out.adjust_in_window;
            }
        }
    }
    return out;
}

}  // namespace geomlaw
