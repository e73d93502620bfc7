#include "geomlaw/disk_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "geomlaw/util.hpp"

namespace geomlaw {

namespace {

constexpr double kTau = 2.0 * kPi;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

double sq(double x) { return x * x; }

double dist2d(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

// squared-distance containment with a small guard so that circle-circle
// candidate points are not rejected by rounding on their generating circles
bool point_in_disk(const std::array<double, 2>& q, const std::array<double, 2>& c,
                   double r) {
    const double d2 = sq(q[0] - c[0]) + sq(q[1] - c[1]);
    const double r2 = r * r;
    return d2 <= r2 + 1e-12 * std::max(1.0, r2);
}

}  // namespace

double lens_area(double r1, double r2, double dist) {
    if (!(r1 > 0.0) || !(r2 > 0.0)) throw ConfigError("lens radii must be positive");
    if (!(dist >= 0.0)) throw ConfigError("lens distance must be nonnegative");
    if (dist >= r1 + r2) return 0.0;
    if (dist <= std::abs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return kPi * r * r;
    }
    const double a1 = std::acos(clamp_unit((dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist * r1)));
    const double a2 = std::acos(clamp_unit((dist * dist + r2 * r2 - r1 * r1) / (2.0 * dist * r2)));
    const double k = (-dist + r1 + r2) * (dist + r1 - r2) * (dist - r1 + r2) * (dist + r1 + r2);
    return r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * std::sqrt(std::max(0.0, k));
}

double disks_intersection_area(std::span<const std::array<double, 2>> centers,
                               std::span<const double> radii) {
    const std::size_t m = centers.size();
    if (m == 0 || radii.size() != m)
        throw ConfigError("intersection area requires matching centers and radii");
    if (m == 1) return kPi * radii[0] * radii[0];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (dist2d(centers[i], centers[j]) >= radii[i] + radii[j]) return 0.0;

    // Green's theorem over the boundary arcs: on each circle, the arcs lying
    // inside every other disk bound the intersection region
    double area = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double ri = radii[i];
        std::vector<double> cuts{0.0};
        bool excluded = false;
        for (std::size_t j = 0; j < m && !excluded; ++j) {
            if (j == i) continue;
            const double d = dist2d(centers[i], centers[j]);
            if (d + radii[j] <= ri) {
                excluded = true;  // disk j inside disk i: circle i never bounds
                continue;
            }
            if (d + ri <= radii[j]) continue;  // circle i fully inside disk j
            const double beta =
                std::acos(clamp_unit((d * d + ri * ri - sq(radii[j])) / (2.0 * d * ri)));
            const double theta =
                std::atan2(centers[j][1] - centers[i][1], centers[j][0] - centers[i][0]);
            double lo = theta - beta, hi = theta + beta;
            lo -= kTau * std::floor(lo / kTau);
            hi -= kTau * std::floor(hi / kTau);
            cuts.push_back(lo);
            cuts.push_back(hi);
        }
        if (excluded) continue;
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        const std::size_t nc = cuts.size();
        for (std::size_t s = 0; s < nc; ++s) {
            const double a = cuts[s];
            const double b = s + 1 < nc ? cuts[s + 1] : cuts[0] + kTau;
            if (!(b > a)) continue;
            const double mid = 0.5 * (a + b);
            const std::array<double, 2> p{centers[i][0] + ri * std::cos(mid),
                                          centers[i][1] + ri * std::sin(mid)};
            bool inside_all = true;
            for (std::size_t j = 0; j < m && inside_all; ++j) {
                if (j == i) continue;
                if (!point_in_disk(p, centers[j], radii[j])) inside_all = false;
            }
            if (!inside_all) continue;
            area += 0.5 * (ri * ri * (b - a) +
                           centers[i][0] * ri * (std::sin(b) - std::sin(a)) +
                           centers[i][1] * ri * (std::cos(a) - std::cos(b)));
        }
    }
    return area;
}

namespace {

// total length of the union of the disks' cross-sections at height y
double cross_section_length(double y, std::span<const std::array<double, 2>> centers,
                            std::span<const double> radii) {
    std::vector<std::pair<double, double>> spans;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double dy = y - centers[i][1];
        const double w2 = radii[i] * radii[i] - dy * dy;
        if (w2 <= 0.0) continue;
        const double w = std::sqrt(w2);
        spans.emplace_back(centers[i][0] - w, centers[i][0] + w);
    }
    if (spans.empty()) return 0.0;
    std::sort(spans.begin(), spans.end());
    double total = 0.0;
    double lo = spans[0].first, hi = spans[0].second;
    for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first > hi) {
            total += hi - lo;
            lo = spans[i].first;
            hi = spans[i].second;
        } else {
            hi = std::max(hi, spans[i].second);
        }
    }
    return total + (hi - lo);
}

double simpson(double a, double b, std::size_t panels,
               std::span<const std::array<double, 2>> centers,
               std::span<const double> radii) {
    const std::size_t n = 2 * panels;  // even subinterval count
    const double h = (b - a) / static_cast<double>(n);
    double sum = cross_section_length(a, centers, radii) +
                 cross_section_length(b, centers, radii);
    for (std::size_t k = 1; k < n; ++k) {
        const double y = a + h * static_cast<double>(k);
        sum += (k % 2 == 1 ? 4.0 : 2.0) * cross_section_length(y, centers, radii);
    }
    return sum * h / 3.0;
}

}  // namespace

double union_area_refined(std::span<const std::array<double, 2>> centers,
                          std::span<const double> radii, double tol) {
    const std::size_t m = centers.size();
    if (m == 0 || radii.size() != m)
        throw ConfigError("union area requires matching centers and radii");
    if (!(tol > 0.0)) throw ConfigError("union area tolerance must be positive");

    // breakpoints: disk tops/bottoms and circle-circle intersection heights,
    // so each segment integrates a smooth cross-section
    std::vector<double> ys;
    for (std::size_t i = 0; i < m; ++i) {
        ys.push_back(centers[i][1] - radii[i]);
        ys.push_back(centers[i][1] + radii[i]);
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = dist2d(centers[i], centers[j]);
            if (d >= radii[i] + radii[j] || d <= std::abs(radii[i] - radii[j]) || d == 0.0)
                continue;
            const double a = (d * d + sq(radii[i]) - sq(radii[j])) / (2.0 * d);
            const double h2 = sq(radii[i]) - a * a;
            const double h = std::sqrt(std::max(0.0, h2));
            const double ux = (centers[j][0] - centers[i][0]) / d;
            const double uy = (centers[j][1] - centers[i][1]) / d;
            ys.push_back(centers[i][1] + a * uy + h * ux);
            ys.push_back(centers[i][1] + a * uy - h * ux);
        }
    }
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    const double span_total = ys.back() - ys.front();
    double area = 0.0;
    for (std::size_t s = 0; s + 1 < ys.size(); ++s) {
        const double a = ys[s], b = ys[s + 1];
        if (!(b > a)) continue;
        const double tol_seg = tol * std::max((b - a) / span_total, 1e-6);
        std::size_t panels = 4;
        double coarse = simpson(a, b, panels, centers, radii);
        for (int iter = 0; iter < 18; ++iter) {
            panels *= 2;
            const double fine = simpson(a, b, panels, centers, radii);
            // square-root endpoint behaviour lowers the convergence order, so
            // use the raw difference (not /15) as a conservative error bound
            if (std::abs(fine - coarse) < tol_seg) {
                coarse = fine + (fine - coarse) / 15.0;
                break;
            }
            coarse = fine;
        }
        area += coarse;
    }
    return area;
}

bool disks_common_point(std::span<const std::array<double, 2>> centers,
                        std::span<const double> radii) {
    const std::size_t m = centers.size();
    if (m == 0 || radii.size() != m)
        throw ConfigError("common-point test requires matching centers and radii");
    const auto in_all = [&](const std::array<double, 2>& q) {
        for (std::size_t k = 0; k < m; ++k)
            if (!point_in_disk(q, centers[k], radii[k])) return false;
        return true;
    };
    // a nonempty intersection of closed disks contains a center or a
    // circle-circle intersection point, so these candidates decide the test
    for (std::size_t i = 0; i < m; ++i)
        if (in_all(centers[i])) return true;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = dist2d(centers[i], centers[j]);
            if (d > radii[i] + radii[j] || d < std::abs(radii[i] - radii[j]) || d == 0.0)
                continue;
            const double a = (d * d + sq(radii[i]) - sq(radii[j])) / (2.0 * d);
            const double h = std::sqrt(std::max(0.0, sq(radii[i]) - a * a));
            const double ux = (centers[j][0] - centers[i][0]) / d;
            const double uy = (centers[j][1] - centers[i][1]) / d;
            const std::array<double, 2> base{centers[i][0] + a * ux, centers[i][1] + a * uy};
            if (in_all({base[0] - h * uy, base[1] + h * ux})) return true;
            if (in_all({base[0] + h * uy, base[1] - h * ux})) return true;
        }
    }
    return false;
}

}  // namespace geomlaw
