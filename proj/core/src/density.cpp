#include "geomlaw/density.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "geomlaw/util.hpp"

namespace geomlaw {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

double polygon_area(std::span<const std::array<double, 2>> poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a;
}

bool point_in_polygon(std::span<const std::array<double, 2>> poly, double x,
                      double y) {
    // even-odd ray crossing; boundary membership is not guaranteed either way
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double xi = poly[i][0], yi = poly[i][1];
        const double xj = poly[j][0], yj = poly[j][1];
        if ((yi > y) != (yj > y)) {
            const double t = (y - yi) / (yj - yi);
            if (x < xi + t * (xj - xi)) inside = !inside;
        }
    }
    return inside;
}

DensitySpec DensitySpec::uniform_box(Window box) {
    if (box.kind() != Window::Kind::box)
        throw ConfigError("uniform_box density requires a box window");
    DensitySpec d;
    d.kind_ = Kind::uniform_box;
    d.box_ = std::move(box);
    d.sup_ = 1.0 / d.box_.volume();
    return d;
}

DensitySpec DensitySpec::uniform_polygon(
    std::vector<std::array<double, 2>> vertices) {
    if (vertices.size() < 3)
        throw ConfigError("uniform_polygon density requires >= 3 vertices");
    const double signed_area = polygon_area(vertices);
    if (std::abs(signed_area) <= 0.0)
        throw ConfigError("uniform_polygon density: degenerate polygon");
    DensitySpec d;
    d.kind_ = Kind::uniform_polygon;
    d.poly_ = std::move(vertices);
    d.poly_area_ = std::abs(signed_area);
    double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
    double hi_x = -lo_x, hi_y = -lo_y;
    for (const auto& v : d.poly_) {
        lo_x = std::min(lo_x, v[0]);
        hi_x = std::max(hi_x, v[0]);
        lo_y = std::min(lo_y, v[1]);
        hi_y = std::max(hi_y, v[1]);
    }
    d.box_ = Window::box({lo_x, lo_y}, {hi_x, hi_y});
    d.sup_ = 1.0 / d.poly_area_;
    return d;
}

DensitySpec DensitySpec::grid(Window box, std::vector<std::size_t> shape,
                              std::vector<double> weights) {
    if (box.kind() != Window::Kind::box)
        throw ConfigError("grid density requires a box window");
    if (static_cast<int>(shape.size()) != box.dim())
        throw ConfigError("grid density: shape rank must equal dimension");
    std::size_t cells = 1;
    for (std::size_t s : shape) {
        if (s == 0) throw ConfigError("grid density: zero-size axis");
        cells *= s;
    }
    if (weights.size() != cells)
        throw ConfigError("grid density: expected " + std::to_string(cells) +
                          " cell weights, got " + std::to_string(weights.size()));
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ConfigError("grid density: cell weights must be finite and >= 0");
        total += w;
    }
    if (!(total > 0.0)) throw ConfigError("grid density: all-zero weights");

    DensitySpec d;
    d.kind_ = Kind::grid;
    d.box_ = std::move(box);
    d.shape_ = std::move(shape);
    const double cell_volume = d.box_.volume() / static_cast<double>(cells);
    d.cell_density_.resize(cells);
    d.sup_ = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        d.cell_density_[i] = weights[i] / (total * cell_volume);
        d.sup_ = std::max(d.sup_, d.cell_density_[i]);
    }
    return d;
}

DensitySpec DensitySpec::truncated_gaussian(std::vector<double> mean,
                                            std::vector<double> sigma,
                                            Window box) {
    if (box.kind() != Window::Kind::box)
        throw ConfigError("truncated_gaussian density requires a box window");
    if (static_cast<int>(mean.size()) != box.dim() || sigma.size() != mean.size())
        throw ConfigError("truncated_gaussian density: mean/sigma rank mismatch");
    for (double s : sigma)
        if (!(s > 0.0)) throw ConfigError("truncated_gaussian density: sigma must be > 0");

    DensitySpec d;
    d.kind_ = Kind::truncated_gaussian;
    d.box_ = std::move(box);
    d.mean_ = std::move(mean);
    d.sigma_ = std::move(sigma);
    // per-axis truncated normal constants multiply into the normalizer
    double norm = 1.0;
    for (std::size_t j = 0; j < d.mean_.size(); ++j) {
        const double lo = (d.box_.lo()[j] - d.mean_[j]) / d.sigma_[j];
        const double hi = (d.box_.hi()[j] - d.mean_[j]) / d.sigma_[j];
        const double mass = normal_cdf(hi) - normal_cdf(lo);
        if (!(mass > 0.0))
            throw ConfigError("truncated_gaussian density: window mass underflows");
        norm *= d.sigma_[j] * std::sqrt(2.0 * kPi) * mass;
    }
    d.gauss_norm_ = 1.0 / norm;
    // sup sits at the mean clamped into the box
    std::vector<double> peak(d.mean_.size());
    for (std::size_t j = 0; j < peak.size(); ++j)
        peak[j] = std::min(std::max(d.mean_[j], d.box_.lo()[j]), d.box_.hi()[j]);
    d.sup_ = d(peak);
    return d;
}

double DensitySpec::operator()(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim())
        throw std::invalid_argument("density evaluation: wrong dimension");
    switch (kind_) {
        case Kind::uniform_box:
            return box_.contains(x) ? sup_ : 0.0;
        case Kind::uniform_polygon:
            return point_in_polygon(poly_, x[0], x[1]) ? sup_ : 0.0;
        case Kind::grid: {
            if (!box_.contains(x)) return 0.0;
            std::size_t flat = 0, stride = 1;
            for (std::size_t j = 0; j < shape_.size(); ++j) {
                const double w = box_.hi()[j] - box_.lo()[j];
                double rel = (x[j] - box_.lo()[j]) / w * static_cast<double>(shape_[j]);
                auto cell = static_cast<std::size_t>(rel);
                if (cell >= shape_[j]) cell = shape_[j] - 1;
                flat += cell * stride;
                stride *= shape_[j];
            }
            return cell_density_[flat];
        }
        case Kind::truncated_gaussian: {
            if (!box_.contains(x)) return 0.0;
            double expo = 0.0;
            for (std::size_t j = 0; j < mean_.size(); ++j) {
                const double z = (x[j] - mean_[j]) / sigma_[j];
                expo += z * z;
            }
            return gauss_norm_ * std::exp(-0.5 * expo);
        }
    }
    return 0.0;
}

double DensitySpec::integral_power(double p, std::size_t cells_per_axis) const {
    const int d = dim();
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> x(static_cast<std::size_t>(d));
    double cell_vol = 1.0;
    for (int j = 0; j < d; ++j)
        cell_vol *= (box_.hi()[j] - box_.lo()[j]) / static_cast<double>(cells_per_axis);
    double total = 0.0;
    while (true) {
        for (int j = 0; j < d; ++j) {
            const double w = (box_.hi()[j] - box_.lo()[j]) / static_cast<double>(cells_per_axis);
            x[static_cast<std::size_t>(j)] =
                box_.lo()[j] + (static_cast<double>(idx[static_cast<std::size_t>(j)]) + 0.5) * w;
        }
        const double f = (*this)(x);
        if (f > 0.0) total += std::pow(f, p) * cell_vol;
        int j = 0;
        for (; j < d; ++j) {
            if (++idx[static_cast<std::size_t>(j)] < cells_per_axis) break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
        if (j == d) break;
    }
    return total;
}

}  // namespace geomlaw
