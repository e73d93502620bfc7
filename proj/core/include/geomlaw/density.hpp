#pragma once

#include <array>
#include <span>
#include <vector>

#include "geomlaw/point_set.hpp"

namespace geomlaw {

// Normalized probability density on a bounded support.  Evaluation, the
// supremum, and the bounding box are exact up to the stated 1e-6 integral
// tolerance, which is what the rejection sampler and the limit estimators
// rely on.
class DensitySpec {
public:
    enum class Kind { uniform_box, uniform_polygon, grid, truncated_gaussian };

    static DensitySpec uniform_box(Window box);
    // 2D simple polygon, vertices in order (either orientation).
    static DensitySpec uniform_polygon(std::vector<std::array<double, 2>> vertices);
    // Piecewise-constant on a regular grid over `box`; `weights` are relative
    // cell masses (row-major, axis 0 fastest) and get normalized.
    static DensitySpec grid(Window box, std::vector<std::size_t> shape,
                            std::vector<double> weights);
    // Gaussian with diagonal covariance restricted to `box`, renormalized.
    static DensitySpec truncated_gaussian(std::vector<double> mean,
                                          std::vector<double> sigma, Window box);

    Kind kind() const { return kind_; }
    int dim() const { return box_.dim(); }
    double operator()(std::span<const double> x) const;
    double sup() const { return sup_; }
    const Window& bounding_box() const { return box_; }

    // integral of f(x)^p over the support, by midpoint quadrature (used to
    // cross-check normalization and for closed-form limit targets in tests)
    double integral_power(double p, std::size_t cells_per_axis = 256) const;

private:
    DensitySpec() : box_(Window::box({0.0}, {1.0})) {}

    Kind kind_ = Kind::uniform_box;
    Window box_;
    double sup_ = 0.0;

    // uniform_polygon
    std::vector<std::array<double, 2>> poly_;
    double poly_area_ = 0.0;

    // grid
    std::vector<std::size_t> shape_;
    std::vector<double> cell_density_;

    // truncated_gaussian
    std::vector<double> mean_, sigma_;
    double gauss_norm_ = 0.0;
};

bool point_in_polygon(std::span<const std::array<double, 2>> poly, double x,
                      double y);
double polygon_area(std::span<const std::array<double, 2>> poly);

}  // namespace geomlaw
