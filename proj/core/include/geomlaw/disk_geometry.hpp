#pragma once

#include <array>
#include <span>

namespace geomlaw {

// Area of the intersection of two disks with radii r1, r2 and center
// distance dist (closed-form lens).
double lens_area(double r1, double r2, double dist);

// Area of the common intersection of up to a handful of disks, computed
// exactly from the boundary arcs (each circle contributes the arcs lying
// inside every other disk; the arc integrals sum to the region area).
// centers are 2-d.
double disks_intersection_area(std::span<const std::array<double, 2>> centers,
                               std::span<const double> radii);

// Area of the union of the given disks to the requested absolute tolerance:
// exact cross-section lengths are integrated over y with breakpoint
// splitting, Simpson panels, and Richardson-extrapolated refinement.
double union_area_refined(std::span<const std::array<double, 2>> centers,
                          std::span<const double> radii, double tol);

// Whether the closed disks have a common point.  A nonempty intersection of
// closed disks always contains a disk center or a pairwise circle-circle
// intersection point, so testing those candidates is exact.
bool disks_common_point(std::span<const std::array<double, 2>> centers,
                        std::span<const double> radii);

}  // namespace geomlaw
