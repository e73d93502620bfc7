#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "geomlaw/point_set.hpp"

namespace geomlaw {

// kd-tree over an immutable point set.  All balls are closed, and neighbor
// lists are ordered by (distance, lexicographic coordinates, index) so results
// are unique even under exact ties.
class SpatialIndex {
public:
    SpatialIndex() = default;
    explicit SpatialIndex(PointSet pts);

    struct Neighbor {
        std::size_t index;
        double dist;
    };

    // k nearest points to q.  With exclude_self set, q must be a member of
    // the set; the lowest-index exact match is excluded.  Throws when fewer
    // than k candidates remain.
    std::vector<Neighbor> k_nearest(std::span<const double> q, std::size_t k,
                                    bool exclude_self = false) const;

    // k nearest neighbors of point i, never including i itself.
    std::vector<Neighbor> k_nearest_of(std::size_t i, std::size_t k) const;

    // Indices of all points with distance(p, center) <= radius, ascending.
    std::vector<std::size_t> range(std::span<const double> center,
                                   double radius) const;

    const PointSet& points() const { return pts_; }
    std::size_t size() const { return pts_.size(); }

private:
    struct Node {
        int axis = -1;        // -1 marks a leaf
        double split = 0.0;
        std::uint32_t left = 0, right = 0;
        std::uint32_t begin = 0, end = 0;  // leaf range into order_
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end);
    void knn_recurse(std::uint32_t node, std::span<const double> q,
                     std::size_t k, std::size_t skip,
                     std::vector<Neighbor>& heap) const;
    void range_recurse(std::uint32_t node, std::span<const double> q,
                       double r2, std::vector<std::size_t>& out) const;
    bool neighbor_less(const Neighbor& a, const Neighbor& b) const;

    PointSet pts_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
    std::uint32_t root_ = 0;
};

}  // namespace geomlaw
