#include "geomlaw/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace geomlaw {

namespace {
constexpr std::uint32_t kLeafSize = 16;
constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);
}  // namespace

SpatialIndex::SpatialIndex(PointSet pts) : pts_(std::move(pts)) {
    const std::size_t n = pts_.size();
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) order_[i] = static_cast<std::uint32_t>(i);
    if (n > 0) root_ = build(0, static_cast<std::uint32_t>(n));
}

std::uint32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end) {
    Node node;
    node.begin = begin;
    node.end = end;
    if (end - begin <= kLeafSize) {
        nodes_.push_back(node);
        return static_cast<std::uint32_t>(nodes_.size() - 1);
    }
    // split on the axis with the widest extent
    const int d = pts_.dim();
    int axis = 0;
    double best_spread = -1.0;
    for (int j = 0; j < d; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::uint32_t i = begin; i < end; ++i) {
            double c = pts_[order_[i]][static_cast<std::size_t>(j)];
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            axis = j;
        }
    }
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid,
                     order_.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
                         double ca = pts_[a][static_cast<std::size_t>(axis)];
                         double cb = pts_[b][static_cast<std::size_t>(axis)];
                         if (ca != cb) return ca < cb;
                         return a < b;
                     });
    node.axis = axis;
    node.split = pts_[order_[mid]][static_cast<std::size_t>(axis)];
    const std::uint32_t self = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(node);
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

bool SpatialIndex::neighbor_less(const Neighbor& a, const Neighbor& b) const {
    if (a.dist != b.dist) return a.dist < b.dist;
    auto pa = pts_[a.index];
    auto pb = pts_[b.index];
    if (lex_less(pa, pb)) return true;
    if (lex_less(pb, pa)) return false;
    return a.index < b.index;
}

void SpatialIndex::knn_recurse(std::uint32_t node_id, std::span<const double> q,
                               std::size_t k, std::size_t skip,
                               std::vector<Neighbor>& heap) const {
    const Node& node = nodes_[node_id];
    auto worse = [&](const Neighbor& a, const Neighbor& b) {
        return neighbor_less(a, b);
    };
    if (node.axis < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const std::size_t idx = order_[i];
            if (idx == skip) continue;
            Neighbor cand{idx, squared_distance(q, pts_[idx])};
            if (heap.size() < k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end(), worse);
            } else if (neighbor_less(cand, heap.front())) {
                std::pop_heap(heap.begin(), heap.end(), worse);
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end(), worse);
            }
        }
        return;
    }
    const double delta = q[static_cast<std::size_t>(node.axis)] - node.split;
    const std::uint32_t near = delta < 0.0 ? node.left : node.right;
    const std::uint32_t far = delta < 0.0 ? node.right : node.left;
    knn_recurse(near, q, k, skip, heap);
    // descend the far side on ties too, so equal-distance candidates with a
    // smaller lex order are never pruned away
    if (heap.size() < k || delta * delta <= heap.front().dist)
        knn_recurse(far, q, k, skip, heap);
}

std::vector<SpatialIndex::Neighbor> SpatialIndex::k_nearest(
    std::span<const double> q, std::size_t k, bool exclude_self) const {
    if (static_cast<int>(q.size()) != pts_.dim() && !pts_.empty())
        throw std::invalid_argument("k_nearest: query dimension mismatch");
    std::size_t skip = kNoSkip;
    if (exclude_self) {
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            if (coords_equal(pts_[i], q)) {
                skip = i;
                break;
            }
        }
        if (skip == kNoSkip)
            throw std::invalid_argument(
                "k_nearest: exclude_self requires the query to be a member point");
    }
    const std::size_t available = pts_.size() - (skip == kNoSkip ? 0 : 1);
    if (k == 0) return {};
    if (k > available) throw std::invalid_argument("k_nearest: insufficient points");
    std::vector<Neighbor> heap;
    heap.reserve(k);
    knn_recurse(root_, q, k, skip, heap);
    std::sort(heap.begin(), heap.end(),
              [&](const Neighbor& a, const Neighbor& b) { return neighbor_less(a, b); });
    for (auto& nb : heap) nb.dist = std::sqrt(nb.dist);
    return heap;
}

std::vector<SpatialIndex::Neighbor> SpatialIndex::k_nearest_of(
    std::size_t i, std::size_t k) const {
    if (i >= pts_.size()) throw std::invalid_argument("k_nearest_of: index out of range");
    if (k == 0) return {};
    if (k > pts_.size() - 1)
        throw std::invalid_argument("k_nearest_of: insufficient points");
    std::vector<Neighbor> heap;
    heap.reserve(k);
    knn_recurse(root_, pts_[i], k, i, heap);
    std::sort(heap.begin(), heap.end(),
              [&](const Neighbor& a, const Neighbor& b) { return neighbor_less(a, b); });
    for (auto& nb : heap) nb.dist = std::sqrt(nb.dist);
    return heap;
}

void SpatialIndex::range_recurse(std::uint32_t node_id, std::span<const double> q,
                                 double r2, std::vector<std::size_t>& out) const {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const std::size_t idx = order_[i];
            if (squared_distance(q, pts_[idx]) <= r2) out.push_back(idx);
        }
        return;
    }
    const double delta = q[static_cast<std::size_t>(node.axis)] - node.split;
    const std::uint32_t near = delta < 0.0 ? node.left : node.right;
    const std::uint32_t far = delta < 0.0 ? node.right : node.left;
    range_recurse(near, q, r2, out);
    if (delta * delta <= r2) range_recurse(far, q, r2, out);
}

std::vector<std::size_t> SpatialIndex::range(std::span<const double> center,
                                             double radius) const {
    if (pts_.empty()) return {};
    if (radius < 0.0) throw std::invalid_argument("range: radius must be >= 0");
    std::vector<std::size_t> out;
    range_recurse(root_, center, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace geomlaw
