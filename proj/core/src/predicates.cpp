#include "geomlaw/predicates.hpp"

#include <cmath>

namespace geomlaw {

namespace {

constexpr double kEps = 1.1102230246251565e-16;        // 2^-53
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

constexpr long double kEpsL = 5.42101086242752217e-20L;  // 2^-64
constexpr long double kOrientBoundL = (3.0L + 16.0L * kEpsL) * kEpsL;
constexpr long double kIncircleBoundL = (10.0L + 96.0L * kEpsL) * kEpsL;

template <typename T>
int sign_of(T v) {
    return v > T(0) ? 1 : (v < T(0) ? -1 : 0);
}

template <typename T, typename B>
int orient_impl(T ax, T ay, T bx, T by, T cx, T cy, B bound) {
    const T detleft = (ax - cx) * (by - cy);
    const T detright = (ay - cy) * (bx - cx);
    const T det = detleft - detright;
    T detsum;
    if (detleft > T(0)) {
        if (detright <= T(0)) return sign_of(det);
        detsum = detleft + detright;
    } else if (detleft < T(0)) {
        if (detright >= T(0)) return sign_of(det);
        detsum = -detleft - detright;
    } else {
        return sign_of(det);
    }
    if (det >= T(bound) * detsum || -det >= T(bound) * detsum) return sign_of(det);
    return 2;  // inconclusive
}

template <typename T, typename B>
int incircle_impl(T ax, T ay, T bx, T by, T cx, T cy, T dx, T dy, B bound) {
    const T adx = ax - dx, ady = ay - dy;
    const T bdx = bx - dx, bdy = by - dy;
    const T cdx = cx - dx, cdy = cy - dy;

    const T bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const T alift = adx * adx + ady * ady;
    const T cdxady = cdx * ady, adxcdy = adx * cdy;
    const T blift = bdx * bdx + bdy * bdy;
    const T adxbdy = adx * bdy, bdxady = bdx * ady;
    const T clift = cdx * cdx + cdy * cdy;

    const T det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                  clift * (adxbdy - bdxady);
    const T permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                        (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                        (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    const T errbound = T(bound) * permanent;
    if (det > errbound || -det > errbound) return sign_of(det);
    return 2;  // inconclusive
}

}  // namespace

int orient2d_sign(double ax, double ay, double bx, double by, double cx, double cy) {
    int s = orient_impl<double>(ax, ay, bx, by, cx, cy, kOrientBound);
    if (s != 2) return s;
    s = orient_impl<long double>(ax, ay, bx, by, cx, cy, kOrientBoundL);
    return s == 2 ? 0 : s;
}

int incircle_sign(double ax, double ay, double bx, double by, double cx,
                  double cy, double dx, double dy) {
    int s = incircle_impl<double>(ax, ay, bx, by, cx, cy, dx, dy, kIncircleBound);
    if (s != 2) return s;
    s = incircle_impl<long double>(ax, ay, bx, by, cx, cy, dx, dy, kIncircleBoundL);
    return s == 2 ? 0 : s;
}

}  // namespace geomlaw
