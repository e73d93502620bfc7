#pragma once

namespace geomlaw {

// Sign predicates with a two-stage floating-point filter: double evaluation
// with a forward error bound, then long double.  Results inside the final
// error bound are reported as 0 (degenerate), which keeps every decision
// deterministic.

// > 0 iff c lies strictly left of the directed line a->b.
int orient2d_sign(double ax, double ay, double bx, double by, double cx, double cy);

// > 0 iff d lies strictly inside the circle through a, b, c (a,b,c CCW).
int incircle_sign(double ax, double ay, double bx, double by, double cx,
                  double cy, double dx, double dy);

}  // namespace geomlaw
