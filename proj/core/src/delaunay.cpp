#include "geomlaw/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "geomlaw/predicates.hpp"
#include "geomlaw/rng.hpp"
#include "geomlaw/util.hpp"

namespace geomlaw {

namespace {

constexpr std::uint32_t kGhost = 0xffffffffu;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Incremental triangulation of the one-point compactification: solid faces
// are CCW triangles, every hull edge carries a ghost face through the vertex
// at infinity (stored in slot 2), and all faces are consistently oriented, so
// cavity insertion needs no hull special cases.
struct Mesh {
    const PointSet& pts;
    struct Face {
        std::array<std::uint32_t, 3> v{0, 0, 0};
        std::array<std::uint32_t, 3> n{0, 0, 0};  // n[i] across edge opposite v[i]
        bool alive = false;
    };
    std::vector<Face> faces;
    std::vector<std::uint32_t> free_list;
    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;
    std::uint32_t hint = 0;

    explicit Mesh(const PointSet& p) : pts(p) {}

    double x(std::uint32_t v) const { return pts[v][0]; }
    double y(std::uint32_t v) const { return pts[v][1]; }

    std::uint32_t new_face(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        std::uint32_t id;
        if (!free_list.empty()) {
            id = free_list.back();
            free_list.pop_back();
        } else {
            id = static_cast<std::uint32_t>(faces.size());
            faces.emplace_back();
            stamp.push_back(0);
        }
        faces[id].v = {a, b, c};
        faces[id].alive = true;
        return id;
    }

    void kill(std::uint32_t f) {
        faces[f].alive = false;
        free_list.push_back(f);
    }

    int slot_of_edge(const Face& t, std::uint32_t a, std::uint32_t b) const {
        for (int i = 0; i < 3; ++i)
            if (t.v[(i + 1) % 3] == a && t.v[(i + 2) % 3] == b) return i;
        return -1;
    }

    // circumdisk membership for the cavity test; a ghost face owns the open
    // halfplane beyond its hull edge plus the open hull segment itself
    bool in_disk(std::uint32_t f, double px, double py) const {
        const Face& t = faces[f];
        if (t.v[2] != kGhost) {
            return incircle_sign(x(t.v[0]), y(t.v[0]), x(t.v[1]), y(t.v[1]),
                                 x(t.v[2]), y(t.v[2]), px, py) > 0;
        }
        const std::uint32_t p = t.v[0], q = t.v[1];
        const int o = orient2d_sign(x(p), y(p), x(q), y(q), px, py);
        if (o > 0) return true;
        if (o < 0) return false;
        const double d1 = (px - x(p)) * (x(q) - x(p)) + (py - y(p)) * (y(q) - y(p));
        const double d2 = (px - x(q)) * (x(p) - x(q)) + (py - y(q)) * (y(p) - y(q));
        return d1 > 0.0 && d2 > 0.0;
    }

    // visibility walk; lands on a solid whose closed triangle holds the point
    // or on some ghost when the point is outside the hull
    std::uint32_t locate(double px, double py) const {
        std::uint32_t cur = hint;
        std::uint32_t guard = 0;
        const std::uint32_t limit = static_cast<std::uint32_t>(faces.size()) * 4 + 64;
        while (cur < faces.size()) {
            if (!faces[cur].alive || ++guard > limit) break;
            const Face& t = faces[cur];
            if (t.v[2] == kGhost) return cur;
            bool moved = false;
            for (int i = 0; i < 3; ++i) {
                const std::uint32_t a = t.v[(i + 1) % 3], b = t.v[(i + 2) % 3];
                if (orient2d_sign(x(a), y(a), x(b), y(b), px, py) < 0) {
                    cur = t.n[static_cast<std::size_t>(i)];
                    moved = true;
                    break;
                }
            }
            if (!moved) return cur;
        }
        return static_cast<std::uint32_t>(-1);
    }

    std::uint32_t find_bad_seed(double px, double py) {
        const std::uint32_t located = locate(px, py);
        if (located < faces.size() && faces[located].alive) {
            if (in_disk(located, px, py)) return located;
            for (std::uint32_t nb : faces[located].n)
                if (faces[nb].alive && in_disk(nb, px, py)) return nb;
        }
        for (std::uint32_t f = 0; f < faces.size(); ++f)
            if (faces[f].alive && in_disk(f, px, py)) return f;
        throw ConfigError("duplicate points");
    }

    void insert(std::uint32_t pid) {
        const double px = x(pid), py = y(pid);
        const std::uint32_t seed = find_bad_seed(px, py);

        ++epoch;
        std::vector<std::uint32_t> bad;
        std::vector<std::uint32_t> queue{seed};
        stamp[seed] = epoch;
        while (!queue.empty()) {
            const std::uint32_t f = queue.back();
            queue.pop_back();
            bad.push_back(f);
            for (std::uint32_t nb : faces[f].n) {
                if (stamp[nb] == epoch) continue;
                if (in_disk(nb, px, py)) {
                    stamp[nb] = epoch;
                    queue.push_back(nb);
                }
            }
        }

        struct Rim {
            std::uint32_t a, b;     // directed as traversed by the dying face
            std::uint32_t outside;  // surviving neighbor across {a, b}
        };
        std::vector<Rim> rim;
        for (std::uint32_t f : bad) {
            const Face& t = faces[f];
            for (int i = 0; i < 3; ++i) {
                const std::uint32_t nb = t.n[static_cast<std::size_t>(i)];
                if (stamp[nb] == epoch) continue;
                rim.push_back({t.v[(i + 1) % 3], t.v[(i + 2) % 3], nb});
            }
        }
        for (std::uint32_t f : bad) kill(f);

        // fan retriangulation around the new point; radial links pair up
        // through the shared rim endpoint (the ghost vertex included)
        std::unordered_map<std::uint32_t, std::pair<std::uint32_t, int>> waiting;
        waiting.reserve(rim.size() * 2);
        std::vector<std::uint32_t> created;
        created.reserve(rim.size());
        for (const Rim& e : rim) {
            const std::uint32_t f = new_face(e.a, e.b, pid);
            created.push_back(f);
            faces[f].n[2] = e.outside;
            const int back = slot_of_edge(faces[e.outside], e.b, e.a);
            faces[e.outside].n[static_cast<std::size_t>(back)] = f;
            auto link = [&](std::uint32_t key, int my_slot) {
                auto it = waiting.find(key);
                if (it == waiting.end()) {
                    waiting.emplace(key, std::make_pair(f, my_slot));
                } else {
                    faces[f].n[static_cast<std::size_t>(my_slot)] = it->second.first;
                    faces[it->second.first].n[static_cast<std::size_t>(it->second.second)] = f;
                    waiting.erase(it);
                }
            };
            link(e.b, 0);  // edge (b, pid)
            link(e.a, 1);  // edge (pid, a)
        }
        // ghosts keep the infinite vertex in slot 2
        for (std::uint32_t f : created) {
            Face& t = faces[f];
            while (t.v[2] != kGhost && (t.v[0] == kGhost || t.v[1] == kGhost)) {
                t.v = {t.v[1], t.v[2], t.v[0]};
                t.n = {t.n[1], t.n[2], t.n[0]};
            }
            if (t.v[2] != kGhost) hint = f;
        }
    }
};

std::vector<std::array<double, 2>> clip_halfplane(
    const std::vector<std::array<double, 2>>& poly, double mx, double my,
    double dx, double dy) {
    // keep the side with (p - m) . d <= 0
    std::vector<std::array<double, 2>> out;
    const std::size_t n = poly.size();
    out.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& cur = poly[i];
        const auto& nxt = poly[(i + 1) % n];
        const double sc = (cur[0] - mx) * dx + (cur[1] - my) * dy;
        const double sn = (nxt[0] - mx) * dx + (nxt[1] - my) * dy;
        if (sc <= 0.0) out.push_back(cur);
        if ((sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0)) {
            const double t = sc / (sc - sn);
            out.push_back({cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])});
        }
    }
    return out;
}

double polygon_area_2d(const std::vector<std::array<double, 2>>& poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * std::abs(a);
}

// length of the parametric dual edge p + t*d for t in [t0, t1] (either bound
// may be infinite) intersected with a box window
double clipped_dual_length(const std::array<double, 2>& p,
                           const std::array<double, 2>& d, double t0, double t1,
                           const Window& clip) {
    for (int ax = 0; ax < 2; ++ax) {
        const double lo = clip.lo()[static_cast<std::size_t>(ax)];
        const double hi = clip.hi()[static_cast<std::size_t>(ax)];
        if (d[static_cast<std::size_t>(ax)] == 0.0) {
            if (p[static_cast<std::size_t>(ax)] < lo || p[static_cast<std::size_t>(ax)] > hi)
                return 0.0;
            continue;
        }
        double ta = (lo - p[static_cast<std::size_t>(ax)]) / d[static_cast<std::size_t>(ax)];
        double tb = (hi - p[static_cast<std::size_t>(ax)]) / d[static_cast<std::size_t>(ax)];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (!(t1 > t0)) return 0.0;
    return (t1 - t0) * std::hypot(d[0], d[1]);
}

double clipped_cell_area(const PointSet& pts, std::size_t site,
                         const std::vector<std::uint32_t>& neighbors,
                         const Window& clip) {
    std::vector<std::array<double, 2>> poly = {
        {clip.lo()[0], clip.lo()[1]},
        {clip.hi()[0], clip.lo()[1]},
        {clip.hi()[0], clip.hi()[1]},
        {clip.lo()[0], clip.hi()[1]},
    };
    const auto s = pts[site];
    for (std::uint32_t t : neighbors) {
        const auto q = pts[t];
        const double mx = 0.5 * (s[0] + q[0]), my = 0.5 * (s[1] + q[1]);
        poly = clip_halfplane(poly, mx, my, q[0] - s[0], q[1] - s[1]);
        if (poly.empty()) return 0.0;
    }
    return polygon_area_2d(poly);
}

}  // namespace

std::array<double, 2> circumcenter(std::span<const double> a,
                                   std::span<const double> b,
                                   std::span<const double> c) {
    const double bx = b[0] - a[0], by = b[1] - a[1];
    const double cx = c[0] - a[0], cy = c[1] - a[1];
    const double d = 2.0 * (bx * cy - by * cx);
    const double bl = bx * bx + by * by;
    const double cl = cx * cx + cy * cy;
    return {a[0] + (cy * bl - by * cl) / d, a[1] + (bx * cl - cx * bl) / d};
}

VoronoiDiagram delaunay_voronoi_2d(const PointSet& pts, std::optional<Window> clip) {
    if (pts.dim() != 2)
        throw ConfigError("delaunay_voronoi_2d: requires dimension 2");
    if (clip && (clip->kind() != Window::Kind::box || clip->dim() != 2))
        throw ConfigError("delaunay_voronoi_2d: clip window must be a 2d box");
    const std::size_t n = pts.size();
    if (n == 0) throw ConfigError("delaunay_voronoi_2d: empty point set");

    // duplicates are rejected up front
    {
        std::vector<std::uint32_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return lex_less(pts[a], pts[b]);
        });
        for (std::size_t i = 1; i < n; ++i)
            if (coords_equal(pts[order[i - 1]], pts[order[i]]))
                throw ConfigError("duplicate points");
    }

    VoronoiDiagram out;
    out.sites_ = pts;
    out.clip_ = clip;

    if (n == 1) {
        out.delaunay_ = GeoGraph(pts, {}, false);
        VoronoiCell cell;
        cell.bounded = false;
        cell.area = clip ? clip->volume() : kInf;
        out.cells_.push_back(cell);
        return out;
    }
    if (n == 2) {
        out.delaunay_ = GeoGraph(pts, {{0, 1}}, false);
        double bisector_len = kInf;
        if (clip) {
            const std::array<double, 2> mid{0.5 * (pts[0][0] + pts[1][0]),
                                            0.5 * (pts[0][1] + pts[1][1])};
            const std::array<double, 2> dir{pts[0][1] - pts[1][1],
                                            pts[1][0] - pts[0][0]};
            bisector_len = clipped_dual_length(mid, dir, -kInf, kInf, *clip);
        }
        out.vor_edges_.push_back({0, 1, bisector_len});
        for (std::size_t s = 0; s < 2; ++s) {
            VoronoiCell cell;
            cell.bounded = false;
            cell.area = clip ? clipped_cell_area(pts, s, {static_cast<std::uint32_t>(1 - s)}, *clip)
                             : kInf;
            out.cells_.push_back(cell);
        }
        return out;
    }

    // bootstrap face: first two distinct points plus the first point off
    // their line; all collinear means no triangulation exists
    const std::uint32_t i0 = 0;
    std::uint32_t i1 = kGhost, i2 = kGhost;
    for (std::uint32_t i = 1; i < n; ++i) {
        if (!coords_equal(pts[i0], pts[i])) {
            i1 = i;
            break;
        }
    }
    for (std::uint32_t i = 1; i < n && i2 == kGhost; ++i) {
        if (i == i1) continue;
        if (orient2d_sign(pts[i0][0], pts[i0][1], pts[i1][0], pts[i1][1], pts[i][0],
                          pts[i][1]) != 0)
            i2 = i;
    }
    if (i1 == kGhost || i2 == kGhost)
        throw ConfigError("degenerate configuration: all points are collinear");

    Mesh mesh(pts);
    {
        std::uint32_t a = i0, b = i1, c = i2;
        if (orient2d_sign(pts[a][0], pts[a][1], pts[b][0], pts[b][1], pts[c][0],
                          pts[c][1]) < 0)
            std::swap(b, c);
        const std::uint32_t t = mesh.new_face(a, b, c);
        const std::uint32_t g0 = mesh.new_face(c, b, kGhost);
        const std::uint32_t g1 = mesh.new_face(a, c, kGhost);
        const std::uint32_t g2 = mesh.new_face(b, a, kGhost);
        mesh.faces[t].n = {g0, g1, g2};
        mesh.faces[g0].n = {g2, g1, t};
        mesh.faces[g1].n = {g0, g2, t};
        mesh.faces[g2].n = {g1, g0, t};
        mesh.hint = t;
    }

    // deterministic shuffled insertion order keeps the expected walk short
    {
        std::vector<std::uint32_t> order;
        order.reserve(n - 3);
        for (std::uint32_t i = 0; i < n; ++i)
            if (i != i0 && i != i1 && i != i2) order.push_back(i);
        RngStream rng(derive_seed(0x67656f6d6c6177ull, "delaunay.insertion"));
        rng.shuffle(order);
        for (std::uint32_t pid : order) mesh.insert(pid);
    }

    // ---- extraction ----
    const auto& faces = mesh.faces;
    std::vector<std::array<double, 2>> center(faces.size(), {0.0, 0.0});
    std::vector<std::uint32_t> face_of_vertex(n, kGhost);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> del_pairs;
    for (std::uint32_t f = 0; f < faces.size(); ++f) {
        if (!faces[f].alive || faces[f].v[2] == kGhost) continue;
        const auto& t = faces[f];
        center[f] = circumcenter(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]]);
        for (int i = 0; i < 3; ++i) {
            face_of_vertex[t.v[static_cast<std::size_t>(i)]] = f;
            const std::uint32_t u = t.v[(i + 1) % 3], w = t.v[(i + 2) % 3];
            del_pairs.emplace_back(std::min(u, w), std::max(u, w));
        }
    }
    std::sort(del_pairs.begin(), del_pairs.end());
    del_pairs.erase(std::unique(del_pairs.begin(), del_pairs.end()), del_pairs.end());
    out.delaunay_ = GeoGraph(pts, del_pairs, false);

    // dual edge per Delaunay edge: segment between adjacent circumcenters,
    // or an infinite ray for hull edges
    {
        std::unordered_map<std::uint64_t, std::array<std::uint32_t, 2>> edge_faces;
        edge_faces.reserve(del_pairs.size() * 2);
        auto key = [](std::uint32_t u, std::uint32_t w) {
            if (u > w) std::swap(u, w);
            return (static_cast<std::uint64_t>(u) << 32) | w;
        };
        for (std::uint32_t f = 0; f < faces.size(); ++f) {
            if (!faces[f].alive || faces[f].v[2] == kGhost) continue;
            const auto& t = faces[f];
            for (int i = 0; i < 3; ++i) {
                const std::uint32_t u = t.v[(i + 1) % 3], w = t.v[(i + 2) % 3];
                auto [it, inserted] = edge_faces.try_emplace(key(u, w),
                                                             std::array<std::uint32_t, 2>{f, kGhost});
                if (!inserted) it->second[1] = f;
            }
        }
        out.vor_edges_.reserve(out.delaunay_.edges().size());
        for (const auto& e : out.delaunay_.edges()) {
            const auto& pair = edge_faces.at(key(e.a, e.b));
            VoronoiEdgeRec rec{e.a, e.b, kInf};
            const auto& c1 = center[pair[0]];
            if (pair[1] != kGhost) {
                const auto& c2 = center[pair[1]];
                if (clip) {
                    rec.length = clipped_dual_length(
                        c1, {c2[0] - c1[0], c2[1] - c1[1]}, 0.0, 1.0, *clip);
                } else {
                    rec.length = std::hypot(c1[0] - c2[0], c1[1] - c2[1]);
                }
            } else if (clip) {
                // hull edge: the dual is a ray from the lone circumcenter,
                // perpendicular to the edge and pointing away from the
                // triangle's third vertex
                std::uint32_t opp = kGhost;
                for (std::uint32_t v : faces[pair[0]].v)
                    if (v != e.a && v != e.b) opp = v;
                std::array<double, 2> dir{pts[e.a][1] - pts[e.b][1],
                                          pts[e.b][0] - pts[e.a][0]};
                const double mx = 0.5 * (pts[e.a][0] + pts[e.b][0]);
                const double my = 0.5 * (pts[e.a][1] + pts[e.b][1]);
                if (dir[0] * (pts[opp][0] - mx) + dir[1] * (pts[opp][1] - my) > 0.0) {
                    dir[0] = -dir[0];
                    dir[1] = -dir[1];
                }
                rec.length = clipped_dual_length(c1, dir, 0.0, kInf, *clip);
            }
            out.vor_edges_.push_back(rec);
        }
    }

    // cells: walk the solid fan around each site
    out.cells_.resize(n);
    for (std::uint32_t s = 0; s < n; ++s) {
        VoronoiCell& cell = out.cells_[s];
        const std::uint32_t start = face_of_vertex[s];

        auto slot_of = [&](std::uint32_t f) {
            for (int i = 0; i < 3; ++i)
                if (faces[f].v[static_cast<std::size_t>(i)] == s) return i;
            return -1;
        };
        // rotate counterclockwise around s until wrapping or falling off the hull
        std::vector<std::uint32_t> fan{start};
        bool wrapped = false;
        std::uint32_t cur = start;
        while (true) {
            const int i = slot_of(cur);
            const std::uint32_t nxt = faces[cur].n[static_cast<std::size_t>((i + 1) % 3)];
            if (faces[nxt].v[2] == kGhost) break;
            if (nxt == start) {
                wrapped = true;
                break;
            }
            fan.push_back(nxt);
            cur = nxt;
        }
        std::uint32_t cw_end = start;
        if (!wrapped) {
            cur = start;
            while (true) {
                const int i = slot_of(cur);
                const std::uint32_t prv = faces[cur].n[static_cast<std::size_t>((i + 2) % 3)];
                if (faces[prv].v[2] == kGhost) break;
                fan.insert(fan.begin(), prv);
                cur = prv;
            }
            cw_end = cur;
        }

        cell.verts.reserve(fan.size());
        for (std::uint32_t f : fan) cell.verts.push_back(center[f]);
        cell.bounded = wrapped;

        if (!wrapped) {
            // outgoing bisector rays across the two hull edges at s
            auto outward_ray = [&](std::uint32_t f, std::uint32_t partner) {
                const auto sp = pts[s];
                const auto tp = pts[partner];
                double dx = -(tp[1] - sp[1]), dy = tp[0] - sp[0];
                const int i = slot_of(f);
                const std::uint32_t other =
                    faces[f].v[static_cast<std::size_t>((i + 1) % 3)] == partner
                        ? faces[f].v[static_cast<std::size_t>((i + 2) % 3)]
                        : faces[f].v[static_cast<std::size_t>((i + 1) % 3)];
                const auto up = pts[other];
                const double mx = 0.5 * (sp[0] + tp[0]), my = 0.5 * (sp[1] + tp[1]);
                if (dx * (mx - up[0]) + dy * (my - up[1]) < 0.0) {
                    dx = -dx;
                    dy = -dy;
                }
                const double norm = std::hypot(dx, dy);
                return std::array<double, 2>{dx / norm, dy / norm};
            };
            const std::uint32_t ccw_face = fan.back();
            const int ccw_i = slot_of(ccw_face);
            const std::uint32_t ccw_partner =
                faces[ccw_face].v[static_cast<std::size_t>((ccw_i + 2) % 3)];
            const int cw_i = slot_of(cw_end);
            const std::uint32_t cw_partner =
                faces[cw_end].v[static_cast<std::size_t>((cw_i + 1) % 3)];
            cell.ray_start = outward_ray(cw_end, cw_partner);
            cell.ray_end = outward_ray(ccw_face, ccw_partner);
        }

        if (clip) {
            std::vector<std::uint32_t> nbrs = out.delaunay_.undirected_neighbors(s);
            cell.area = clipped_cell_area(pts, s, nbrs, *clip);
        } else if (wrapped) {
            cell.area = polygon_area_2d(cell.verts);
        } else {
            cell.area = kInf;
        }
    }
    return out;
}

}  // namespace geomlaw
