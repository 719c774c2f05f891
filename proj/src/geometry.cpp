#include "crystal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crystal::geometry {

namespace {

struct Box {
    double x0, x1, y0, y1;
};

Box seg_box(Vec2 a, Vec2 b) {
    return {std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y)};
}

double box_dist(const Box& a, const Box& b) {
    double dx = std::max({0.0, b.x0 - a.x1, a.x0 - b.x1});
    double dy = std::max({0.0, b.y0 - a.y1, a.y0 - b.y1});
    return std::max(dx, dy);
}

bool horizontal_move(Vec2 a, Vec2 b) { return std::abs(a.y - b.y) <= merge_tol; }

int sgn(double v) { return (v > 0) - (v < 0); }

Vec2 direction(Vec2 a, Vec2 b) { return {double(sgn(b.x - a.x)), double(sgn(b.y - a.y))}; }

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Is region(A) inside the max-norm r-neighbourhood of region(B)?
bool covered(const Polyrectangle& A, const Polyrectangle& B, double r) {
    std::vector<double> xs, ys;
    for (auto v : A.vertices) {
        xs.push_back(v.x);
        ys.push_back(v.y);
    }
    for (auto v : B.vertices) {
        for (double s : {-r, 0.0, r}) {
            xs.push_back(v.x + s);
            ys.push_back(v.y + s);
        }
    }
    xs = unique_sorted(xs);
    ys = unique_sorted(ys);
    const auto& bv = B.vertices;
    std::size_t n = bv.size();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
            Vec2 c{0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])};
            if (!point_in(A, c) || point_in(B, c)) continue;
            Box cb{c.x, c.x, c.y, c.y};
            bool hit = false;
            for (std::size_t k = 0; k < n && !hit; ++k)
                hit = box_dist(cb, seg_box(bv[k], bv[(k + 1) % n])) <= r;
            if (!hit) return false;
        }
    }
    return true;
}

double directed_hausdorff(const Polyrectangle& A, const Polyrectangle& B) {
    if (covered(A, B, 0.0)) return 0.0;
    double lo = 0.0, hi = 0.0;
    for (auto a : A.vertices)
        for (auto b : B.vertices) hi = std::max({hi, std::abs(a.x - b.x), std::abs(a.y - b.y)});
    for (int it = 0; it < 80 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
        double mid = 0.5 * (lo + hi);
        if (covered(A, B, mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

Polyrectangle rectangle(double l1, double l2, Vec2 c) {
    return {{{c.x - l1 / 2, c.y + l2 / 2},
             {c.x + l1 / 2, c.y + l2 / 2},
             {c.x + l1 / 2, c.y - l2 / 2},
             {c.x - l1 / 2, c.y - l2 / 2}}};
}

double signed_area(const Polyrectangle& P) {
    double s = 0.0;
    const auto& v = P.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

double area(const Polyrectangle& P) { return std::abs(signed_area(P)); }

Polyrectangle normalize(const Polyrectangle& P) {
    std::vector<Vec2> v = P.vertices;
    if (v.size() > 1 && std::abs(v.front().x - v.back().x) <= merge_tol &&
        std::abs(v.front().y - v.back().y) <= merge_tol)
        v.pop_back();
    for (std::size_t i = 0; i < v.size(); ++i) {
        Vec2 a = v[i], b = v[(i + 1) % v.size()];
        if (std::abs(a.x - b.x) > merge_tol && std::abs(a.y - b.y) > merge_tol)
            throw GeometryError("polygon is not axis-aligned");
    }
    bool changed = true;
    while (changed && v.size() >= 3) {
        changed = false;
        std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
            bool zero = std::abs(a.x - b.x) <= merge_tol && std::abs(a.y - b.y) <= merge_tol;
            bool collinear = horizontal_move(a, b) == horizontal_move(b, c);
            if (zero || collinear) {
                v.erase(v.begin() + static_cast<long>(i));
                changed = true;
                break;
            }
        }
    }
    if (v.size() < 4) throw GeometryError("polyrectangle needs at least 4 vertices");

    // Rebuild vertices from per-edge coordinates so that shared coordinates agree exactly.
    std::size_t n = v.size();
    std::vector<double> coord(n);
    std::vector<bool> horiz(n);
    for (std::size_t i = 0; i < n; ++i) {
        horiz[i] = horizontal_move(v[i], v[(i + 1) % n]);
        coord[i] = horiz[i] ? v[i].y : v[i].x;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t pi = (i + n - 1) % n;
        v[i] = horiz[i] ? Vec2{coord[pi], coord[i]} : Vec2{coord[i], coord[pi]};
    }

    Polyrectangle out{v};
    if (signed_area(out) > 0) std::reverse(out.vertices.begin(), out.vertices.end());

    auto& w = out.vertices;
    for (std::size_t i = 0; i < n; ++i) {
        Box bi = seg_box(w[i], w[(i + 1) % n]);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (box_dist(bi, seg_box(w[j], w[(j + 1) % n])) <= merge_tol)
                throw GeometryError("polyrectangle is not simple");
        }
    }

    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (w[i].x < w[start].x || (w[i].x == w[start].x && w[i].y > w[start].y)) start = i;
    }
    std::rotate(w.begin(), w.begin() + static_cast<long>(start), w.end());
    return out;
}

std::vector<Edge> edges(const Polyrectangle& P) {
    const auto& v = P.vertices;
    std::size_t n = v.size();
    std::vector<Vec2> dir(n);
    for (std::size_t i = 0; i < n; ++i) dir[i] = direction(v[i], v[(i + 1) % n]);
    auto convex = [&](std::size_t corner) {
        return cross(dir[(corner + n - 1) % n], dir[corner]) < 0;
    };
    std::vector<Edge> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = v[i], b = v[(i + 1) % n];
        Edge& e = out[i];
        e.axis = a.y == b.y ? Axis::Horizontal : Axis::Vertical;
        bool a_first = a.x < b.x || (a.x == b.x && a.y < b.y);
        e.p = a_first ? a : b;
        e.q = a_first ? b : a;
        e.normal = {-dir[i].y, dir[i].x};
        e.length = std::abs(b.x - a.x) + std::abs(b.y - a.y);
        bool c0 = convex(i), c1 = convex((i + 1) % n);
        e.chi = (c0 && c1) ? 1 : (!c0 && !c1) ? -1 : 0;
    }
    return out;
}

std::vector<VertexFieldValue> vertex_field(const Polyrectangle& P) {
    auto es = edges(P);
    std::size_t n = es.size();
    std::vector<VertexFieldValue> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Edge& in = es[(i + n - 1) % n];
        const Edge& o = es[i];
        const Edge& vert = in.axis == Axis::Vertical ? in : o;
        const Edge& hor = in.axis == Axis::Horizontal ? in : o;
        out[i] = {sgn(vert.normal.x), sgn(hor.normal.y)};
    }
    return out;
}

bool point_in(const Polyrectangle& P, Vec2 a) {
    const auto& v = P.vertices;
    std::size_t n = v.size();
    Box pb{a.x, a.x, a.y, a.y};
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 b = v[i], c = v[(i + 1) % n];
        if (box_dist(pb, seg_box(b, c)) <= 1e-12) return true;
        if (b.x == c.x) {
            double y0 = std::min(b.y, c.y), y1 = std::max(b.y, c.y);
            if (a.y >= y0 && a.y < y1 && b.x > a.x) inside = !inside;
        }
    }
    return inside;
}

double hausdorff_distance(const Polyrectangle& A, const Polyrectangle& B) {
    return std::max(directed_hausdorff(A, B), directed_hausdorff(B, A));
}

bool contains(const Polyrectangle& A, const Polyrectangle& B) { return covered(B, A, 0.0); }

double boundary_gap(const Polyrectangle& A, const Polyrectangle& B) {
    double best = std::numeric_limits<double>::infinity();
    const auto& a = A.vertices;
    const auto& b = B.vertices;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Box ba = seg_box(a[i], a[(i + 1) % a.size()]);
        for (std::size_t j = 0; j < b.size(); ++j)
            best = std::min(best, box_dist(ba, seg_box(b[j], b[(j + 1) % b.size()])));
    }
    return best;
}

Polyrectangle translate(const Polyrectangle& P, Vec2 d) {
    Polyrectangle out = P;
    for (auto& v : out.vertices) {
        v.x += d.x;
        v.y += d.y;
    }
    return out;
}

Polyrectangle reflect_x(const Polyrectangle& P) {
    Polyrectangle out = P;
    for (auto& v : out.vertices) v.x = -v.x;
    std::reverse(out.vertices.begin(), out.vertices.end());
    return normalize(out);
}

EdgeLoop to_loop(const Polyrectangle& P) {
    const auto& v = P.vertices;
    std::size_t n = v.size();
    EdgeLoop L(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = v[i], b = v[(i + 1) % n];
        LoopEdge& e = L[i];
        e.id = static_cast<long>(i);
        e.horizontal = a.y == b.y;
        if (e.horizontal) {
            e.c = a.y;
            e.normal = b.x > a.x ? 1 : -1;
        } else {
            e.c = a.x;
            e.normal = b.y < a.y ? 1 : -1;
        }
    }
    return L;
}

Polyrectangle from_loop(const EdgeLoop& L) {
    std::size_t n = L.size();
    Polyrectangle P;
    P.vertices.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const LoopEdge& prev = L[(i + n - 1) % n];
        P.vertices[i] = L[i].horizontal ? Vec2{prev.c, L[i].c} : Vec2{L[i].c, prev.c};
    }
    return P;
}

LoopGeom loop_geom(const EdgeLoop& L, std::size_t i) {
    std::size_t n = L.size();
    const LoopEdge& e = L[i];
    const LoopEdge& prev = L[(i + n - 1) % n];
    const LoopEdge& next = L[(i + 1) % n];
    // East-heading horizontals and north-heading verticals start at their lo end.
    bool prev_is_lo = e.horizontal ? e.normal > 0 : e.normal < 0;
    const LoopEdge& a = prev_is_lo ? prev : next;
    const LoopEdge& b = prev_is_lo ? next : prev;
    LoopGeom g;
    g.lo = a.c;
    g.hi = b.c;
    g.n_lo = a.normal;
    g.n_hi = b.normal;
    g.chi = (g.n_hi - g.n_lo) / 2;
    g.length = g.hi - g.lo;
    return g;
}

}  // namespace crystal::geometry
