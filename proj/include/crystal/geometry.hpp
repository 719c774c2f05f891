#pragma once

#include <stdexcept>
#include <vector>

namespace crystal {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Closed axis-aligned polygon, clockwise, first vertex not repeated.
struct Polyrectangle {
    std::vector<Vec2> vertices;
};

enum class Axis { Horizontal, Vertical };

struct Edge {
    Axis axis = Axis::Horizontal;
    Vec2 p;           // lexicographically smaller endpoint
    Vec2 q;
    Vec2 normal;      // outward unit normal, one of +-e1, +-e2
    int chi = 0;      // convexity factor
    double length = 0.0;
};

struct VertexFieldValue {
    int s1 = 0;
    int s2 = 0;
};

namespace geometry {

constexpr double merge_tol = 1e-9;

// Axis-aligned rectangle [-l1/2, l1/2] x [-l2/2, l2/2] shifted by c.
Polyrectangle rectangle(double l1, double l2, Vec2 center = {});

Polyrectangle normalize(const Polyrectangle& P);
std::vector<Edge> edges(const Polyrectangle& P);
std::vector<VertexFieldValue> vertex_field(const Polyrectangle& P);

double signed_area(const Polyrectangle& P);
double area(const Polyrectangle& P);
bool point_in(const Polyrectangle& P, Vec2 a);  // closed region

// All distances use the max-norm, the dual norm of the square anisotropy.
double hausdorff_distance(const Polyrectangle& A, const Polyrectangle& B);
bool contains(const Polyrectangle& A, const Polyrectangle& B);
double boundary_gap(const Polyrectangle& A, const Polyrectangle& B);

Polyrectangle translate(const Polyrectangle& P, Vec2 d);
Polyrectangle reflect_x(const Polyrectangle& P);  // x -> -x, re-normalized

// Edge-cycle form used by the flows. Each edge keeps its axis, outward normal sign and the
// coordinate it sits on (y for horizontal, x for vertical), so zero-length edges stay meaningful.
// Horizontal normal +1 means +e2 (edge heading east); vertical normal +1 means +e1 (heading south).
struct LoopEdge {
    bool horizontal = true;
    int normal = 1;
    double c = 0.0;
    long id = 0;
};

using EdgeLoop = std::vector<LoopEdge>;

struct LoopGeom {
    double lo = 0.0;  // smaller endpoint coordinate along the edge
    double hi = 0.0;
    int n_lo = 0;     // outward normal sign of the neighbour at the lo end
    int n_hi = 0;
    int chi = 0;
    double length = 0.0;
};

EdgeLoop to_loop(const Polyrectangle& P);
Polyrectangle from_loop(const EdgeLoop& L);  // raw vertices, no merging
LoopGeom loop_geom(const EdgeLoop& L, std::size_t i);

}  // namespace geometry
}  // namespace crystal
