#include "crystal/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace crystal;
using namespace crystal::geometry;

namespace {

Polyrectangle poly(std::vector<Vec2> v) { return Polyrectangle{std::move(v)}; }

// L-shape: 2x2 square with the upper-right unit square removed.
Polyrectangle ell_shape() { return normalize(poly({{0, 0}, {0, 2}, {1, 2}, {1, 1}, {2, 1}, {2, 0}})); }

Polyrectangle random_staircase(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.2, 1.5);
    double w1 = u(rng), w2 = u(rng), h1 = u(rng), h2 = u(rng);
    double x0 = u(rng) - 1, y0 = u(rng) - 1;
    return normalize(poly({{x0, y0},
                           {x0, y0 + h1 + h2},
                           {x0 + w1, y0 + h1 + h2},
                           {x0 + w1, y0 + h1},
                           {x0 + w1 + w2, y0 + h1},
                           {x0 + w1 + w2, y0}}));
}

}  // namespace

TEST_CASE("normalize merges collinear vertices and fixes orientation") {
    auto P = normalize(poly({{0, 0}, {0, 1}, {1, 1}, {2, 1}, {2, 0}}));
    CHECK(P.vertices.size() == 4);
    CHECK(signed_area(P) < 0);

    auto ccw = normalize(poly({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    CHECK(ccw.vertices.size() == 4);
    CHECK(signed_area(ccw) < 0);
    CHECK(hausdorff_distance(ccw, rectangle(1, 1, {0.5, 0.5})) < 1e-15);
}

TEST_CASE("normalize rejects degenerate input") {
    CHECK_THROWS_AS(normalize(poly({{0, 0}, {0, 1}, {1, 1}})), GeometryError);
    // Bowtie: the cycle crosses itself.
    CHECK_THROWS_AS(normalize(poly({{0, 0}, {0, 1}, {2, 1}, {2, 2}, {1, 2}, {1, 0}})), GeometryError);
    CHECK_THROWS_AS(normalize(poly({{0, 0}, {1, 1}, {2, 0}, {1, -1}})), GeometryError);
}

TEST_CASE("edges of rectangles and the L-shape") {
    auto sq = edges(rectangle(2, 2));
    REQUIRE(sq.size() == 4);
    for (auto& e : sq) {
        CHECK(e.chi == 1);
        CHECK(e.length == doctest::Approx(2));
    }
    for (auto& e : edges(rectangle(4, 2))) CHECK(e.length == doctest::Approx(e.axis == Axis::Horizontal ? 4 : 2));

    auto L = edges(ell_shape());
    REQUIRE(L.size() == 6);
    int plus = 0, zero = 0, minus = 0;
    for (auto& e : L) (e.chi == 1 ? plus : e.chi == 0 ? zero : minus)++;
    CHECK(plus == 4);
    CHECK(zero == 2);
    CHECK(minus == 0);
}

TEST_CASE("vertex field values") {
    auto R = rectangle(2, 1);
    auto V = vertex_field(R);
    REQUIRE(V.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        auto p = R.vertices[i];
        CHECK(V[i].s1 == (p.x > 0 ? 1 : -1));
        CHECK(V[i].s2 == (p.y > 0 ? 1 : -1));
    }
    auto Lp = ell_shape();
    auto LV = vertex_field(Lp);
    for (std::size_t i = 0; i < Lp.vertices.size(); ++i) {
        if (Lp.vertices[i] == Vec2{1, 1}) {
            // Concave corner: vertical edge facing +e1 above, horizontal edge facing +e2 to the right.
            CHECK(LV[i].s1 == 1);
            CHECK(LV[i].s2 == 1);
        }
        CHECK(std::abs(LV[i].s1) == 1);
        CHECK(std::abs(LV[i].s2) == 1);
    }
}

TEST_CASE("hausdorff distance, containment and gap") {
    auto A = rectangle(1, 1);
    CHECK(hausdorff_distance(A, A) == 0.0);
    CHECK(hausdorff_distance(A, translate(A, {0.3, 0})) == doctest::Approx(0.3));
    CHECK(hausdorff_distance(rectangle(2, 2), rectangle(1, 1)) == doctest::Approx(0.5));

    CHECK(contains(rectangle(2, 2), rectangle(1, 1)));
    CHECK(boundary_gap(rectangle(2, 2), rectangle(1, 1)) == doctest::Approx(0.5));
    CHECK_FALSE(contains(rectangle(1, 1), translate(rectangle(1, 1), {5, 0})));
    CHECK(contains(rectangle(6, 6), rectangle(4, 2)));
    CHECK(boundary_gap(rectangle(6, 6), rectangle(4, 2)) == doctest::Approx(1));
    CHECK_FALSE(contains(ell_shape(), rectangle(1.8, 1.8, {1, 1})));
}

TEST_CASE("edges are invariant under cyclic rotation of the input") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
        auto P = random_staircase(rng);
        auto ref = edges(P);
        for (std::size_t r = 1; r < P.vertices.size(); ++r) {
            auto Q = P;
            std::rotate(Q.vertices.begin(), Q.vertices.begin() + r, Q.vertices.end());
            auto got = edges(normalize(Q));
            REQUIRE(got.size() == ref.size());
            auto key = [](const Edge& e) { return std::tuple(e.p.x, e.p.y, e.q.x, e.q.y, e.chi); };
            std::vector<std::tuple<double, double, double, double, int>> a, b;
            for (auto& e : ref) a.push_back(key(e));
            for (auto& e : got) b.push_back(key(e));
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            CHECK(a == b);
        }
    }
}

TEST_CASE("hausdorff triangle inequality on random triples") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
        auto A = random_staircase(rng), B = random_staircase(rng), C = random_staircase(rng);
        CHECK(hausdorff_distance(A, C) <= hausdorff_distance(A, B) + hausdorff_distance(B, C) + 1e-12);
        CHECK(hausdorff_distance(A, B) == doctest::Approx(hausdorff_distance(B, A)));
    }
}

TEST_CASE("convexity factors sum to four") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        int sum = 0;
        for (auto& e : edges(random_staircase(rng))) sum += e.chi;
        CHECK(sum == 4);
    }
    int sum = 0;
    for (auto& e : edges(rectangle(3, 1))) sum += e.chi;
    CHECK(sum == 4);
}

TEST_CASE("edge loop round trip") {
    auto P = ell_shape();
    auto L = to_loop(P);
    CHECK(L.size() == P.vertices.size());
    CHECK(hausdorff_distance(normalize(from_loop(L)), P) == 0.0);
    CHECK(hausdorff_distance(reflect_x(reflect_x(P)), P) == 0.0);
}
