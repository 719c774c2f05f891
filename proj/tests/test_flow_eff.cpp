#include "crystal/flow_eff.hpp"
#include "crystal/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace crystal;
using namespace crystal::flow_eff;

namespace {
const EffectiveLaw law{-1.0, 1.0};

double vertex_gap(const Polyrectangle& A, const Polyrectangle& B) {
    if (A.vertices.size() != B.vertices.size()) return 1e300;
    double d = 0;
    for (std::size_t i = 0; i < A.vertices.size(); ++i)
        d = std::max({d, std::abs(A.vertices[i].x - B.vertices[i].x), std::abs(A.vertices[i].y - B.vertices[i].y)});
    return d;
}
}  // namespace

TEST_CASE("harmonic mean law") {
    CHECK(H_g(law, 1.0) == doctest::Approx(1.5));
    CHECK(H_g(law, 2.0) == 0.0);
    CHECK(H_g(law, 4.0) == 0.0);
    CHECK_THROWS(H_g(law, 0.0));
    for (int k = 1; k <= 100; ++k) {
        double ell = 0.01 + (2.0 - 0.01) * k / 101.0;
        CHECK(std::abs(H_g(law, ell) - H_g_numeric(law, ell)) < 1e-10);
        EffectiveLaw other{-2.5, 0.7};
        double l2 = 0.01 + (0.8 - 0.01) * k / 101.0;
        CHECK(std::abs(H_g(other, l2) - H_g_numeric(other, l2)) < 1e-10 * std::max(1.0, H_g(other, l2)));
    }
}

TEST_CASE("edge velocities of the polyrectangle law") {
    CHECK(edge_velocity(law, false, 1, 1.0) == doctest::Approx(1.5));
    CHECK(edge_velocity(law, false, -1, 1.0) == doctest::Approx(-1.5));
    CHECK(edge_velocity(law, false, 1, 3.0) == 0.0);
    CHECK(edge_velocity(law, false, 0, 0.5) == 0.0);
    CHECK(edge_velocity({-2, 1}, true, 0, 1.0) == doctest::Approx(-0.5));
    CHECK(edge_velocity(law, true, 1, 4.0) == doctest::Approx(0.5));
}

TEST_CASE("rectangle flow regimes") {
    auto eq = rectangle_flow({-2, 1}, 4, 3, 5);
    CHECK(eq.samples.back().l1 == 4.0);
    CHECK(eq.samples.back().l2 == doctest::Approx(3).epsilon(1e-12));

    // Pinned horizontal length while l2 > 2.
    auto pin = rectangle_flow(law, 4.5, 3, 0.2);
    for (auto& s : pin.samples) {
        CHECK(s.l1 == 4.5);
        CHECK(s.l2 == doctest::Approx(3 - 4 / 4.5 * s.t).epsilon(1e-12));
    }
    auto full = rectangle_flow(law, 4.5, 3, 100);
    CHECK(full.extinct);

    auto c1 = rectangle_flow(law, 1.5, 1.5, 10);
    CHECK(c1.extinct);
    for (std::size_t i = 1; i < c1.samples.size(); ++i) {
        CHECK(c1.samples[i].l1 < c1.samples[i - 1].l1);
        CHECK(c1.samples[i].l2 < c1.samples[i - 1].l2);
    }
}

TEST_CASE("regime hand-off is continuous") {
    StepOptions so;
    so.dt = 1e-3;
    auto run = rectangle_flow(law, 4.5, 2.5, 3.0, so);
    for (std::size_t i = 1; i < run.samples.size(); ++i) {
        CHECK(std::abs(run.samples[i].l1 - run.samples[i - 1].l1) < 0.05);
        CHECK(std::abs(run.samples[i].l2 - run.samples[i - 1].l2) < 0.05);
    }
}

TEST_CASE("sandwich between the constant-forcing flows") {
    for (auto [a, b] : {std::pair{1.5, 1.5}, {1.0, 1.8}, {3.0, 0.8}}) {
        auto eff = rectangle_flow(law, a, b, 20);
        auto lo = oracle::constant_forcing_rectangle(law.beta, a, b, 20);
        auto hi = oracle::constant_forcing_rectangle(law.alpha, a, b, 20);
        for (auto& s : lo.samples) {
            if (s.t > 0.95 * lo.t_end || s.t > eff.t_end) continue;
            auto e = rectangle_at(eff, s.t);
            CHECK(e.l1 >= s.l1 - 1e-6);
            CHECK(e.l2 >= s.l2 - 1e-6);
        }
        for (auto& s : hi.samples) {
            if (s.t > eff.t_end) break;
            auto e = rectangle_at(eff, s.t);
            CHECK(e.l1 <= s.l1 + 1e-6);
            CHECK(e.l2 <= s.l2 + 1e-6);
        }
    }
}

TEST_CASE("poly flow specializes to the rectangle law") {
    StepOptions so;
    so.sample_times = {0.0, 0.1, 0.2, 0.3};
    auto tr = poly_flow(law, geometry::rectangle(1.5, 1.5), 0.3, so);
    auto rr = rectangle_flow(law, 1.5, 1.5, 0.3, so);
    REQUIRE(tr.samples.size() == rr.samples.size());
    for (std::size_t i = 0; i < rr.samples.size(); ++i) {
        auto P = tr.samples[i].polygon();
        auto R = geometry::rectangle(rr.samples[i].l1, rr.samples[i].l2);
        CHECK(geometry::hausdorff_distance(P, R) < 1e-9);
    }
}

TEST_CASE("poly flow equivariances") {
    Polyrectangle L = geometry::normalize({{{0, 0}, {0, 1.5}, {0.8, 1.5}, {0.8, 0.7}, {1.6, 0.7}, {1.6, 0}}});
    StepOptions so;
    so.sample_times = {0.0, 0.05, 0.1};
    auto base = poly_flow(law, L, 0.1, so);
    auto up = poly_flow(law, geometry::translate(L, {0, 0.37}), 0.1, so);
    auto refl = poly_flow(law, geometry::reflect_x(L), 0.1, so);
    REQUIRE(base.samples.size() == up.samples.size());
    for (std::size_t i = 0; i < base.samples.size(); ++i) {
        auto P = base.samples[i].polygon();
        CHECK(vertex_gap(geometry::translate(P, {0, 0.37}), up.samples[i].polygon()) < 1e-9);
        CHECK(geometry::hausdorff_distance(geometry::reflect_x(P), refl.samples[i].polygon()) < 1e-9);
    }
    CHECK(base.count(EventKind::Vanish) == up.count(EventKind::Vanish));
}

TEST_CASE("circle grows four facets") {
    StepOptions so;
    so.sample_times = {0.0, 0.01, 0.05, 0.1};
    auto run = convex_flow(law, circle(2.0, 2048), 0.1, so);
    REQUIRE(run.samples.size() == 4);
    for (std::size_t i = 1; i < run.samples.size(); ++i) {
        auto& f = run.samples[i];
        CHECK(f.top.length > 0);
        CHECK(f.bottom.length > 0);
        CHECK(f.left.length > 0);
        CHECK(f.right.length > 0);
        CHECK(f.top.length > run.samples[i - 1].top.length);
        CHECK(f.shift == 0.0);
    }
    CHECK_THROWS(convex_flow(law, {{0, 0}, {0, 1}, {1, 1}, {0.5, 0.5}, {1, 0}}, 0.1));
}
