#include "crystal/flow_eps.hpp"
#include "crystal/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace crystal;
using namespace crystal::flow_eps;

namespace {

const ForcingField unit{-1.0, 1.0, 1.0};

double width(const Polyrectangle& P) {
    double lo = 1e300, hi = -1e300;
    for (auto& v : P.vertices) {
        lo = std::min(lo, v.x);
        hi = std::max(hi, v.x);
    }
    return hi - lo;
}

double height(const Polyrectangle& P) {
    double lo = 1e300, hi = -1e300;
    for (auto& v : P.vertices) {
        lo = std::min(lo, v.y);
        hi = std::max(hi, v.y);
    }
    return hi - lo;
}

}  // namespace

TEST_CASE("snap to C-polyrectangles") {
    auto S = snap_to_C(geometry::rectangle(1.5, 1.5), unit);
    CHECK(geometry::hausdorff_distance(S, geometry::rectangle(0.5, 1.5)) < 1e-12);
    auto S2 = snap_to_C(geometry::rectangle(1.5, 1.5), {-1, 1, 0.1});
    CHECK(width(S2) == doctest::Approx(1.45));
    CHECK(geometry::hausdorff_distance(S2, geometry::rectangle(1.5, 1.5)) == doctest::Approx(0.025));
    auto C = geometry::rectangle(4.5, 3);
    CHECK(geometry::hausdorff_distance(snap_to_C(C, unit), C) == 0.0);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.3, 5.0);
    for (int k = 0; k < 50; ++k) {
        auto P = geometry::rectangle(u(rng), u(rng), {u(rng) - 2.5, 0});
        CHECK(geometry::hausdorff_distance(snap_to_C(P, unit), P) < unit.epsilon);
    }
}

TEST_CASE("initial state rejects non-calibrable data without snapping") {
    EpsOptions o;
    CHECK_THROWS_AS(initial_state(geometry::rectangle(5.0, 1.0, {0.35, 0}), unit, o), std::invalid_argument);
    o.auto_snap = true;
    auto S = snap_to_C(geometry::rectangle(5.0, 1.0, {0.35, 0}), unit);
    CHECK_NOTHROW(initial_state(S, unit, o));
    o.sample_times = {0.0, 0.1};
    CHECK_NOTHROW(run(geometry::rectangle(5.0, 1.0, {0.35, 0}), unit, 0.1, o));
}

TEST_CASE("velocities in the pinning regime") {
    auto s = initial_state(geometry::rectangle(4.5, 3), unit, {});
    auto v = velocities(s, unit);
    for (std::size_t i = 0; i < s.loop.size(); ++i) {
        if (s.loop[i].horizontal)
            CHECK(v[i] == doctest::Approx(1.0 / 2.25 - 2.0 / (8 * 2.25)));
        else {
            CHECK(v[i] == 0.0);
            CHECK(s.edges[i].status == EdgeStatus::Pinned);
        }
    }
}

TEST_CASE("off-interface rectangle follows the alpha-phase law") {
    auto s = initial_state(geometry::rectangle(0.3, 1.0), unit, {});
    auto v = velocities(s, unit);
    for (std::size_t i = 0; i < s.loop.size(); ++i)
        if (!s.loop[i].horizontal) CHECK(v[i] == doctest::Approx(2.0 / 1.0 + unit.alpha));
    auto z = step_ode(s, unit, 0.0);
    for (std::size_t i = 0; i < s.loop.size(); ++i) CHECK(z.loop[i].c == s.loop[i].c);
}

TEST_CASE("event location for a vertical edge reaching an interface") {
    // Vertical edges in the beta phase, 0.1 from the interfaces at +-0.25, inward speed about 1.1.
    auto s = initial_state(geometry::rectangle(0.7, 20.0), unit, {});
    auto ev = locate_next_event(s, unit, 10.0, 1e-2);
    REQUIRE_FALSE(ev.empty());
    CHECK(ev.front().kind == EventKind::Pin);
    CHECK(s.t == doctest::Approx(0.1 / 1.1).epsilon(2e-3));

    auto p = initial_state(geometry::rectangle(4.5, 3.0), unit, {});
    auto none = locate_next_event(p, unit, 0.1, 1e-2);
    CHECK(none.empty());
    CHECK(p.t == doctest::Approx(0.1));
}

TEST_CASE("mesoscopic pinning run") {
    EpsOptions o;
    o.sample_times = harness::linspace(0, 1.4, 15);
    auto tr = run(geometry::rectangle(4.5, 3), unit, 1.4, o);
    for (auto& s : tr.samples) {
        auto P = s.polygon();
        if (height(P) > 2) CHECK(width(P) == doctest::Approx(4.5));
    }
    CHECK(tr.count(EventKind::NonUniqueBranch) == 0);
}

TEST_CASE("mesoscopic breaking run") {
    EpsOptions o;
    o.sample_times = harness::linspace(0, 1.3, 27);
    auto tr = run(geometry::rectangle(6.5, 1.5), unit, 1.3, o);
    REQUIRE(tr.count(EventKind::Break) >= 1);
    const FlowEvent* br = nullptr;
    for (auto& e : tr.events)
        if (e.kind == EventKind::Break) {
            br = &e;
            break;
        }
    REQUIRE(br != nullptr);
    auto th = calibrate::thresholds(unit);
    REQUIRE(br->span.size() == 2);
    CHECK((br->span[1] - br->span[0]) / 2 == doctest::Approx(forcing::x_N(unit, 2) + th.delta_of_N(2)).epsilon(1e-6));
    CHECK(tr.count(EventKind::Vanish) >= 1);
    CHECK(tr.count(EventKind::Recompose) >= 1);
    // Event times increase.
    for (std::size_t i = 1; i < tr.events.size(); ++i) CHECK(tr.events[i].t >= tr.events[i - 1].t);
}

TEST_CASE("stationary C-rectangle when alpha + beta < 0") {
    // 1/x + (alpha+beta)/2 + (alpha-beta) eps/(8x) vanishes at x = x_1 = 1.25; vertical edges are long.
    ForcingField F{-2, 1, 1};
    auto P = geometry::rectangle(2.5, 2.0);
    auto s = initial_state(P, F, {});
    for (double v : velocities(s, F)) CHECK(v == doctest::Approx(0).scale(1.0).epsilon(1e-12));
    EpsOptions o;
    o.sample_times = {0.0, 1.0, 2.0};
    auto tr = run(P, F, 2.0, o);
    CHECK(tr.events.empty());
    for (auto& st : tr.samples) CHECK(geometry::hausdorff_distance(st.polygon(), P) < 1e-12);
}

TEST_CASE("area balance") {
    auto s = initial_state(geometry::rectangle(0.3, 1.0), unit, {});
    double dt = 1e-4;
    auto z = step_ode(s, unit, dt);
    double rate = 0.0;
    auto v = velocities(s, unit);
    for (std::size_t i = 0; i < s.loop.size(); ++i) rate -= v[i] * geometry::loop_geom(s.loop, i).length;
    double da = (geometry::area(geometry::from_loop(z.loop)) - geometry::area(geometry::from_loop(s.loop))) / dt;
    CHECK(da == doctest::Approx(rate).epsilon(1e-3));
}
