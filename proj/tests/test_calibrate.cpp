#include "crystal/calibrate.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace crystal;
using namespace crystal::calibrate;

namespace {

const ForcingField unit{-1.0, 1.0, 1.0};

HorizontalEdge edge(double p, double q, int chi, int n0 = 1) {
    return {p, q, chi == 0 ? n0 : -chi, chi == 0 ? n0 : chi};
}

struct RandomEdge {
    ForcingField F;
    HorizontalEdge e;
};

RandomEdge random_edge(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RandomEdge r;
    r.F = {-(0.2 + 2.8 * u(rng)), 0.2 + 2.8 * u(rng), 0.0};
    r.F.epsilon = std::min(2.0, 8.0 / (r.F.beta - r.F.alpha)) * (0.05 + 0.9 * u(rng));
    int chi = static_cast<int>(std::floor(3 * u(rng))) - 1;
    double p = r.F.epsilon * (6 * u(rng) - 3), w = u(rng);
    r.e = edge(p, p + r.F.epsilon * (0.1 + 11.9 * w * w), chi, u(rng) < 0.5 ? -1 : 1);
    return r;
}

}  // namespace

TEST_CASE("boundary conditions") {
    CHECK(boundary_conditions(1) == std::pair{-1, 1});
    CHECK(boundary_conditions(-1) == std::pair{1, -1});
    CHECK(boundary_conditions(0, 1) == std::pair{1, 1});
    CHECK(boundary_conditions(0, -1) == std::pair{-1, -1});
}

TEST_CASE("candidate profile of the symmetric C+ edge") {
    auto e = edge(-2.25, 2.25, 1);
    auto prof = candidate_profile(e, unit);
    CHECK(prof.slope_alpha == doctest::Approx(4.0 / 3));
    CHECK(prof.slope_beta == doctest::Approx(-2.0 / 3));
    CHECK(prof.values.front() == doctest::Approx(-1));
    CHECK(prof.values.back() == doctest::Approx(1).epsilon(1e-10));
    CHECK(n_at(e, unit, prof.velocity, 0.25) - n_at(e, unit, prof.velocity, -0.75) == doctest::Approx(1.0 / 3));
}

TEST_CASE("calibrability examples") {
    auto r = is_calibrable(edge(-2.25, 2.25, 1), unit);
    CHECK(r.calibrable);
    CHECK(r.analytic_calibrable);
    CHECK(r.velocity == doctest::Approx(1.0 / 3));

    auto nc = is_calibrable(edge(0.6, 5.6, 1), unit);
    CHECK_FALSE(nc.calibrable);
    CHECK_FALSE(nc.analytic_calibrable);
    CHECK(nc.failure_point.has_value());
    CHECK(nc.max_abs_n > 1);

    auto z = is_calibrable(edge(0.25, 0.65, 0, 1), unit);
    CHECK(z.calibrable);
    CHECK(z.velocity == doctest::Approx(1));

    auto zl = is_calibrable(edge(0.25, 3.25, 0, 1), unit);
    CHECK(zl.calibrable);
    CHECK(zl.velocity == doctest::Approx(0).epsilon(1e-12));

    // C- edge of length 4.5 with a beta remainder of eps/2.
    CHECK(horizontal_velocity(edge(-2.75, 1.75, -1), unit) == doctest::Approx(-1.0 / 3));
    CHECK_THROWS(horizontal_velocity(edge(0.6, 5.6, 1), unit));
}

TEST_CASE("vertical velocities") {
    // Off interface, alpha phase.
    auto v = vertical_velocity(unit, 0.0, 1, 1, 4.0);
    CHECK(v.kind == VerticalKind::Moving);
    CHECK(v.velocity == doctest::Approx(-0.5));
    // +e1 outward with alpha inside and beta outside, long edge.
    auto p = vertical_velocity(unit, 0.25, 1, 1, 3.0);
    CHECK(p.kind == VerticalKind::Pinned);
    CHECK(p.velocity == 0.0);
    CHECK(vertical_velocity(unit, 0.25, 1, 0, 0.5).kind == VerticalKind::Pinned);
    CHECK(vertical_velocity(unit, 0.25, -1, 0, 0.5).kind == VerticalKind::Unstable);
    // Short edge on a stable interface moves inward.
    auto s = vertical_velocity(unit, 0.25, 1, 1, 1.0);
    CHECK(s.kind == VerticalKind::Moving);
    CHECK(s.velocity > 0);
    CHECK(pinning_threshold(unit, 1) == 2.0);
    CHECK(pinning_threshold(unit, 0) == 0.0);
    CHECK(pinning_threshold({-1, 4, 0.5}, -1) == 0.5);
}

TEST_CASE("thresholds") {
    auto th = thresholds(unit);
    CHECK(th.N_bar == 1);
    CHECK(th.delta_of_N(2) == doctest::Approx(0.75));
    CHECK(th.delta_of_N(0) == doctest::Approx(0.25));
    CHECK(th.sigma_tilde(3.0) == doctest::Approx(1.0 / 6));
    CHECK(th.N_of_length(4.5) == 2);
    for (long N = 0; N < 30; ++N) {
        double d = th.delta_of_N(N);
        CHECK(d > 0);
        CHECK(d < unit.epsilon);
        CHECK((d > unit.epsilon / 2) == (N >= th.N_bar));
    }
}

TEST_CASE("break points of a symmetric edge at threshold") {
    auto th = thresholds(unit);
    double half = forcing::x_N(unit, 2) + th.delta_of_N(2);
    auto e = edge(-half, half, 1);
    auto sp = break_points(e, unit);
    REQUIRE(sp.size() == 2);
    CHECK(sp[0].x == doctest::Approx(-2.25));
    CHECK(sp[1].x == doctest::Approx(2.25));
    // Each piece is calibrable with the same velocity.
    auto vc = is_calibrable(edge(-2.25, 2.25, 1), unit);
    auto vl = is_calibrable(HorizontalEdge{-half, -2.25, -1, sp[0].sign}, unit);
    auto vr = is_calibrable(HorizontalEdge{2.25, half, sp[1].sign, 1}, unit);
    CHECK(vc.calibrable);
    CHECK(vl.calibrable);
    CHECK(vr.calibrable);

    CHECK_THROWS(break_points(edge(-2.25, 2.25, 1), unit));
}

TEST_CASE("random edges: analytic decision, consistency and velocity identities") {
    std::mt19937_64 rng(17);
    int compared = 0;
    for (int k = 0; k < 600; ++k) {
        auto [F, e] = random_edge(rng);
        auto r = is_calibrable(e, F);
        if (!r.marginal) {
            ++compared;
            CHECK(r.calibrable == r.analytic_calibrable);
        }
        // The candidate profile closes up at q.
        auto prof = candidate_profile(e, F);
        CHECK(prof.values.back() == doctest::Approx(e.n_q).epsilon(1e-10).scale(1.0));
        // Per-period increment.
        auto d = forcing::decompose(F, e.p, e.q);
        double ell = e.length();
        double inc = F.epsilon * (4 * e.chi() + (F.beta - F.alpha) * (d.ell_beta - d.ell_alpha)) / (2 * ell);
        double x0 = e.p + 1e-3 * F.epsilon;
        if (x0 + F.epsilon < e.q) {
            double got = n_at(e, F, prof.velocity, x0 + F.epsilon) - n_at(e, F, prof.velocity, x0);
            CHECK(got == doctest::Approx(inc).epsilon(1e-9).scale(1.0));
            if (e.chi() != 0) CHECK((inc > 0) == (e.chi() > 0));
        }
        if (r.calibrable) {
            double mean = 2.0 * e.chi() / ell + forcing::integral_g(F, e.p, e.q) / ell;
            CHECK(r.velocity == doctest::Approx(mean).epsilon(1e-12));
            // Mirror through x = 0.
            auto m = is_calibrable(HorizontalEdge{-e.q, -e.p, -e.n_q, -e.n_p}, F);
            CHECK(m.calibrable);
            CHECK(m.velocity == doctest::Approx(r.velocity).epsilon(1e-12));
        }
    }
    CHECK(compared > 500);
}
