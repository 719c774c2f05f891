#include "crystal/forcing.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace crystal;
using namespace crystal::forcing;

namespace {
const ForcingField unit{-1.0, 1.0, 1.0};
}

TEST_CASE("validation") {
    CHECK_NOTHROW(validate(unit));
    CHECK_THROWS_AS(validate({1.0, 1.0, 1.0}), ForcingError);
    CHECK_THROWS_AS(validate({-1.0, -0.5, 1.0}), ForcingError);
    CHECK_THROWS_AS(validate({-1.0, 1.0, 0.0}), ForcingError);
    CHECK_THROWS_AS(validate({-1.0, 1.0, 4.0}), ForcingError);
}

TEST_CASE("phase at") {
    CHECK(phase_at(unit, 0.0).kind == PhaseKind::Alpha);
    CHECK(phase_at(unit, 0.5).kind == PhaseKind::Beta);
    auto a = phase_at(unit, 0.25), b = phase_at(unit, 0.75);
    CHECK(a.kind == PhaseKind::Interface);
    CHECK(a.iface == InterfaceClass::AlphaBeta);
    CHECK(b.kind == PhaseKind::Interface);
    CHECK(b.iface == InterfaceClass::BetaAlpha);
    CHECK(g_side(unit, 0.25, -1) == -1.0);
    CHECK(g_side(unit, 0.25, 1) == 1.0);
}

TEST_CASE("exact integrals") {
    CHECK(integral_g(unit, 0, 1) == doctest::Approx(0).epsilon(1e-14));
    CHECK(integral_g(unit, 0.25, 0.75) == doctest::Approx(0.5));
    CHECK(integral_g({-2, 1, 1}, 0, 1) == doctest::Approx(-0.5));
}

TEST_CASE("phase decomposition") {
    auto d = decompose(unit, 0.25, 1.75);
    CHECK(d.ell_alpha == doctest::Approx(0).epsilon(1e-14));
    CHECK(d.ell_beta == doctest::Approx(0.5));
    auto e = decompose(unit, -2.25, 2.25);
    CHECK(e.ell_alpha == doctest::Approx(0.5));
    CHECK(e.ell_beta == doctest::Approx(0).epsilon(1e-14));
    auto f = decompose(unit, 0.37, 1.37);
    CHECK(f.ell_alpha == doctest::Approx(0).epsilon(1e-12));
    CHECK(f.ell_beta == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("interface lattice") {
    CHECK(x_N(unit, 0) == 0.25);
    CHECK(x_N(unit, 2) == 2.25);
    CHECK(x_N({-1, 1, 0.5}, 1) == 0.625);
    CHECK(on_interface(unit, x_N(unit, 3), InterfaceClass::AlphaBeta));
    CHECK(on_interface(unit, -x_N(unit, 3), InterfaceClass::BetaAlpha));
    CHECK(snap_to_interface(unit, 2.6, InterfaceClass::AlphaBeta, SnapDirection::Nearest) == doctest::Approx(2.25));
    CHECK(snap_to_interface(unit, 2.6, InterfaceClass::BetaAlpha, SnapDirection::Nearest) == doctest::Approx(2.75));
    CHECK(snap_to_interface(unit, 2.25, InterfaceClass::AlphaBeta, SnapDirection::Nearest) == 2.25);
    CHECK(snap_to_interface(unit, 2.6, InterfaceClass::AlphaBeta, SnapDirection::Right) == doctest::Approx(3.25));
    CHECK(snap_to_interface(unit, 2.6, InterfaceClass::BetaAlpha, SnapDirection::Left) == doctest::Approx(1.75));
    CHECK(next_interface(unit, 0.25) == doctest::Approx(0.75));
    CHECK(prev_interface(unit, 0.25) == doctest::Approx(-0.25));
}

TEST_CASE("symmetry, periodicity and decomposition identities on random data") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        ForcingField F{-(0.1 + 3 * u(rng)), 0.1 + 3 * u(rng), 0.0};
        F.epsilon = 8.0 / (F.beta - F.alpha) * (0.05 + 0.9 * u(rng));
        double x = 20 * (u(rng) - 0.5);
        int kk = static_cast<int>(10 * (u(rng) - 0.5));
        CHECK(phase_at(F, x).kind == phase_at(F, -x).kind);
        CHECK(g(F, x) == g(F, x + kk * F.epsilon));
        double a = 10 * (u(rng) - 0.5);
        CHECK(integral_g(F, a, a + F.epsilon) == doctest::Approx(F.epsilon * (F.alpha + F.beta) / 2));

        double b = a + 10 * u(rng);
        auto d = decompose(F, a, b);
        double ell = b - a;
        double rem = ell - F.epsilon * std::floor(ell / F.epsilon);
        CHECK(d.ell_alpha >= -1e-12);
        CHECK(d.ell_beta >= -1e-12);
        CHECK(d.ell_alpha <= F.epsilon / 2 + 1e-12);
        CHECK(d.ell_beta <= F.epsilon / 2 + 1e-12);
        CHECK(d.ell_alpha + d.ell_beta == doctest::Approx(rem).epsilon(1e-12).scale(F.epsilon));
        double expect = (F.alpha + F.beta) / 2 * (ell - d.ell_alpha - d.ell_beta) + F.alpha * d.ell_alpha +
                        F.beta * d.ell_beta;
        CHECK(d.integral == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
        CHECK(integral_g(F, a, b) == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
}
