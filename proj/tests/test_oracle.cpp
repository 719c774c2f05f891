#include "crystal/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace crystal;
using namespace crystal::oracle;

namespace {
const ForcingField unit{-1.0, 1.0, 1.0};
}

TEST_CASE("taut string on the calibrable C+ edge") {
    HorizontalEdge e{-2.25, 2.25, -1, 1};
    auto s = variational_field(e, unit, 400);
    double lo = 1e9, hi = -1e9;
    for (double v : s.velocity) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo == doctest::Approx(1.0 / 3).epsilon(1e-3));
    CHECK(hi == doctest::Approx(1.0 / 3).epsilon(1e-3));
    CHECK(is_calibrable_oracle(e, unit, 400));
    for (double n : s.n) CHECK(std::abs(n) <= 1 + 1e-12);
}

TEST_CASE("taut string detects a non-calibrable edge") {
    HorizontalEdge e{0.6, 5.6, -1, 1};
    CHECK(velocity_spread(variational_field(e, unit, 400)) > 0.1);
    CHECK_FALSE(is_calibrable_oracle(e, unit, 400));
}

TEST_CASE("homogeneous medium gives a linear field") {
    // alpha = beta is outside the validated domain; the oracle itself does not need it.
    ForcingField F{-0.5, -0.5, 1.0};
    HorizontalEdge e{0.0, 3.0, -1, 1};
    auto s = variational_field(e, F, 200);
    for (double v : s.velocity) CHECK(v == doctest::Approx(2.0 / 3 - 0.5).epsilon(1e-9));
    for (std::size_t i = 0; i < s.x.size(); ++i) CHECK(s.n[i] == doctest::Approx(-1 + 2 * s.x[i] / 3).epsilon(1e-9));
}

TEST_CASE("constancy defect stays within the grid tolerance") {
    HorizontalEdge e{-2.25, 2.25, -1, 1};
    for (int M : {100, 200, 400, 800}) CHECK(velocity_spread(variational_field(e, unit, M)) < grid_constant / M + 1e-6);
}

TEST_CASE("constant-forcing rectangle") {
    auto eq = constant_forcing_rectangle(-1, 2, 2, 5);
    for (auto& s : eq.samples) {
        CHECK(std::abs(s.l1 - 2) < 1e-9);
        CHECK(std::abs(s.l2 - 2) < 1e-9);
    }
    auto big = constant_forcing_rectangle(-1, 10, 10, 20);
    CHECK_FALSE(big.extinct);
    auto& a = big.samples[big.samples.size() - 2];
    auto& b = big.samples.back();
    CHECK((b.l1 - a.l1) / (b.t - a.t) == doctest::Approx(2).epsilon(0.15));

    auto shrink = constant_forcing_rectangle(1, 3, 1, 100);
    CHECK(shrink.extinct);
    CHECK(shrink.t_end < 100);
    for (auto& s : shrink.samples)
        if (s.t <= 0.9 * shrink.t_end) CHECK(std::abs(s.U - shrink.samples[0].U) / (1 + std::abs(shrink.samples[0].U)) < 1e-6);
}
