#pragma once

#include "crystal/geometry.hpp"
#include "crystal/trajectory.hpp"

#include <vector>

namespace crystal {

struct EffectiveLaw {
    double alpha = -1.0;
    double beta = 1.0;
};

namespace flow_eff {

void validate(const EffectiveLaw& law);

double harmonic_mean(double a, double b);
// Truncated harmonic mean of 2/l + g over one period.
double H_g(const EffectiveLaw& law, double ell);
// Same quantity by direct quadrature of 1 / (2/l + g(s)) over s in [0,1).
double H_g_numeric(const EffectiveLaw& law, double ell, int cells = 4096);

struct RectSample {
    double t = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
};

struct RectRun {
    std::vector<RectSample> samples;
    bool extinct = false;
    double t_end = 0.0;
};

struct StepOptions {
    double dt = 1e-3;                  // step cap
    std::vector<double> sample_times;  // empty: record every step
    double extinction_length = 1e-6;
};

// l1' = -2 H_g(l2), l2' = -4/l1 - (alpha + beta).
RectRun rectangle_flow(const EffectiveLaw& law, double l10, double l20, double T, const StepOptions& opt = {});
double rectangle_extinction_time(const EffectiveLaw& law, double l10, double l20, double T_max = 1e3);
// Linear interpolation between recorded samples.
RectSample rectangle_at(const RectRun& run, double t);

// Inward normal velocity of a loop edge under the effective polyrectangle law.
double edge_velocity(const EffectiveLaw& law, bool horizontal, int chi, double ell);

FlowTrajectory poly_flow(const EffectiveLaw& law, const Polyrectangle& P, double T, const StepOptions& opt = {});

struct Facet {
    bool horizontal = true;
    double position = 0.0;  // y for horizontal facets, x for vertical ones
    double length = 0.0;
    double lo = 0.0, hi = 0.0;  // extent along the facet
};

struct ConvexFront {
    double t = 0.0;
    double shift = 0.0;             // vertical translation of the arcs toward the interior
    Facet top, bottom, left, right;
    std::vector<Vec2> boundary;     // polyline of the current set, clockwise
};

struct ConvexRun {
    std::vector<ConvexFront> samples;
    bool extinct = false;
};

// C0: vertices of a convex polygon (any orientation). The arcs translate vertically toward the
// interior at (alpha+beta)/2; horizontal facets move at 2/l + (alpha+beta)/2, vertical ones at H_g(l).
ConvexRun convex_flow(const EffectiveLaw& law, const std::vector<Vec2>& C0, double T, const StepOptions& opt = {},
                      double seed_depth = 1e-7);

std::vector<Vec2> circle(double R, int points = 2048, Vec2 center = {});

}  // namespace flow_eff
}  // namespace crystal
