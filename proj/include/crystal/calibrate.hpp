#pragma once

#include "crystal/forcing.hpp"
#include "crystal/geometry.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace crystal {

// Horizontal edge [p,q] x {y} with prescribed first components of the Cahn-Hoffmann field at
// its endpoints. The convexity factor is (n_q - n_p) / 2.
struct HorizontalEdge {
    double p = 0.0;
    double q = 0.0;
    int n_p = -1;
    int n_q = 1;

    int chi() const { return (n_q - n_p) / 2; }
    double length() const { return q - p; }
};

struct CahnHoffmannProfile {
    std::vector<double> breakpoints;
    std::vector<double> values;
    double velocity = 0.0;
    double slope_alpha = 0.0;
    double slope_beta = 0.0;
};

enum class Criterion { SinglePhase, ZeroCurvShort, ZeroCurvLong, CurvatureDominant, CEdge, LongPositive, LongNegative };

std::string to_string(Criterion c);

struct CalibrabilityReport {
    bool calibrable = false;           // direct check on the candidate profile
    bool analytic_calibrable = false;  // decision of the matching proposition
    bool consistent = true;
    bool marginal = false;
    double velocity = 0.0;
    double max_abs_n = 1.0;
    double max_interior_abs_n = 0.0;
    std::optional<double> failure_point;
    Criterion criterion = Criterion::SinglePhase;
    std::optional<double> sigma1, sigma2, sigma_star, sigma_tilde;
    double slack = 0.0;  // signed distance to the analytic threshold where one exists
};

struct SplitPoint {
    double x = 0.0;
    int sign = 0;  // value of n at x (+1 or -1)
};

// Extreme values of the candidate profile at interior interfaces.
struct InteriorExtremes {
    bool has_max = false;  // some alpha->beta interface inside (p,q)
    bool has_min = false;
    double max_n = -1e300, min_n = 1e300;
    double max_abs = 0.0;
};

namespace calibrate {

constexpr double constraint_tol = 1e-8;
constexpr double marginal_band = 1e-6;

std::pair<int, int> boundary_conditions(int chi, int n0 = 1);
// Boundary values from the two vertex field values of a horizontal edge (at p, at q).
std::pair<int, int> boundary_conditions(const Edge& e, VertexFieldValue at_p, VertexFieldValue at_q);

double calibration_velocity(const HorizontalEdge& e, const ForcingField& F);
double n_at(const HorizontalEdge& e, const ForcingField& F, double v, double x);
InteriorExtremes interior_extremes(const HorizontalEdge& e, const ForcingField& F);

CahnHoffmannProfile candidate_profile(const HorizontalEdge& e, const ForcingField& F);
CalibrabilityReport is_calibrable(const HorizontalEdge& e, const ForcingField& F);
// Throws if the edge is not calibrable.
double horizontal_velocity(const HorizontalEdge& e, const ForcingField& F);

enum class VerticalKind { Moving, Pinned, Unstable };

struct VerticalVelocity {
    VerticalKind kind = VerticalKind::Moving;
    double velocity = 0.0;  // Moving: the velocity; Pinned: 0
    double v_in = 0.0;      // one-sided velocities when on an interface
    double v_out = 0.0;
};

// Vertical edge at abscissa x with outward normal sign (+1 for +e1), convexity chi, length ell.
VerticalVelocity vertical_velocity(const ForcingField& F, double x, int normal, int chi, double ell);

double pinning_threshold(const ForcingField& F, int chi);

struct Thresholds {
    ForcingField F;
    long N_bar = 0;
    double delta_of_N(long N) const;
    long N_of_length(double ell) const;
    double m(double ell_tilde) const;
    double h(double ell_tilde) const;
    double sigma_tilde(double ell_tilde) const;
    double sigma_star(double ell_star) const;
    double pinning(int chi) const;
};

Thresholds thresholds(const ForcingField& F);

// Split abscissas of an edge sitting at its calibrability threshold. Throws when the edge is
// strictly inside its calibrable region.
std::vector<SplitPoint> break_points(const HorizontalEdge& e, const ForcingField& F);

}  // namespace calibrate
}  // namespace crystal
