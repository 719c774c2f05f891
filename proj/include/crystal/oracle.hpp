#pragma once

#include "crystal/calibrate.hpp"
#include "crystal/forcing.hpp"

#include <vector>

namespace crystal::oracle {

struct TautString {
    std::vector<double> x;         // grid nodes over [p, q]
    std::vector<double> n;         // minimizing field at the nodes
    std::vector<double> velocity;  // (n_{i+1} - n_i)/h_i + mean of g on cell i
    int contacts = 0;              // interior obstacle contacts of the string
};

// Minimizes sum_i ((n_{i+1}-n_i)/h_i + gbar_i)^2 h_i over |n_i| <= 1 with fixed endpoint values.
// Nodes lie on the lattice eps/M (M is rounded up to a multiple of 4 so that every interface is
// a node) plus the two endpoints. Solved exactly as a taut string through the shifted tube.
TautString variational_field(const HorizontalEdge& e, const ForcingField& F, int M);

double velocity_spread(const TautString& s);

constexpr double grid_constant = 1e-3;

bool is_calibrable_oracle(const HorizontalEdge& e, const ForcingField& F, int M);

struct RectangleSample {
    double t = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double U = 0.0;
};

struct ConstantForcingRun {
    std::vector<RectangleSample> samples;
    bool extinct = false;
    double t_end = 0.0;
};

double constant_forcing_U(double gamma, double l1, double l2);

// l1' = -4/l2 - 2 gamma, l2' = -4/l1 - 2 gamma, classical RK4 with dt <= dt_max, refined near
// extinction. Samples are recorded every `every` steps.
ConstantForcingRun constant_forcing_rectangle(double gamma, double l10, double l20, double T,
                                              double dt_max = 1e-3, int every = 10);

}  // namespace crystal::oracle
