#pragma once

#include <stdexcept>

namespace crystal {

// Two-phase layered medium: g_eps(x) = alpha where dist(x/eps, Z) <= 1/4, beta elsewhere.
struct ForcingField {
    double alpha = -1.0;
    double beta = 1.0;
    double epsilon = 1.0;
};

enum class InterfaceClass { AlphaBeta, BetaAlpha, NotOnInterface };

enum class PhaseKind { Alpha, Beta, Interface };

struct Phase {
    PhaseKind kind = PhaseKind::Alpha;
    InterfaceClass iface = InterfaceClass::NotOnInterface;
};

struct PhaseDecomposition {
    double ell = 0.0;
    double ell_alpha = 0.0;
    double ell_beta = 0.0;
    double integral = 0.0;
};

enum class SnapDirection { Left, Right, Nearest };

class ForcingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace forcing {

constexpr double interface_tol = 1e-9;

void validate(const ForcingField& F);

Phase phase_at(const ForcingField& F, double x);
// Phase value on the open side of x (just right if side > 0, just left if side < 0).
double g_side(const ForcingField& F, double x, int side);
// Value of g at a non-interface point; interfaces resolve to the right-hand side.
double g(const ForcingField& F, double x);

double integral_g(const ForcingField& F, double a, double b);
double alpha_measure(const ForcingField& F, double a, double b);
PhaseDecomposition decompose(const ForcingField& F, double a, double b);

double x_N(const ForcingField& F, long N);
double snap_to_interface(const ForcingField& F, double x, InterfaceClass which, SnapDirection dir);
bool on_interface(const ForcingField& F, double x, InterfaceClass which);

// Smallest interface abscissa strictly greater than x (resp. largest strictly smaller),
// with the class of that interface.
double next_interface(const ForcingField& F, double x, InterfaceClass* cls = nullptr);
double prev_interface(const ForcingField& F, double x, InterfaceClass* cls = nullptr);

}  // namespace forcing
}  // namespace crystal
