#include "crystal/forcing.hpp"

#include <algorithm>
#include <cmath>

namespace crystal::forcing {

namespace {

// Antiderivative of g(s) over one unit period starting at 0: alpha on [0,1/4], beta on
// [1/4,3/4], alpha on [3/4,1).
double unit_primitive(double a, double b, double f) {
    if (f <= 0.25) return a * f;
    if (f <= 0.75) return a * 0.25 + b * (f - 0.25);
    return a * 0.25 + b * 0.5 + a * (f - 0.75);
}

double primitive(const ForcingField& F, double x, double a, double b) {
    double s = x / F.epsilon;
    double k = std::floor(s);
    return F.epsilon * ((a + b) * 0.5 * k + unit_primitive(a, b, s - k));
}

// Signed offset of x/eps from the nearest integer, in [-1/2, 1/2].
double offset(const ForcingField& F, double x) {
    double s = x / F.epsilon;
    return s - std::round(s);
}

}  // namespace

void validate(const ForcingField& F) {
    if (!(F.alpha < 0.0)) throw ForcingError("alpha must be negative");
    if (!(F.beta > 0.0)) throw ForcingError("beta must be positive");
    if (!(F.epsilon > 0.0)) throw ForcingError("epsilon must be positive");
    if (!(F.epsilon < 8.0 / (F.beta - F.alpha))) throw ForcingError("epsilon must be below 8/(beta-alpha)");
}

Phase phase_at(const ForcingField& F, double x) {
    double f = offset(F, x);
    double d = std::abs(f);
    if (std::abs(d - 0.25) < interface_tol)
        return {PhaseKind::Interface, f > 0 ? InterfaceClass::AlphaBeta : InterfaceClass::BetaAlpha};
    return {d < 0.25 ? PhaseKind::Alpha : PhaseKind::Beta, InterfaceClass::NotOnInterface};
}

double g_side(const ForcingField& F, double x, int side) {
    Phase ph = phase_at(F, x);
    if (ph.kind == PhaseKind::Alpha) return F.alpha;
    if (ph.kind == PhaseKind::Beta) return F.beta;
    bool beta_right = ph.iface == InterfaceClass::AlphaBeta;
    return (side > 0) == beta_right ? F.beta : F.alpha;
}

double g(const ForcingField& F, double x) { return g_side(F, x, +1); }

double integral_g(const ForcingField& F, double a, double b) {
    return primitive(F, b, F.alpha, F.beta) - primitive(F, a, F.alpha, F.beta);
}

double alpha_measure(const ForcingField& F, double a, double b) {
    return primitive(F, b, 1.0, 0.0) - primitive(F, a, 1.0, 0.0);
}

PhaseDecomposition decompose(const ForcingField& F, double a, double b) {
    PhaseDecomposition d;
    d.ell = b - a;
    double ma = alpha_measure(F, a, b);
    double mb = d.ell - ma;
    double k = std::floor(d.ell / F.epsilon + 1e-12);
    d.ell_alpha = std::max(0.0, ma - 0.5 * F.epsilon * k);
    d.ell_beta = std::max(0.0, mb - 0.5 * F.epsilon * k);
    d.integral = integral_g(F, a, b);
    return d;
}

double x_N(const ForcingField& F, long N) { return (static_cast<double>(N) + 0.25) * F.epsilon; }

double snap_to_interface(const ForcingField& F, double x, InterfaceClass which, SnapDirection dir) {
    double o = which == InterfaceClass::BetaAlpha ? -0.25 : 0.25;
    double k = x / F.epsilon - o;
    double r = std::round(k);
    if (std::abs(k - r) < interface_tol) return (r + o) * F.epsilon;
    double j;
    switch (dir) {
        case SnapDirection::Left: j = std::floor(k); break;
        case SnapDirection::Right: j = std::ceil(k); break;
        default: {
            double lo = std::floor(k), hi = std::ceil(k);
            j = (k - lo <= hi - k) ? lo : hi;
        }
    }
    return (j + o) * F.epsilon;
}

bool on_interface(const ForcingField& F, double x, InterfaceClass which) {
    Phase ph = phase_at(F, x);
    return ph.kind == PhaseKind::Interface && ph.iface == which;
}

double next_interface(const ForcingField& F, double x, InterfaceClass* cls) {
    // Interfaces sit at (k/2 + 1/4) eps; odd k gives beta->alpha.
    double k = std::floor((x / F.epsilon - 0.25) * 2.0) + 1.0;
    double y = (k * 0.5 + 0.25) * F.epsilon;
    if (y <= x) {
        k += 1.0;
        y = (k * 0.5 + 0.25) * F.epsilon;
    }
    if (cls) *cls = std::fmod(std::abs(k), 2.0) == 0.0 ? InterfaceClass::AlphaBeta : InterfaceClass::BetaAlpha;
    return y;
}

double prev_interface(const ForcingField& F, double x, InterfaceClass* cls) {
    double k = std::ceil((x / F.epsilon - 0.25) * 2.0) - 1.0;
    double y = (k * 0.5 + 0.25) * F.epsilon;
    if (y >= x) {
        k -= 1.0;
        y = (k * 0.5 + 0.25) * F.epsilon;
    }
    if (cls) *cls = std::fmod(std::abs(k), 2.0) == 0.0 ? InterfaceClass::AlphaBeta : InterfaceClass::BetaAlpha;
    return y;
}

}  // namespace crystal::forcing
