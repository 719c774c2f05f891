#include "crystal/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crystal {

std::string to_string(Criterion c) {
    switch (c) {
        case Criterion::SinglePhase: return "SinglePhase";
        case Criterion::ZeroCurvShort: return "ZeroCurvShort";
        case Criterion::ZeroCurvLong: return "ZeroCurvLong";
        case Criterion::CurvatureDominant: return "CurvatureDominant";
        case Criterion::CEdge: return "CEdge";
        case Criterion::LongPositive: return "LongPositive";
        case Criterion::LongNegative: return "LongNegative";
    }
    return "?";
}

namespace calibrate {

namespace {

constexpr double interior_margin = 1e-12;

// Interface abscissas (k + shift) * eps strictly inside (p, q): returns k range [k0, k1].
bool lattice_range(const ForcingField& F, double p, double q, double shift, double& k0, double& k1) {
    double margin = interior_margin * std::max(1.0, std::max(std::abs(p), std::abs(q)));
    k0 = std::floor((p + margin) / F.epsilon - shift) + 1.0;
    k1 = std::ceil((q - margin) / F.epsilon - shift) - 1.0;
    while ((k0 - 1.0 + shift) * F.epsilon > p + margin) k0 -= 1.0;
    while ((k0 + shift) * F.epsilon <= p + margin) k0 += 1.0;
    while ((k1 + 1.0 + shift) * F.epsilon < q - margin) k1 += 1.0;
    while ((k1 + shift) * F.epsilon >= q - margin) k1 -= 1.0;
    return k0 <= k1;
}

bool has_interior(const ForcingField& F, const HorizontalEdge& e, InterfaceClass c) {
    double k0, k1;
    return lattice_range(F, e.p, e.q, c == InterfaceClass::AlphaBeta ? 0.25 : 0.75, k0, k1);
}

struct Analytic {
    bool calibrable = false;
    Criterion criterion = Criterion::SinglePhase;
    std::optional<double> sigma1, sigma2, sigma_star, sigma_tilde;
    double slack = std::numeric_limits<double>::infinity();
};

Analytic long_edge(const HorizontalEdge& e, const ForcingField& F, int chi) {
    // chi = +1: the candidate decreases in beta; chi = -1 is the mirror with phases swapped.
    Analytic a;
    a.criterion = chi > 0 ? Criterion::LongPositive : Criterion::LongNegative;
    double good = chi > 0 ? F.alpha : F.beta;
    InterfaceClass leave = chi > 0 ? InterfaceClass::AlphaBeta : InterfaceClass::BetaAlpha;
    if (forcing::g_side(F, e.p, +1) != good || forcing::g_side(F, e.q, -1) != good) {
        a.calibrable = false;
        return a;
    }
    InterfaceClass c1, c2;
    double y1 = forcing::next_interface(F, e.p, &c1);
    double y2 = forcing::prev_interface(F, e.q, &c2);
    if (c1 != leave || c2 == leave) throw std::logic_error("unexpected interface pattern");
    double s1 = y1 - e.p, s2 = e.q - y2;
    double eps = F.epsilon, w = F.beta - F.alpha;
    double lt = e.length() - eps - s1 - s2;
    double A = w * (lt + eps / 2) + 4.0;
    if (!(A > 0)) throw std::logic_error("sigma region denominator is not positive");
    double m = eps * w / A;
    double h = 0.5 * eps * (w * (lt + eps / 2) - 4.0) / A;
    a.sigma1 = s1;
    a.sigma2 = s2;
    a.slack = std::min(s1 - (m * s2 + h), s2 - (m * s1 + h));
    a.calibrable = a.slack >= -1e-12;
    double den_t = w * (lt - eps / 2) + 4.0;
    if (den_t > 0) a.sigma_tilde = 0.5 * eps * (w * (lt + eps / 2) - 4.0) / den_t;
    bool one_sided_right = std::abs(s2 - eps / 2) < forcing::interface_tol * eps;
    bool one_sided_left = std::abs(s1 - eps / 2) < forcing::interface_tol * eps;
    if (one_sided_right != one_sided_left) {
        double s = one_sided_right ? s1 : s2;
        double ls = e.length() - eps / 2 - s;
        double den = w * (ls - eps / 2) + 4.0;
        if (den > 0) a.sigma_star = 0.5 * eps * (w * (ls + eps / 2) - 4.0) / den;
    }
    return a;
}

Analytic analytic(const HorizontalEdge& e, const ForcingField& F) {
    Analytic a;
    double ell = e.length();
    if (!has_interior(F, e, InterfaceClass::AlphaBeta) && !has_interior(F, e, InterfaceClass::BetaAlpha)) {
        a.criterion = Criterion::SinglePhase;
        a.calibrable = true;
        return a;
    }
    int chi = e.chi();
    double w = F.beta - F.alpha;
    if (chi == 0) {
        int n0 = e.n_p;
        InterfaceClass own = n0 > 0 ? InterfaceClass::AlphaBeta : InterfaceClass::BetaAlpha;
        if (ell < F.epsilon * (1.0 - forcing::interface_tol)) {
            a.criterion = Criterion::ZeroCurvShort;
            a.calibrable = !has_interior(F, e, own);
        } else {
            a.criterion = Criterion::ZeroCurvLong;
            a.calibrable = forcing::on_interface(F, e.p, own) && forcing::on_interface(F, e.q, own);
        }
        return a;
    }
    auto d = forcing::decompose(F, e.p, e.q);
    double K = chi > 0 ? ell + d.ell_alpha - d.ell_beta : ell - d.ell_alpha + d.ell_beta;
    if (K <= 4.0 / w) {
        a.criterion = Criterion::CurvatureDominant;
        a.calibrable = true;
        return a;
    }
    InterfaceClass cp = chi > 0 ? InterfaceClass::BetaAlpha : InterfaceClass::AlphaBeta;
    InterfaceClass cq = chi > 0 ? InterfaceClass::AlphaBeta : InterfaceClass::BetaAlpha;
    if (ell >= F.epsilon && forcing::on_interface(F, e.p, cp) && forcing::on_interface(F, e.q, cq)) {
        a.criterion = Criterion::CEdge;
        a.calibrable = true;
        return a;
    }
    return long_edge(e, F, chi);
}

}  // namespace

std::pair<int, int> boundary_conditions(int chi, int n0) {
    if (chi > 0) return {-1, 1};
    if (chi < 0) return {1, -1};
    return {n0, n0};
}

std::pair<int, int> boundary_conditions(const Edge& e, VertexFieldValue at_p, VertexFieldValue at_q) {
    if (e.axis != Axis::Horizontal) throw std::invalid_argument("boundary conditions need a horizontal edge");
    if (e.chi == 0 && at_p.s1 != at_q.s1)
        throw std::invalid_argument("inconsistent vertex field on a zero-curvature edge");
    auto bc = boundary_conditions(e.chi, at_p.s1);
    if (bc.first != at_p.s1 || bc.second != at_q.s1)
        throw std::invalid_argument("vertex field does not match the convexity factor");
    return bc;
}

double calibration_velocity(const HorizontalEdge& e, const ForcingField& F) {
    double ell = e.length();
    if (ell <= 0.0) return e.chi() == 0 ? forcing::g(F, e.p) : e.chi() * std::numeric_limits<double>::max();
    return (2.0 * e.chi() + forcing::integral_g(F, e.p, e.q)) / ell;
}

double n_at(const HorizontalEdge& e, const ForcingField& F, double v, double x) {
    return e.n_p + v * (x - e.p) - forcing::integral_g(F, e.p, x);
}

InteriorExtremes interior_extremes(const HorizontalEdge& e, const ForcingField& F) {
    InteriorExtremes r;
    double v = calibration_velocity(e, F);
    double k0, k1;
    if (lattice_range(F, e.p, e.q, 0.25, k0, k1)) {
        r.has_max = true;
        double a = n_at(e, F, v, (k0 + 0.25) * F.epsilon);
        double b = n_at(e, F, v, (k1 + 0.25) * F.epsilon);
        r.max_n = std::max(a, b);
        r.max_abs = std::max({r.max_abs, std::abs(a), std::abs(b)});
    }
    if (lattice_range(F, e.p, e.q, 0.75, k0, k1)) {
        r.has_min = true;
        double a = n_at(e, F, v, (k0 + 0.75) * F.epsilon);
        double b = n_at(e, F, v, (k1 + 0.75) * F.epsilon);
        r.min_n = std::min(a, b);
        r.max_abs = std::max({r.max_abs, std::abs(a), std::abs(b)});
    }
    return r;
}

CahnHoffmannProfile candidate_profile(const HorizontalEdge& e, const ForcingField& F) {
    CahnHoffmannProfile pr;
    pr.velocity = calibration_velocity(e, F);
    pr.slope_alpha = pr.velocity - F.alpha;
    pr.slope_beta = pr.velocity - F.beta;
    pr.breakpoints.push_back(e.p);
    double x = e.p;
    while (true) {
        double y = forcing::next_interface(F, x);
        if (y >= e.q - interior_margin * std::max(1.0, std::abs(e.q))) break;
        pr.breakpoints.push_back(y);
        x = y;
    }
    pr.breakpoints.push_back(e.q);
    for (double b : pr.breakpoints) pr.values.push_back(n_at(e, F, pr.velocity, b));
    return pr;
}

CalibrabilityReport is_calibrable(const HorizontalEdge& e, const ForcingField& F) {
    CalibrabilityReport r;
    double ell = e.length();
    r.velocity = calibration_velocity(e, F);
    auto ex = interior_extremes(e, F);
    r.max_interior_abs_n = ex.max_abs;
    r.max_abs_n = std::max(1.0, ex.max_abs);
    r.calibrable = ex.max_abs <= 1.0 + constraint_tol;

    if (!r.calibrable) {
        // Maxima sit on alpha->beta interfaces and form an arithmetic sequence; same for minima.
        double first = std::numeric_limits<double>::infinity();
        double step = r.velocity * F.epsilon - 0.5 * (F.alpha + F.beta) * F.epsilon;
        for (int s : {+1, -1}) {
            double shift = s > 0 ? 0.25 : 0.75;
            double k0, k1;
            if (!lattice_range(F, e.p, e.q, shift, k0, k1)) continue;
            double n0 = s * n_at(e, F, r.velocity, (k0 + shift) * F.epsilon);
            double ds = s * step;
            double k;
            if (n0 > 1.0 + constraint_tol)
                k = k0;
            else if (ds > 0)
                k = k0 + std::ceil((1.0 + constraint_tol - n0) / ds);
            else
                continue;
            while (k > k0 && s * n_at(e, F, r.velocity, (k - 1 + shift) * F.epsilon) > 1.0 + constraint_tol) k -= 1;
            while (k <= k1 && s * n_at(e, F, r.velocity, (k + shift) * F.epsilon) <= 1.0 + constraint_tol) k += 1;
            if (k <= k1) first = std::min(first, (k + shift) * F.epsilon);
        }
        if (std::isfinite(first)) r.failure_point = first;
    }

    Analytic a = analytic(e, F);
    r.analytic_calibrable = a.calibrable;
    r.criterion = a.criterion;
    r.sigma1 = a.sigma1;
    r.sigma2 = a.sigma2;
    r.sigma_star = a.sigma_star;
    r.sigma_tilde = a.sigma_tilde;
    r.slack = a.slack;
    r.marginal = std::abs(ex.max_abs - 1.0) < marginal_band * std::max(1.0, ell) ||
                 std::abs(a.slack) < marginal_band;
    r.consistent = r.marginal || r.calibrable == r.analytic_calibrable;
    return r;
}

double horizontal_velocity(const HorizontalEdge& e, const ForcingField& F) {
    auto ex = interior_extremes(e, F);
    if (ex.max_abs > 1.0 + constraint_tol) throw std::domain_error("edge is not calibrable; break it first");
    return calibration_velocity(e, F);
}

VerticalVelocity vertical_velocity(const ForcingField& F, double x, int normal, int chi, double ell) {
    VerticalVelocity r;
    double curv = 0.0;
    if (chi != 0) curv = ell > 0 ? 2.0 * chi / ell : chi * std::numeric_limits<double>::max();
    Phase ph = forcing::phase_at(F, x);
    if (ph.kind != PhaseKind::Interface) {
        r.kind = VerticalKind::Moving;
        r.velocity = curv + (ph.kind == PhaseKind::Alpha ? F.alpha : F.beta);
        r.v_in = r.v_out = r.velocity;
        return r;
    }
    r.v_in = curv + forcing::g_side(F, x, -normal);
    r.v_out = curv + forcing::g_side(F, x, normal);
    if (r.v_in <= 0.0 && r.v_out >= 0.0) {
        r.kind = VerticalKind::Pinned;
        r.velocity = 0.0;
    } else if (r.v_in > 0.0 && r.v_out < 0.0) {
        r.kind = VerticalKind::Unstable;
    } else {
        r.kind = VerticalKind::Moving;
        r.velocity = r.v_in > 0.0 ? r.v_in : r.v_out;
    }
    return r;
}

double pinning_threshold(const ForcingField& F, int chi) {
    if (chi > 0) return -2.0 / F.alpha;
    if (chi < 0) return 2.0 / F.beta;
    return 0.0;
}

double Thresholds::delta_of_N(long N) const {
    double x = forcing::x_N(F, N), w = F.beta - F.alpha, eps = F.epsilon;
    return x * w * eps / (2.0 + (2.0 * x - eps / 2) * w / 2.0);
}

long Thresholds::N_of_length(double ell) const {
    return static_cast<long>(std::floor(ell / (2.0 * F.epsilon) - 0.25 + 1e-12));
}

double Thresholds::m(double lt) const {
    double w = F.beta - F.alpha;
    return F.epsilon * w / (w * (lt + F.epsilon / 2) + 4.0);
}

double Thresholds::h(double lt) const {
    double w = F.beta - F.alpha;
    return 0.5 * F.epsilon * (w * (lt + F.epsilon / 2) - 4.0) / (w * (lt + F.epsilon / 2) + 4.0);
}

double Thresholds::sigma_tilde(double lt) const {
    double w = F.beta - F.alpha;
    return 0.5 * F.epsilon * (w * (lt + F.epsilon / 2) - 4.0) / (w * (lt - F.epsilon / 2) + 4.0);
}

double Thresholds::sigma_star(double ls) const { return sigma_tilde(ls); }

double Thresholds::pinning(int chi) const { return pinning_threshold(F, chi); }

Thresholds thresholds(const ForcingField& F) {
    Thresholds t;
    t.F = F;
    double w = F.beta - F.alpha;
    long N = 0;
    while (!(2.0 * forcing::x_N(F, N) + F.epsilon / 2 > 4.0 / w)) ++N;
    t.N_bar = N;
    return t;
}

std::vector<SplitPoint> break_points(const HorizontalEdge& e, const ForcingField& F) {
    auto ex = interior_extremes(e, F);
    double band = marginal_band * std::max(1.0, e.length());
    if (ex.max_abs < 1.0 - band) throw std::logic_error("break_points called on an edge away from its threshold");
    double v = calibration_velocity(e, F);
    double top = ex.max_abs;
    std::vector<SplitPoint> out;
    for (int s : {+1, -1}) {
        double shift = s > 0 ? 0.25 : 0.75;
        double k0, k1;
        if (!lattice_range(F, e.p, e.q, shift, k0, k1)) continue;
        auto val = [&](double k) { return s * n_at(e, F, v, (k + shift) * F.epsilon); };
        double a = val(k0), b = val(k1);
        double tie = 1e-9;
        if (std::abs(b - a) <= tie * (k1 - k0 + 1)) {
            if (a >= top - tie)
                for (double k = k0; k <= k1; k += 1) out.push_back({(k + shift) * F.epsilon, s});
            continue;
        }
        if (a >= top - tie) out.push_back({(k0 + shift) * F.epsilon, s});
        if (k1 != k0 && b >= top - tie) out.push_back({(k1 + shift) * F.epsilon, s});
    }
    std::sort(out.begin(), out.end(), [](const SplitPoint& a, const SplitPoint& b) { return a.x < b.x; });
    return out;
}

}  // namespace calibrate
}  // namespace crystal
