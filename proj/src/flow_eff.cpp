#include "crystal/flow_eff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crystal::flow_eff {

namespace {

constexpr double vanish_tol = 1e-9;
constexpr int bisection_steps = 60;

double pin_length(const EffectiveLaw& law, int chi) {
    if (chi > 0) return -2.0 / law.alpha;
    if (chi < 0) return 2.0 / law.beta;
    return 0.0;
}

// Next requested sample time strictly after t (or T).
struct Sampler {
    const std::vector<double>& times;
    std::size_t next = 0;
    explicit Sampler(const std::vector<double>& ts) : times(ts) {}
    bool every_step() const { return times.empty(); }
    double target(double t, double T) {
        while (next < times.size() && times[next] <= t + 1e-14) ++next;
        return next < times.size() ? std::min(times[next], T) : T;
    }
    bool due(double t) const {
        return std::any_of(times.begin(), times.end(), [t](double s) { return std::abs(s - t) <= 1e-12; });
    }
};

std::vector<double> coords(const geometry::EdgeLoop& L) {
    std::vector<double> c(L.size());
    for (std::size_t i = 0; i < L.size(); ++i) c[i] = L[i].c;
    return c;
}

geometry::EdgeLoop with_coords(geometry::EdgeLoop L, const std::vector<double>& c) {
    for (std::size_t i = 0; i < L.size(); ++i) L[i].c = c[i];
    return L;
}

std::vector<double> poly_rhs(const EffectiveLaw& law, const geometry::EdgeLoop& L) {
    std::vector<double> d(L.size());
    for (std::size_t i = 0; i < L.size(); ++i) {
        auto g = geometry::loop_geom(L, i);
        d[i] = -L[i].normal * edge_velocity(law, L[i].horizontal, g.chi, g.length);
    }
    return d;
}

std::vector<double> poly_rk4(const EffectiveLaw& law, const geometry::EdgeLoop& L, const std::vector<double>& c0,
                             double dt) {
    std::size_t n = c0.size();
    auto axpy = [&](const std::vector<double>& k, double h) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = c0[i] + h * k[i];
        return r;
    };
    auto k1 = poly_rhs(law, with_coords(L, c0));
    auto k2 = poly_rhs(law, with_coords(L, axpy(k1, dt / 2)));
    auto k3 = poly_rhs(law, with_coords(L, axpy(k2, dt / 2)));
    auto k4 = poly_rhs(law, with_coords(L, axpy(k3, dt)));
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = c0[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return r;
}

bool poly_event(const EffectiveLaw& law, const geometry::EdgeLoop& L, const std::vector<double>& c0,
                const std::vector<double>& c1) {
    auto A = with_coords(L, c0), B = with_coords(L, c1);
    for (std::size_t i = 0; i < L.size(); ++i) {
        auto ga = geometry::loop_geom(A, i), gb = geometry::loop_geom(B, i);
        if (ga.length > vanish_tol && gb.length <= vanish_tol) return true;
        if (!L[i].horizontal && ga.chi != 0) {
            double thr = pin_length(law, ga.chi);
            if ((ga.length >= thr) != (gb.length >= thr)) return true;
        }
    }
    return false;
}

FlowState poly_state(const EffectiveLaw& law, const geometry::EdgeLoop& L, double t) {
    FlowState s;
    s.t = t;
    s.loop = L;
    for (std::size_t i = 0; i < L.size(); ++i) {
        auto g = geometry::loop_geom(L, i);
        double v = edge_velocity(law, L[i].horizontal, g.chi, g.length);
        s.velocity.push_back(v);
        bool pinned = !L[i].horizontal && (g.chi == 0 || g.length >= pin_length(law, g.chi));
        s.status.push_back(pinned ? EdgeStatus::Pinned : EdgeStatus::Moving);
    }
    return s;
}

// Removes a vanished edge and merges its neighbours. Returns false when the loop collapses.
bool remove_edge(geometry::EdgeLoop& L, std::size_t i, double t, std::vector<FlowEvent>& log) {
    std::size_t n = L.size();
    std::size_t ip = (i + n - 1) % n, in = (i + 1) % n;
    if (L[ip].normal != L[in].normal) {
        if (n == 4) return false;
        throw GeometryError("edge vanished between opposite parallel edges: unsupported topology change");
    }
    log.push_back({t, EventKind::Vanish, {L[i].id}, {}, ""});
    log.push_back({t, EventKind::Recompose, {L[ip].id, L[in].id}, {}, ""});
    L[ip].c = 0.5 * (L[ip].c + L[in].c);
    std::size_t a = std::max(i, in), b = std::min(i, in);
    L.erase(L.begin() + static_cast<long>(a));
    L.erase(L.begin() + static_cast<long>(b));
    return true;
}

// Concave piecewise-linear graph over increasing abscissas.
struct Concave {
    std::vector<double> x, y;
    std::size_t peak = 0;

    void finish() {
        peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    }
    double operator()(double X) const {
        if (X <= x.front()) return y.front();
        if (X >= x.back()) return y.back();
        std::size_t j = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), X) - x.begin());
        double a = x[j - 1], b = x[j];
        if (b == a) return std::max(y[j - 1], y[j]);
        return y[j - 1] + (y[j] - y[j - 1]) * (X - a) / (b - a);
    }
    // {X : f(X) >= Y}; empty when lo > hi.
    std::pair<double, double> superlevel(double Y) const {
        if (y[peak] < Y) return {1.0, 0.0};
        std::size_t j = 0;
        {
            std::size_t lo = 0, hi = peak;  // first index in [0,peak] with y >= Y
            while (lo < hi) {
                std::size_t mid = (lo + hi) / 2;
                if (y[mid] >= Y) hi = mid; else lo = mid + 1;
            }
            j = lo;
        }
        double a = j == 0 ? x[0] : x[j - 1] + (x[j] - x[j - 1]) * (Y - y[j - 1]) / (y[j] - y[j - 1]);
        std::size_t k;
        {
            std::size_t lo = peak, hi = y.size() - 1;  // last index in [peak,end] with y >= Y
            while (lo < hi) {
                std::size_t mid = (lo + hi + 1) / 2;
                if (y[mid] >= Y) lo = mid; else hi = mid - 1;
            }
            k = lo;
        }
        double b = k + 1 == y.size() ? x[k] : x[k] + (x[k + 1] - x[k]) * (y[k] - Y) / (y[k] - y[k + 1]);
        return {a, b};
    }
};

struct Chains {
    Concave upper;  // U(x)
    Concave lower;  // -L(x)
};

Chains split_convex(std::vector<Vec2> v) {
    std::size_t n = v.size();
    if (n < 3) throw std::invalid_argument("convex input needs at least 3 points");
    double a2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) a2 += v[i].x * v[(i + 1) % n].y - v[(i + 1) % n].x * v[i].y;
    if (a2 > 0) std::reverse(v.begin(), v.end());  // clockwise in y-up coordinates
    double scale = 0.0;
    for (auto& p : v) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = v[i], b = v[(i + 1) % n], c = v[(i + 2) % n];
        double cr = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
        if (cr > 1e-12 * scale * scale) throw std::invalid_argument("input is not convex");
    }
    auto pick = [&](bool right, bool top) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i) {
            double dx = right ? v[i].x - v[best].x : v[best].x - v[i].x;
            double dy = top ? v[i].y - v[best].y : v[best].y - v[i].y;
            if (dx > 0 || (dx == 0 && dy > 0)) best = i;
        }
        return best;
    };
    Chains ch;
    for (std::size_t i = pick(false, true);; i = (i + 1) % n) {
        ch.upper.x.push_back(v[i].x);
        ch.upper.y.push_back(v[i].y);
        if (i == pick(true, true)) break;
    }
    std::vector<Vec2> low;
    for (std::size_t i = pick(true, false);; i = (i + 1) % n) {
        low.push_back(v[i]);
        if (i == pick(false, false)) break;
    }
    std::reverse(low.begin(), low.end());
    for (auto& p : low) {
        ch.lower.x.push_back(p.x);
        ch.lower.y.push_back(-p.y);
    }
    ch.upper.finish();
    ch.lower.finish();
    return ch;
}

struct ConvexState {
    double Yt, Yb, Xl, Xr;
};

struct ConvexGeom {
    double top_lo, top_hi, bot_lo, bot_hi;
    double l_top, l_bot, l_left, l_right;
};

ConvexGeom convex_geom(const Chains& ch, double shift, const ConvexState& s) {
    ConvexGeom g{};
    auto top = ch.upper.superlevel(s.Yt + shift);
    g.top_lo = std::max(top.first, s.Xl);
    g.top_hi = std::min(top.second, s.Xr);
    g.l_top = std::max(0.0, g.top_hi - g.top_lo);
    auto bot = ch.lower.superlevel(-(s.Yb - shift));
    g.bot_lo = std::max(bot.first, s.Xl);
    g.bot_hi = std::min(bot.second, s.Xr);
    g.l_bot = std::max(0.0, g.bot_hi - g.bot_lo);
    auto vlen = [&](double X) {
        double up = std::min(ch.upper(X) - shift, s.Yt);
        double dn = std::max(-ch.lower(X) + shift, s.Yb);
        return std::max(0.0, up - dn);
    };
    g.l_left = vlen(s.Xl);
    g.l_right = vlen(s.Xr);
    return g;
}

ConvexFront make_front(const Chains& ch, double t, double sp, const ConvexState& s) {
    ConvexFront f;
    f.t = t;
    f.shift = sp * t;
    auto g = convex_geom(ch, f.shift, s);
    f.top = {true, s.Yt, g.l_top, g.top_lo, g.top_hi};
    f.bottom = {true, s.Yb, g.l_bot, g.bot_lo, g.bot_hi};
    double lu = std::min(ch.upper(s.Xl) - f.shift, s.Yt), ld = std::max(-ch.lower(s.Xl) + f.shift, s.Yb);
    double ru = std::min(ch.upper(s.Xr) - f.shift, s.Yt), rd = std::max(-ch.lower(s.Xr) + f.shift, s.Yb);
    f.left = {false, s.Xl, g.l_left, ld, lu};
    f.right = {false, s.Xr, g.l_right, rd, ru};
    std::vector<double> xs{s.Xl, s.Xr, g.top_lo, g.top_hi, g.bot_lo, g.bot_hi};
    for (double x : ch.upper.x) xs.push_back(x);
    for (double x : ch.lower.x) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    std::vector<double> grid;
    for (double x : xs)
        if (x >= s.Xl && x <= s.Xr && (grid.empty() || x - grid.back() > 1e-12)) grid.push_back(x);
    for (double x : grid) f.boundary.push_back({x, std::min(ch.upper(x) - f.shift, s.Yt)});
    for (auto it = grid.rbegin(); it != grid.rend(); ++it)
        f.boundary.push_back({*it, std::max(-ch.lower(*it) + f.shift, s.Yb)});
    return f;
}

}  // namespace

void validate(const EffectiveLaw& law) {
    if (!(law.alpha < 0.0 && law.beta > 0.0)) throw std::invalid_argument("effective law needs alpha < 0 < beta");
}

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

double H_g(const EffectiveLaw& law, double ell) {
    if (!(ell > 0.0)) throw std::invalid_argument("H_g needs a positive length");
    if (ell >= -2.0 / law.alpha) return 0.0;
    double a = law.alpha, b = law.beta;
    return (2.0 + a * ell) * (2.0 + b * ell) / (ell * (2.0 + (a + b) * ell / 2.0));
}

double H_g_numeric(const EffectiveLaw& law, double ell, int cells) {
    if (!(ell > 0.0)) throw std::invalid_argument("H_g needs a positive length");
    if (ell >= -2.0 / law.alpha) return 0.0;
    cells = (cells + 3) / 4 * 4;
    double sum = 0.0;
    for (int i = 0; i < cells; ++i) {
        double s = (i + 0.5) / cells;
        double d = std::min(s, 1.0 - s);
        double g = d <= 0.25 ? law.alpha : law.beta;
        sum += 1.0 / (2.0 / ell + g);
    }
    return cells / sum;
}

RectRun rectangle_flow(const EffectiveLaw& law, double l10, double l20, double T, const StepOptions& opt) {
    validate(law);
    if (!(l10 > 0 && l20 > 0)) throw std::invalid_argument("lengths must be positive");
    const double thr = -2.0 / law.alpha;
    auto rhs = [&](double a, double b, double& da, double& db) {
        da = -2.0 * H_g(law, std::max(b, 1e-300));
        db = -4.0 / a - (law.alpha + law.beta);
    };
    auto rk4 = [&](double a, double b, double dt, double& na, double& nb) {
        double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        rhs(a, b, k1a, k1b);
        rhs(a + dt / 2 * k1a, b + dt / 2 * k1b, k2a, k2b);
        rhs(a + dt / 2 * k2a, b + dt / 2 * k2b, k3a, k3b);
        rhs(a + dt * k3a, b + dt * k3b, k4a, k4b);
        na = a + dt / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
        nb = b + dt / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
    };
    RectRun run;
    Sampler smp(opt.sample_times);
    double t = 0.0, a = l10, b = l20;
    if (smp.every_step() || smp.due(0.0)) run.samples.push_back({t, a, b});
    while (t < T - 1e-14) {
        double lmin = std::min(a, b);
        if (lmin < opt.extinction_length) {
            run.extinct = true;
            break;
        }
        double target = smp.every_step() ? T : smp.target(t, T);
        double dt = std::min({opt.dt, 0.02 * lmin * lmin, target - t});
        double na, nb;
        rk4(a, b, dt, na, nb);
        if ((b >= thr) != (nb >= thr)) {
            double lo = 0.0, hi = dt;
            for (int k = 0; k < bisection_steps; ++k) {
                double mid = 0.5 * (lo + hi), ma, mb;
                rk4(a, b, mid, ma, mb);
                if ((b >= thr) != (mb >= thr)) hi = mid; else lo = mid;
            }
            dt = hi;
            rk4(a, b, dt, na, nb);
        }
        a = na;
        b = nb;
        t = dt == target - t ? target : t + dt;
        if (smp.every_step() || smp.due(t)) run.samples.push_back({t, a, b});
    }
    run.t_end = t;
    if (run.samples.empty() || run.samples.back().t != t) run.samples.push_back({t, a, b});
    return run;
}

double rectangle_extinction_time(const EffectiveLaw& law, double l10, double l20, double T_max) {
    StepOptions opt;
    opt.dt = 1e-2;
    opt.sample_times = {T_max};
    auto run = rectangle_flow(law, l10, l20, T_max, opt);
    return run.extinct ? run.t_end : std::numeric_limits<double>::infinity();
}

RectSample rectangle_at(const RectRun& run, double t) {
    const auto& s = run.samples;
    if (s.empty()) throw std::invalid_argument("empty run");
    if (t <= s.front().t) return s.front();
    if (t >= s.back().t) return s.back();
    auto it = std::lower_bound(s.begin(), s.end(), t, [](const RectSample& a, double x) { return a.t < x; });
    const RectSample& B = *it;
    const RectSample& A = *(it - 1);
    double w = B.t > A.t ? (t - A.t) / (B.t - A.t) : 0.0;
    return {t, A.l1 + w * (B.l1 - A.l1), A.l2 + w * (B.l2 - A.l2)};
}

double edge_velocity(const EffectiveLaw& law, bool horizontal, int chi, double ell) {
    double l = std::max(ell, 1e-300);
    if (horizontal) return chi == 0 ? 0.5 * (law.alpha + law.beta) : 2.0 * chi / l + 0.5 * (law.alpha + law.beta);
    if (chi > 0 && l < -2.0 / law.alpha) return harmonic_mean(law.alpha + 2.0 / l, law.beta + 2.0 / l);
    if (chi < 0 && l < 2.0 / law.beta) return harmonic_mean(law.alpha - 2.0 / l, law.beta - 2.0 / l);
    return 0.0;
}

FlowTrajectory poly_flow(const EffectiveLaw& law, const Polyrectangle& P, double T, const StepOptions& opt) {
    validate(law);
    auto L = geometry::to_loop(geometry::normalize(P));
    FlowTrajectory tr;
    Sampler smp(opt.sample_times);
    double t = 0.0;
    if (smp.every_step() || smp.due(0.0)) tr.samples.push_back(poly_state(law, L, t));
    while (t < T - 1e-14) {
        double lmin = std::numeric_limits<double>::infinity(), lall = lmin;
        for (std::size_t i = 0; i < L.size(); ++i) {
            auto g = geometry::loop_geom(L, i);
            lall = std::min(lall, g.length);
            if (g.chi != 0) lmin = std::min(lmin, g.length);
        }
        if (L.size() == 4 && lall < opt.extinction_length) {
            tr.extinct = true;
            tr.events.push_back({t, EventKind::Extinction, {}, {}, ""});
            break;
        }
        double target = smp.every_step() ? T : smp.target(t, T);
        double dt = std::min(opt.dt, target - t);
        if (std::isfinite(lmin)) dt = std::min(dt, 0.02 * lmin * lmin);
        auto c0 = coords(L);
        auto c1 = poly_rk4(law, L, c0, dt);
        if (poly_event(law, L, c0, c1)) {
            double lo = 0.0, hi = dt;
            for (int k = 0; k < bisection_steps; ++k) {
                double mid = 0.5 * (lo + hi);
                if (poly_event(law, L, c0, poly_rk4(law, L, c0, mid))) hi = mid; else lo = mid;
            }
            dt = hi;
            c1 = poly_rk4(law, L, c0, dt);
        }
        L = with_coords(L, c1);
        t = dt == target - t ? target : t + dt;

        bool collapsed = false;
        for (bool again = true; again && !collapsed;) {
            again = false;
            for (std::size_t i = 0; i < L.size(); ++i) {
                auto g = geometry::loop_geom(L, i);
                bool tiny = g.length <= vanish_tol || (g.chi != 0 && L.size() > 4 && g.length < opt.extinction_length);
                if (!tiny) continue;
                if (!remove_edge(L, i, t, tr.events)) collapsed = true;
                again = true;
                break;
            }
        }
        if (collapsed) {
            tr.extinct = true;
            tr.events.push_back({t, EventKind::Extinction, {}, {}, ""});
            break;
        }
        if (smp.every_step() || smp.due(t)) tr.samples.push_back(poly_state(law, L, t));
    }
    tr.t_end = t;
    if (!tr.extinct && (tr.samples.empty() || tr.samples.back().t != t)) tr.samples.push_back(poly_state(law, L, t));
    return tr;
}

ConvexRun convex_flow(const EffectiveLaw& law, const std::vector<Vec2>& C0, double T, const StepOptions& opt,
                      double seed_depth) {
    validate(law);
    Chains ch = split_convex(C0);
    const double sp = 0.5 * (law.alpha + law.beta);
    ConvexState s{ch.upper.y[ch.upper.peak] - seed_depth, -ch.lower.y[ch.lower.peak] + seed_depth,
                  ch.upper.x.front() + seed_depth, ch.upper.x.back() - seed_depth};
    auto rhs = [&](double t, const ConvexState& z) {
        auto g = convex_geom(ch, sp * t, z);
        auto pos = [](double l) { return std::max(l, 1e-12); };
        return ConvexState{-(2.0 / pos(g.l_top) + sp), 2.0 / pos(g.l_bot) + sp, H_g(law, pos(g.l_left)),
                           -H_g(law, pos(g.l_right))};
    };
    auto add = [](const ConvexState& a, const ConvexState& k, double h) {
        return ConvexState{a.Yt + h * k.Yt, a.Yb + h * k.Yb, a.Xl + h * k.Xl, a.Xr + h * k.Xr};
    };
    ConvexRun run;
    Sampler smp(opt.sample_times);
    double t = 0.0;
    if (smp.every_step() || smp.due(0.0)) run.samples.push_back(make_front(ch, t, sp, s));
    while (t < T - 1e-14) {
        auto g = convex_geom(ch, sp * t, s);
        double lmin = std::min({g.l_top, g.l_bot, g.l_left, g.l_right});
        if (s.Yt - s.Yb < opt.extinction_length || s.Xr - s.Xl < opt.extinction_length) {
            run.extinct = true;
            break;
        }
        double target = smp.every_step() ? T : smp.target(t, T);
        double dt = std::min({opt.dt, 0.02 * std::max(lmin, 1e-6) * std::max(lmin, 1e-6), target - t});
        auto k1 = rhs(t, s);
        auto k2 = rhs(t + dt / 2, add(s, k1, dt / 2));
        auto k3 = rhs(t + dt / 2, add(s, k2, dt / 2));
        auto k4 = rhs(t + dt, add(s, k3, dt));
        s = ConvexState{s.Yt + dt / 6 * (k1.Yt + 2 * k2.Yt + 2 * k3.Yt + k4.Yt),
                        s.Yb + dt / 6 * (k1.Yb + 2 * k2.Yb + 2 * k3.Yb + k4.Yb),
                        s.Xl + dt / 6 * (k1.Xl + 2 * k2.Xl + 2 * k3.Xl + k4.Xl),
                        s.Xr + dt / 6 * (k1.Xr + 2 * k2.Xr + 2 * k3.Xr + k4.Xr)};
        t = dt == target - t ? target : t + dt;
        if (smp.every_step() || smp.due(t)) run.samples.push_back(make_front(ch, t, sp, s));
    }
    if (run.samples.empty() || run.samples.back().t != t) run.samples.push_back(make_front(ch, t, sp, s));
    return run;
}

std::vector<Vec2> circle(double R, int points, Vec2 center) {
    std::vector<Vec2> v;
    v.reserve(static_cast<std::size_t>(points));
    const double pi = std::acos(-1.0);
    for (int k = 0; k < points; ++k) {
        double th = -2.0 * pi * k / points;
        v.push_back({center.x + R * std::cos(th), center.y + R * std::sin(th)});
    }
    return v;
}

}  // namespace crystal::flow_eff
