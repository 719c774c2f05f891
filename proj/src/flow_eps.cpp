#include "crystal/flow_eps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crystal {

BranchPolicy parse_branch_policy(const std::string& s) {
    if (s == "cross") return BranchPolicy::Cross;
    if (s == "stay") return BranchPolicy::Stay;
    throw std::invalid_argument("unknown branch policy: " + s);
}

std::string to_string(BranchPolicy p) { return p == BranchPolicy::Cross ? "cross" : "stay"; }

namespace flow_eps {

namespace {

constexpr int max_bisections = 80;

double cell_next(const ForcingField& F, double x) { return forcing::next_interface(F, x + 1e-7 * F.epsilon); }
double cell_prev(const ForcingField& F, double x) { return forcing::prev_interface(F, x - 1e-7 * F.epsilon); }

std::size_t index_of(const EpsState& s, long id) {
    for (std::size_t i = 0; i < s.loop.size(); ++i)
        if (s.loop[i].id == id) return i;
    return s.loop.size();
}

HorizontalEdge as_horizontal(const geometry::LoopGeom& g) { return {g.lo, g.hi, g.n_lo, g.n_hi}; }

double break_margin(const EpsState& s, std::size_t i, const ForcingField& F) {
    auto g = geometry::loop_geom(s.loop, i);
    if (g.length <= 0.0) return 1.0;
    auto ex = calibrate::interior_extremes(as_horizontal(g), F);
    return 1.0 + 1e-9 - ex.max_abs;
}

calibrate::VerticalVelocity vertical_class(const EpsState& s, std::size_t i, const ForcingField& F) {
    auto g = geometry::loop_geom(s.loop, i);
    return calibrate::vertical_velocity(F, s.loop[i].c, s.loop[i].normal, g.chi, g.length);
}

void log_event(std::vector<FlowEvent>* log, FlowEvent ev) {
    if (log) log->push_back(std::move(ev));
}

// Sets the status of a vertical edge from its position. arrival is the direction of motion
// the edge had when it reached its current abscissa (0 if unknown).
void classify(EpsState& s, std::size_t i, const ForcingField& F, BranchPolicy policy, int arrival,
              std::vector<FlowEvent>* log) {
    auto& e = s.loop[i];
    auto& st = s.edges[i];
    Phase ph = forcing::phase_at(F, e.c);
    if (ph.kind != PhaseKind::Interface) {
        st.status = EdgeStatus::Moving;
        st.g = ph.kind == PhaseKind::Alpha ? F.alpha : F.beta;
        st.cell_lo = forcing::prev_interface(F, e.c);
        st.cell_hi = forcing::next_interface(F, e.c);
        return;
    }
    e.c = forcing::snap_to_interface(F, e.c, ph.iface, SnapDirection::Nearest);
    double x = e.c;
    auto move_to = [&](int side) {
        st.status = EdgeStatus::Moving;
        st.g = forcing::g_side(F, x, side);
        st.dir = side;
        st.cell_lo = side > 0 ? x : cell_prev(F, x);
        st.cell_hi = side > 0 ? cell_next(F, x) : x;
    };
    auto vv = vertical_class(s, i, F);
    switch (vv.kind) {
        case calibrate::VerticalKind::Pinned:
            st.status = EdgeStatus::Pinned;
            st.g = 0.0;
            st.cell_lo = st.cell_hi = x;
            break;
        case calibrate::VerticalKind::Moving:
            move_to(vv.v_in > 0.0 ? -e.normal : e.normal);
            break;
        case calibrate::VerticalKind::Unstable:
            log_event(log, {s.t, EventKind::NonUniqueBranch, {e.id}, {vv.v_in, vv.v_out}, to_string(policy)});
            if (policy == BranchPolicy::Stay) {
                st.status = EdgeStatus::Unstable;
                st.g = 0.0;
                st.cell_lo = st.cell_hi = x;
            } else {
                move_to(arrival != 0 ? arrival : -e.normal);
            }
            break;
    }
}

std::vector<double> rhs(const EpsState& s, const ForcingField& F) {
    auto v = velocities(s, F);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= -s.loop[i].normal;
    return v;
}

// Events between s0 and a trial state s1 with the same combinatorics.
std::vector<FlowEvent> detect(const EpsState& s0, const EpsState& s1, const ForcingField& F) {
    std::vector<FlowEvent> out;
    for (std::size_t i = 0; i < s0.loop.size(); ++i) {
        const auto& e = s1.loop[i];
        const auto& st = s0.edges[i];
        auto g0 = geometry::loop_geom(s0.loop, i), g1 = geometry::loop_geom(s1.loop, i);
        if (g0.length > vanish_tol && g1.length <= vanish_tol) {
            out.push_back({s1.t, EventKind::Vanish, {e.id}, {}, ""});
            continue;
        }
        if (e.horizontal) {
            if (break_margin(s0, i, F) >= 0.0 && break_margin(s1, i, F) < 0.0)
                out.push_back({s1.t, EventKind::Break, {e.id}, {}, ""});
            continue;
        }
        if (st.status == EdgeStatus::Moving) {
            if (e.c < st.cell_lo || e.c > st.cell_hi) out.push_back({s1.t, EventKind::Pin, {e.id}, {}, "interface"});
        } else {
            auto vv = vertical_class(s1, i, F);
            bool same = st.status == EdgeStatus::Pinned ? vv.kind == calibrate::VerticalKind::Pinned
                                                        : vv.kind == calibrate::VerticalKind::Unstable;
            if (!same) out.push_back({s1.t, EventKind::Unpin, {e.id}, {}, ""});
        }
    }
    return out;
}

bool extinct_now(const EpsState& s, double ext) {
    if (s.loop.size() != 4) return false;
    for (std::size_t i = 0; i < 4; ++i)
        if (geometry::loop_geom(s.loop, i).length < ext) return true;
    return false;
}

}  // namespace

Polyrectangle snap_to_C(const Polyrectangle& P, const ForcingField& F) {
    forcing::validate(F);
    auto L = geometry::to_loop(geometry::normalize(P));
    for (auto& e : L) {
        if (e.horizontal) continue;
        auto cls = e.normal > 0 ? InterfaceClass::AlphaBeta : InterfaceClass::BetaAlpha;
        double a = forcing::snap_to_interface(F, e.c, cls, SnapDirection::Left);
        double b = forcing::snap_to_interface(F, e.c, cls, SnapDirection::Right);
        double da = e.c - a, db = b - e.c;
        if (std::abs(da - db) <= 1e-12 * F.epsilon)
            e.c = e.normal > 0 ? a : b;  // the interior lies on the -normal side
        else
            e.c = da < db ? a : b;
    }
    return geometry::normalize(geometry::from_loop(L));
}

EpsState initial_state(const Polyrectangle& P, const ForcingField& F, const EpsOptions& opt,
                       std::vector<FlowEvent>* log) {
    forcing::validate(F);
    EpsState s;
    s.loop = geometry::to_loop(geometry::normalize(P));
    s.next_id = static_cast<long>(s.loop.size());
    s.edges.resize(s.loop.size());
    s.max_steps = opt.max_steps;
    for (std::size_t i = 0; i < s.loop.size(); ++i)
        if (!s.loop[i].horizontal) classify(s, i, F, opt.policy, 0, log);
    for (std::size_t i = 0; i < s.loop.size(); ++i) {
        if (!s.loop[i].horizontal) continue;
        auto g = geometry::loop_geom(s.loop, i);
        auto r = calibrate::is_calibrable(as_horizontal(g), F);
        if (!r.calibrable)
            throw std::invalid_argument("initial horizontal edge at y=" + std::to_string(s.loop[i].c) +
                                        " is not calibrable; enable auto_snap or pass a C-polyrectangle");
        if (r.marginal) log_event(log, {0.0, EventKind::CalibrabilityMarginal, {s.loop[i].id}, {r.max_interior_abs_n}, ""});
    }
    return s;
}

std::vector<double> velocities(const EpsState& s, const ForcingField& F) {
    std::vector<double> v(s.loop.size(), 0.0);
    for (std::size_t i = 0; i < s.loop.size(); ++i) {
        auto g = geometry::loop_geom(s.loop, i);
        if (s.loop[i].horizontal) {
            v[i] = calibrate::calibration_velocity(as_horizontal(g), F);
        } else if (s.edges[i].status == EdgeStatus::Moving) {
            double curv = g.chi == 0 ? 0.0 : 2.0 * g.chi / std::max(g.length, 1e-300);
            v[i] = curv + s.edges[i].g;
        }
    }
    return v;
}

EpsState step_ode(const EpsState& s, const ForcingField& F, double dt) {
    std::size_t n = s.loop.size();
    auto shifted = [&](const std::vector<double>& k, double h) {
        EpsState r = s;
        for (std::size_t i = 0; i < n; ++i) r.loop[i].c = s.loop[i].c + h * k[i];
        return r;
    };
    auto k1 = rhs(s, F);
    auto k2 = rhs(shifted(k1, dt / 2), F);
    auto k3 = rhs(shifted(k2, dt / 2), F);
    auto k4 = rhs(shifted(k3, dt), F);
    EpsState r = s;
    for (std::size_t i = 0; i < n; ++i) {
        double d = k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i];
        if (d != 0.0) r.loop[i].c = s.loop[i].c + dt / 6 * d;
    }
    r.t = s.t + dt;
    return r;
}

std::vector<FlowEvent> locate_next_event(EpsState& s, const ForcingField& F, double horizon, double dt_max) {
    while (s.t < horizon - 1e-14) {
        if (++s.steps > s.max_steps) throw std::runtime_error("step limit exceeded");
        auto v = velocities(s, F);
        double vmax = 0.0, lmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < v.size(); ++i) {
            vmax = std::max(vmax, std::abs(v[i]));
            double l = geometry::loop_geom(s.loop, i).length;
            if (l > 1e-6) lmin = std::min(lmin, l);
        }
        double dt = std::min(dt_max, horizon - s.t);
        if (vmax > 0.0) dt = std::min(dt, std::min(F.epsilon, lmin) / (10.0 * vmax));
        // Tiny edges with curvature still need resolving steps.
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto g = geometry::loop_geom(s.loop, i);
            if (g.chi != 0 && g.length > 0 && g.length <= 1e-6) dt = std::min(dt, 0.05 * g.length * g.length);
        }
        bool to_horizon = dt == horizon - s.t;
        EpsState s1 = step_ode(s, F, dt);
        auto ev = detect(s, s1, F);
        if (ev.empty()) {
            s = std::move(s1);
            if (to_horizon) s.t = horizon;
            continue;
        }
        double lo = 0.0, hi = dt;
        for (int k = 0; k < max_bisections && hi - lo > 0.01 * event_time_tol; ++k) {
            double mid = 0.5 * (lo + hi);
            if (detect(s, step_ode(s, F, mid), F).empty()) lo = mid; else hi = mid;
        }
        s1 = step_ode(s, F, hi);
        ev = detect(s, s1, F);
        s = std::move(s1);
        if (!ev.empty()) {
            for (auto& e : ev) e.t = s.t;
            return ev;
        }
    }
    s.t = std::max(s.t, horizon);
    return {};
}

bool apply_event(EpsState& s, const FlowEvent& ev, const ForcingField& F, BranchPolicy policy,
                 std::vector<FlowEvent>& log) {
    if (ev.edges.empty()) return true;
    std::size_t i = index_of(s, ev.edges.front());
    if (i == s.loop.size()) return true;  // consumed by an earlier merge
    auto& e = s.loop[i];
    auto& st = s.edges[i];
    switch (ev.kind) {
        case EventKind::Pin: {
            if (st.status != EdgeStatus::Moving) return true;
            int arrival = 0;
            if (e.c < st.cell_lo) {
                e.c = st.cell_lo;
                arrival = -1;
            } else if (e.c > st.cell_hi) {
                e.c = st.cell_hi;
                arrival = +1;
            } else {
                return true;
            }
            classify(s, i, F, policy, arrival, &log);
            if (s.edges[i].status == EdgeStatus::Pinned) log.push_back({s.t, EventKind::Pin, {e.id}, {e.c}, ""});
            return true;
        }
        case EventKind::Unpin: {
            EdgeStatus before = st.status;
            classify(s, i, F, policy, 0, &log);
            if (before == EdgeStatus::Pinned && s.edges[i].status != EdgeStatus::Pinned)
                log.push_back({s.t, EventKind::Unpin, {e.id}, {e.c}, ""});
            return true;
        }
        case EventKind::Vanish: {
            std::size_t n = s.loop.size();
            if (geometry::loop_geom(s.loop, i).length > 10 * vanish_tol && n != 4) return true;
            std::size_t ip = (i + n - 1) % n, in = (i + 1) % n;
            if (s.loop[ip].normal != s.loop[in].normal) {
                if (n == 4) {
                    log.push_back({s.t, EventKind::Extinction, {e.id}, {}, ""});
                } else {
                    log.push_back({s.t, EventKind::Halt, {e.id}, {},
                                   "edge vanished between opposite parallel edges: unsupported topology change"});
                }
                return false;
            }
            log.push_back({s.t, EventKind::Vanish, {e.id}, {}, ""});
            log.push_back({s.t, EventKind::Recompose, {s.loop[ip].id, s.loop[in].id}, {}, ""});
            double c;
            bool vertical = !s.loop[ip].horizontal;
            if (vertical && s.edges[ip].status != EdgeStatus::Moving)
                c = s.loop[ip].c;
            else if (vertical && s.edges[in].status != EdgeStatus::Moving)
                c = s.loop[in].c;
            else
                c = 0.5 * (s.loop[ip].c + s.loop[in].c);
            s.loop[ip].c = c;
            std::size_t a = std::max(i, in), b = std::min(i, in);
            s.loop.erase(s.loop.begin() + static_cast<long>(a));
            s.edges.erase(s.edges.begin() + static_cast<long>(a));
            s.loop.erase(s.loop.begin() + static_cast<long>(b));
            s.edges.erase(s.edges.begin() + static_cast<long>(b));
            std::size_t m = index_of(s, log.back().edges.front());
            if (vertical) classify(s, m, F, policy, 0, &log);
            return true;
        }
        case EventKind::Break: {
            if (break_margin(s, i, F) > 1e-6) return true;
            auto g = geometry::loop_geom(s.loop, i);
            auto splits = calibrate::break_points(as_horizontal(g), F);
            if (splits.empty()) return true;
            FlowEvent b{s.t, EventKind::Break, {e.id}, {}, ""};
            for (auto& sp : splits) b.values.push_back(sp.x);
            b.span = {g.lo, g.hi};
            if (e.normal < 0) std::reverse(splits.begin(), splits.end());
            geometry::EdgeLoop ins;
            std::vector<EdgeState> ins_st;
            for (auto& sp : splits) {
                ins.push_back({false, sp.sign, sp.x, s.next_id++});
                ins_st.push_back({});
                ins.push_back({true, e.normal, e.c, s.next_id++});
                ins_st.push_back({});
            }
            for (std::size_t k = 0; k < ins.size(); k += 2) b.edges.push_back(ins[k].id);
            s.loop.insert(s.loop.begin() + static_cast<long>(i) + 1, ins.begin(), ins.end());
            s.edges.insert(s.edges.begin() + static_cast<long>(i) + 1, ins_st.begin(), ins_st.end());
            log.push_back(b);
            for (std::size_t k = 0; k < ins.size(); k += 2) classify(s, i + 1 + k, F, policy, 0, &log);
            return true;
        }
        default:
            return true;
    }
}

FlowState to_flow_state(const EpsState& s, const ForcingField& F) {
    FlowState f;
    f.t = s.t;
    f.loop = s.loop;
    f.velocity = velocities(s, F);
    for (const auto& st : s.edges) f.status.push_back(st.status);
    for (std::size_t i = 0; i < s.loop.size(); ++i)
        if (s.loop[i].horizontal) f.status[i] = EdgeStatus::Moving;
    return f;
}

FlowTrajectory run(const Polyrectangle& initial, const ForcingField& F, double T, const EpsOptions& opt) {
    forcing::validate(F);
    Polyrectangle P0 = opt.auto_snap ? snap_to_C(initial, F) : geometry::normalize(initial);
    FlowTrajectory tr;
    EpsState s = initial_state(P0, F, opt, &tr.events);
    std::vector<double> times = opt.sample_times;
    std::sort(times.begin(), times.end());
    std::size_t next = 0;
    auto record = [&] { tr.samples.push_back(to_flow_state(s, F)); };
    if (times.empty() || times.front() <= 0.0) record();
    while (next < times.size() && times[next] <= 0.0) ++next;
    bool alive = true;
    while (alive && s.t < T - 1e-14) {
        double target = next < times.size() ? std::min(times[next], T) : T;
        auto evs = locate_next_event(s, F, target, times.empty() ? std::min(opt.dt_max, T) : opt.dt_max);
        for (const auto& ev : evs) {
            if (!apply_event(s, ev, F, opt.policy, tr.events)) {
                alive = false;
                tr.extinct = tr.events.back().kind == EventKind::Extinction;
                break;
            }
        }
        if (alive && extinct_now(s, opt.extinction_length)) {
            tr.events.push_back({s.t, EventKind::Extinction, {}, {}, ""});
            tr.extinct = true;
            alive = false;
        }
        if (!alive) break;
        if (times.empty()) {
            record();
        } else if (next < times.size() && s.t >= times[next] - 1e-14) {
            ++next;
            record();
        }
    }
    tr.t_end = s.t;
    if (!tr.extinct && (tr.samples.empty() || tr.samples.back().t != s.t)) record();
    return tr;
}

}  // namespace flow_eps
}  // namespace crystal
