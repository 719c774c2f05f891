#include "crystal/harness.hpp"

#include "crystal/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace crystal::harness {

int thread_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* s = std::getenv("CRYSTAL_FLOW_THREADS")) {
        int v = std::atoi(s);
        if (v > 0) return std::min(v, hw);
    }
    return hw;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    if (n <= 1) return {a};
    for (int k = 0; k < n; ++k) v.push_back(a + (b - a) * k / (n - 1));
    v.back() = b;
    return v;
}

namespace {

template <class Fn>
void parallel_for(std::size_t n, Fn fn) {
    std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(thread_count()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

const FlowState& nearest_sample(const std::vector<FlowState>& s, double t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (std::abs(s[i].t - t) < std::abs(s[best].t - t)) best = i;
    return s[best];
}

}  // namespace

ConvergeReport converge(const ConvergeConfig& cfg) {
    EffectiveLaw law{cfg.alpha, cfg.beta};
    flow_eff::validate(law);
    if (cfg.eps_list.empty()) throw std::invalid_argument("empty eps list");
    for (std::size_t i = 1; i < cfg.eps_list.size(); ++i)
        if (!(cfg.eps_list[i] < cfg.eps_list[i - 1])) throw std::invalid_argument("eps list must be strictly decreasing");
    Polyrectangle P = geometry::normalize(cfg.initial);

    ConvergeReport rep;
    rep.T = cfg.T;
    if (!(rep.T > 0)) {
        flow_eff::StepOptions probe;
        probe.dt = 1e-2;
        probe.sample_times = {1e3};
        auto tr = flow_eff::poly_flow(law, P, 1e3, probe);
        if (!tr.extinct) throw std::invalid_argument("automatic horizon needs a shape that becomes extinct");
        rep.T = 0.9 * tr.t_end;
    }
    auto times = linspace(0.0, rep.T, cfg.samples + 1);
    flow_eff::StepOptions so;
    so.sample_times = times;
    auto eff = flow_eff::poly_flow(law, P, rep.T, so);

    rep.rows.resize(cfg.eps_list.size());
    parallel_for(cfg.eps_list.size(), [&](std::size_t k) {
        ForcingField F{cfg.alpha, cfg.beta, cfg.eps_list[k]};
        EpsOptions o = cfg.eps_options;
        o.sample_times = times;
        o.auto_snap = true;
        auto tr = flow_eps::run(P, F, rep.T, o);
        ConvergeRow row;
        row.eps = F.epsilon;
        row.events = tr.events.size();
        row.extinct_early = tr.extinct;
        for (const auto& es : tr.samples) {
            auto it = std::find_if(eff.samples.begin(), eff.samples.end(),
                                   [&](const FlowState& s) { return std::abs(s.t - es.t) < 1e-9; });
            if (it == eff.samples.end()) continue;
            double d = geometry::hausdorff_distance(es.polygon(), it->polygon());
            if (es.t == 0.0) row.initial_distance = d;
            if (d > row.sup_distance) {
                row.sup_distance = d;
                row.t_at_sup = es.t;
            }
        }
        if (tr.extinct) row.sup_distance = std::numeric_limits<double>::infinity();
        rep.rows[k] = row;
    });

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        const auto& r = rep.rows[k];
        rep.max_ratio = std::max(rep.max_ratio, r.sup_distance / r.eps);
        if (k > 0 && r.sup_distance > rep.rows[k - 1].sup_distance) rep.monotone = false;
        if (r.sup_distance > 0 && std::isfinite(r.sup_distance)) {
            double x = std::log(r.eps), y = std::log(r.sup_distance);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
    }
    if (n >= 2) rep.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

CompareReport compare(const CompareConfig& cfg) {
    EpsOptions o;
    o.auto_snap = cfg.auto_snap;
    o.sample_times = linspace(0.0, cfg.T, cfg.samples + 1);
    auto ti = flow_eps::run(cfg.inner, cfg.F, cfg.T, o);
    auto to = flow_eps::run(cfg.outer, cfg.F, cfg.T, o);
    CompareReport rep;
    char buf[200];
    for (const auto& si : ti.samples) {
        auto it = std::find_if(to.samples.begin(), to.samples.end(),
                               [&](const FlowState& s) { return std::abs(s.t - si.t) < 1e-9; });
        if (it == to.samples.end()) {
            if (si.t <= to.t_end) continue;
            rep.containment = false;
            std::snprintf(buf, sizeof buf, "t=%.6f outer vanished before inner", si.t);
            rep.violations.push_back(buf);
            break;
        }
        auto A = it->polygon(), B = si.polygon();
        if (!geometry::contains(A, B)) {
            rep.containment = false;
            std::snprintf(buf, sizeof buf, "t=%.6f containment lost", si.t);
            rep.violations.push_back(buf);
        }
        rep.times.push_back(si.t);
        rep.gaps.push_back(geometry::boundary_gap(A, B));
    }
    const double tol = 1e-9;
    for (std::size_t j = 0; j < rep.gaps.size(); ++j) {
        if (rep.gaps[j] < rep.gaps.front() - tol) {
            rep.gap_from_start = false;
            std::snprintf(buf, sizeof buf, "t=%.6f gap %.6g below initial gap %.6g", rep.times[j], rep.gaps[j],
                          rep.gaps.front());
            rep.violations.push_back(buf);
        }
    }
    double running_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rep.gaps.size(); ++j) {
        running_max = std::max(running_max, rep.gaps[j]);
        if (rep.gaps[j] < running_max - cfg.F.epsilon - tol) {
            rep.gap_ordered = false;
            std::snprintf(buf, sizeof buf, "t=%.6f gap %.6g dropped more than eps below an earlier gap %.6g",
                          rep.times[j], rep.gaps[j], running_max);
            rep.violations.push_back(buf);
        }
    }
    return rep;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Extinction: return "extinction";
        case Regime::Equilibrium: return "equilibrium";
        case Regime::PinnedExpansion: return "pinned-expansion";
        case Regime::Undetermined: return "undetermined";
    }
    return "?";
}

std::vector<PortraitRow> portrait(const PortraitConfig& cfg) {
    EffectiveLaw law{cfg.alpha, cfg.beta};
    flow_eff::validate(law);
    std::vector<PortraitRow> rows;
    for (double a : cfg.l1_values)
        for (double b : cfg.l2_values) rows.push_back({a, b});
    const double thr = -2.0 / law.alpha;
    parallel_for(rows.size(), [&](std::size_t k) {
        auto& r = rows[k];
        double d1 = -2.0 * flow_eff::H_g(law, r.l20), d2 = -4.0 / r.l10 - (law.alpha + law.beta);
        if (std::abs(d1) < 1e-12 && std::abs(d2) < 1e-12) {
            r.regime = Regime::Equilibrium;
            r.t_end = cfg.T;
            r.l1_end = r.l10;
            r.l2_end = r.l20;
            r.pinned_time = cfg.T;
            return;
        }
        flow_eff::StepOptions so;
        so.dt = 1e-2;
        auto run = flow_eff::rectangle_flow(law, r.l10, r.l20, cfg.T, so);
        r.t_end = run.t_end;
        r.l1_end = run.samples.back().l1;
        r.l2_end = run.samples.back().l2;
        for (std::size_t i = 1; i < run.samples.size(); ++i)
            if (run.samples[i - 1].l2 >= thr) r.pinned_time += run.samples[i].t - run.samples[i - 1].t;
        if (run.extinct)
            r.regime = Regime::Extinction;
        else if (r.l2_end > r.l20 && r.l1_end == r.l10)
            r.regime = Regime::PinnedExpansion;
        else
            r.regime = Regime::Undetermined;
    });
    return rows;
}

std::string portrait_csv(const std::vector<PortraitRow>& rows) {
    std::ostringstream os;
    os << "l1_0,l2_0,regime,t_end,l1_end,l2_end,pinned_time\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%s,%.6f,%.9g,%.9g,%.6f\n", r.l10, r.l20, to_string(r.regime).c_str(),
                      r.t_end, r.l1_end, r.l2_end, r.pinned_time);
        os << buf;
    }
    return os.str();
}

Polyrectangle random_c_polyrectangle(const ForcingField& F, std::mt19937_64& rng, const RandomShapeOptions& opt,
                                     Vec2 offset) {
    forcing::validate(F);
    const double eps = F.epsilon;
    std::uniform_int_distribution<int> steps(0, opt.max_steps), cells(1, opt.max_step_cells),
        center(0, opt.max_center_cells);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int left_steps = steps(rng), right_steps = steps(rng);
    long m0 = static_cast<long>(std::floor(offset.x / eps));
    // Centre block [(m0 - 1/4) eps, (m0 + w + 1/4) eps].
    double c_lo = (m0 - 0.25) * eps;
    double c_hi = (m0 + center(rng) + 0.25) * eps;
    double H = opt.min_height + (opt.max_height - opt.min_height) * unit(rng);
    double top = offset.y + H / 2, bot = offset.y - H / 2;

    // Columns: x-breakpoints and (top, bottom) per column, left to right.
    std::vector<double> xs{c_lo};
    std::vector<std::pair<double, double>> cols;
    double t = top, b = bot;
    std::vector<std::pair<double, double>> left_cols;
    std::vector<double> left_xs;
    double x = c_lo;
    for (int k = 0; k < left_steps; ++k) {
        double shrink = (t - b) * (0.15 + 0.3 * unit(rng));
        double frac = unit(rng);
        t -= shrink * frac;
        b += shrink * (1.0 - frac);
        if (t - b < 0.1) break;
        x -= cells(rng) * eps;
        left_xs.push_back(x);
        left_cols.push_back({t, b});
    }
    std::reverse(left_xs.begin(), left_xs.end());
    std::reverse(left_cols.begin(), left_cols.end());
    xs = left_xs;
    xs.push_back(c_lo);
    cols = left_cols;
    cols.push_back({top, bot});
    xs.push_back(c_hi);
    t = top;
    b = bot;
    x = c_hi;
    for (int k = 0; k < right_steps; ++k) {
        double shrink = (t - b) * (0.15 + 0.3 * unit(rng));
        double frac = unit(rng);
        t -= shrink * frac;
        b += shrink * (1.0 - frac);
        if (t - b < 0.1) break;
        x += cells(rng) * eps;
        cols.push_back({t, b});
        xs.push_back(x);
    }
    // xs has cols.size() + 1 entries.
    Polyrectangle P;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        P.vertices.push_back({xs[i], cols[i].first});
        P.vertices.push_back({xs[i + 1], cols[i].first});
    }
    for (std::size_t i = cols.size(); i-- > 0;) {
        P.vertices.push_back({xs[i + 1], cols[i].second});
        P.vertices.push_back({xs[i], cols[i].second});
    }
    return geometry::normalize(P);
}

std::pair<Polyrectangle, Polyrectangle> random_nested_pair(const ForcingField& F, std::mt19937_64& rng) {
    RandomShapeOptions outer_opt;
    outer_opt.min_height = 2.0;
    outer_opt.max_height = 4.0;
    outer_opt.max_center_cells = 5;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        auto outer = random_c_polyrectangle(F, rng, outer_opt, {0.0, 0.0});
        RandomShapeOptions inner_opt;
        inner_opt.min_height = 0.3;
        inner_opt.max_height = 1.5;
        inner_opt.max_steps = 1;
        inner_opt.max_step_cells = 1;
        inner_opt.max_center_cells = 2;
        Vec2 off{F.epsilon * std::floor(unit(rng) * 4.0), (unit(rng) - 0.5) * 0.6};
        auto inner = random_c_polyrectangle(F, rng, inner_opt, off);
        if (geometry::contains(outer, inner) && geometry::boundary_gap(outer, inner) > 1e-6) return {inner, outer};
    }
    throw std::runtime_error("could not generate a nested pair");
}

OracleCase random_edge(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    OracleCase c;
    c.F.alpha = -(0.2 + 2.8 * u(rng));
    c.F.beta = 0.2 + 2.8 * u(rng);
    c.F.epsilon = std::min(2.0, 8.0 / (c.F.beta - c.F.alpha)) * (0.05 + 0.9 * u(rng));
    const double eps = c.F.epsilon;
    int chi = std::uniform_int_distribution<int>(-1, 1)(rng);
    if (chi == 0) {
        c.edge.n_p = c.edge.n_q = u(rng) < 0.5 ? -1 : 1;
    } else {
        c.edge.n_p = -chi;
        c.edge.n_q = chi;
    }
    c.edge.p = eps * (6.0 * u(rng) - 3.0);
    double w = u(rng);
    c.edge.q = c.edge.p + eps * (0.1 + 11.9 * w * w);
    return c;
}

OracleCorpusReport oracle_corpus(const OracleCorpusConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(cfg.seed);
    std::vector<OracleCase> cases;
    for (int k = 0; k < cfg.count; ++k) cases.push_back(random_edge(rng));
    parallel_for(cases.size(), [&](std::size_t k) {
        auto& c = cases[k];
        auto r = calibrate::is_calibrable(c.edge, c.F);
        c.analytic = r.analytic_calibrable;
        c.marginal = r.marginal;
        c.oracle = oracle::is_calibrable_oracle(c.edge, c.F, cfg.M);
    });
    OracleCorpusReport rep;
    rep.total = cfg.count;
    for (const auto& c : cases) {
        if (c.marginal) {
            ++rep.marginal;
            continue;
        }
        ++rep.compared;
        if (c.analytic) ++rep.calibrable;
        if (c.analytic == c.oracle)
            ++rep.agree;
        else
            rep.disagreements.push_back(c);
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

std::string svg_polygon(const std::vector<Vec2>& boundary, double margin) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (auto& p : boundary) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    if (boundary.empty()) x0 = x1 = y0 = y1 = 0.0;
    x0 -= margin;
    y0 -= margin;
    x1 += margin;
    y1 += margin;
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.6f %.6f %.6f %.6f\" width=\"600\" "
                  "height=\"%.0f\">\n",
                  x0, -y1, x1 - x0, y1 - y0, 600.0 * (y1 - y0) / std::max(x1 - x0, 1e-12));
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" << buf;
    os << "<polygon fill=\"#c8d8f0\" stroke=\"#1f3b73\" stroke-width=\"" << (x1 - x0) / 300.0 << "\" points=\"";
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.6f,%.6f", i ? " " : "", boundary[i].x, -boundary[i].y);
        os << buf;
    }
    os << "\"/>\n</svg>\n";
    return os.str();
}

namespace {

std::string frame_name(const std::string& prefix, std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%04zu.svg", k);
    return prefix + buf;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << body;
}

}  // namespace

std::vector<std::string> render_svg(const FlowTrajectory& tr, const std::vector<double>& times,
                                    const std::string& prefix) {
    std::vector<std::string> files;
    if (tr.samples.empty()) return files;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto& s = nearest_sample(tr.samples, times[k]);
        auto path = frame_name(prefix, k);
        write_file(path, svg_polygon(s.polygon().vertices));
        files.push_back(path);
    }
    return files;
}

std::vector<std::string> render_svg(const flow_eff::ConvexRun& run, const std::vector<double>& times,
                                    const std::string& prefix) {
    std::vector<std::string> files;
    if (run.samples.empty()) return files;
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < run.samples.size(); ++i)
            if (std::abs(run.samples[i].t - times[k]) < std::abs(run.samples[best].t - times[k])) best = i;
        auto path = frame_name(prefix, k);
        write_file(path, svg_polygon(run.samples[best].boundary));
        files.push_back(path);
    }
    return files;
}

}  // namespace crystal::harness
