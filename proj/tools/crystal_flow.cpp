#include "crystal/calibrate.hpp"
#include "crystal/flow_eff.hpp"
#include "crystal/flow_eps.hpp"
#include "crystal/harness.hpp"
#include "crystal/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace crystal;
using io::InputError;
using io::json;

namespace {

constexpr int exit_ok = 0, exit_input = 1, exit_assert = 2;

std::vector<double> sample_grid(double T, int samples) {
    if (samples <= 0) return {};
    return harness::linspace(0.0, T, samples + 1);
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

ForcingField field_from(const json& cfg) {
    ForcingField F{io::get_or(cfg, "alpha", -1.0), io::get_or(cfg, "beta", 1.0), io::get_or(cfg, "epsilon", 1.0)};
    try {
        forcing::validate(F);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    return F;
}

EffectiveLaw law_from(const json& cfg) {
    EffectiveLaw law{io::get_or(cfg, "alpha", -1.0), io::get_or(cfg, "beta", 1.0)};
    try {
        flow_eff::validate(law);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    return law;
}

BranchPolicy policy_from(const json& cfg) {
    try {
        return parse_branch_policy(io::get_or<std::string>(cfg, "branch_policy", "cross"));
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
}

json event_counts(const FlowTrajectory& tr) {
    json c = json::object();
    for (auto& e : tr.events) c[to_string(e.kind)] = c.value(to_string(e.kind), 0) + 1;
    return c;
}

void write_trajectory(const FlowTrajectory& tr, const std::string& prefix) {
    io::write_text(prefix + ".traj.jsonl", io::trajectory_jsonl(tr));
    io::write_text(prefix + ".events.json", io::to_json(tr.events).dump(2) + "\n");
    io::write_text(prefix + ".csv", io::trajectory_csv(tr));
}

std::vector<double> sample_times_of(const FlowTrajectory& tr) {
    std::vector<double> t;
    for (auto& s : tr.samples) t.push_back(s.t);
    return t;
}

int simulate_eps(const std::string& config, const std::string& out, bool svg) {
    auto cfg = io::read_json(config);
    io::require_keys(cfg,
                     {"alpha", "beta", "epsilon", "initial", "rectangle", "T", "samples", "branch_policy",
                      "auto_snap", "dt_max"},
                     config);
    auto F = field_from(cfg);
    auto P = io::shape_from_config(cfg);
    double T = io::get_or(cfg, "T", 1.0);
    if (!(T > 0)) throw InputError("T must be positive");
    EpsOptions o;
    o.sample_times = sample_grid(T, io::get_or(cfg, "samples", 100));
    o.policy = policy_from(cfg);
    o.auto_snap = io::get_or(cfg, "auto_snap", false);
    o.dt_max = io::get_or(cfg, "dt_max", o.dt_max);
    FlowTrajectory tr;
    try {
        tr = flow_eps::run(P, F, T, o);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    write_trajectory(tr, out);
    json summary{{"t_end", tr.t_end}, {"extinct", tr.extinct}, {"samples", tr.samples.size()},
                 {"events", event_counts(tr)}};
    if (svg) summary["svg"] = harness::render_svg(tr, sample_times_of(tr), out).size();
    print(summary);
    return exit_ok;
}

int simulate_eff(const std::string& config, const std::string& out, const std::string& shape, bool svg) {
    auto cfg = io::read_json(config);
    io::require_keys(cfg, {"alpha", "beta", "initial", "rectangle", "circle", "T", "samples", "dt"}, config);
    auto law = law_from(cfg);
    double T = io::get_or(cfg, "T", 1.0);
    if (!(T > 0)) throw InputError("T must be positive");
    flow_eff::StepOptions so;
    so.dt = io::get_or(cfg, "dt", so.dt);
    so.sample_times = sample_grid(T, io::get_or(cfg, "samples", 100));
    json summary;
    if (shape == "rectangle") {
        if (!cfg.contains("rectangle")) throw InputError("--shape rectangle needs a 'rectangle' entry");
        auto P = io::shape_from_config(cfg);
        auto es = geometry::edges(P);
        double l1 = es[0].axis == Axis::Horizontal ? es[0].length : es[1].length;
        double l2 = es[0].axis == Axis::Horizontal ? es[1].length : es[0].length;
        auto run = flow_eff::rectangle_flow(law, l1, l2, T, so);
        io::write_text(out + ".csv", io::rectangle_csv(run));
        std::string lines;
        double cx = 0, cy = 0;
        for (auto& v : P.vertices) {
            cx += v.x / P.vertices.size();
            cy += v.y / P.vertices.size();
        }
        FlowTrajectory tr;
        for (auto& s : run.samples) {
            auto R = geometry::rectangle(s.l1, s.l2, {cx, cy});
            json j{{"t", s.t}, {"l1", s.l1}, {"l2", s.l2}, {"vertices", io::to_json(R)}};
            lines += j.dump() + "\n";
            if (svg) {
                FlowState st;
                st.t = s.t;
                st.loop = geometry::to_loop(R);
                tr.samples.push_back(st);
            }
        }
        io::write_text(out + ".traj.jsonl", lines);
        summary = {{"t_end", run.t_end}, {"extinct", run.extinct}, {"samples", run.samples.size()}};
        if (svg) summary["svg"] = harness::render_svg(tr, sample_times_of(tr), out).size();
    } else if (shape == "polyrectangle") {
        auto P = io::shape_from_config(cfg);
        auto tr = flow_eff::poly_flow(law, P, T, so);
        write_trajectory(tr, out);
        summary = {{"t_end", tr.t_end}, {"extinct", tr.extinct}, {"samples", tr.samples.size()},
                   {"events", event_counts(tr)}};
        if (svg) summary["svg"] = harness::render_svg(tr, sample_times_of(tr), out).size();
    } else if (shape == "convex") {
        std::vector<Vec2> C0;
        if (cfg.contains("circle")) {
            const auto& c = cfg.at("circle");
            io::require_keys(c, {"radius", "points", "center"}, "circle");
            double R = io::get_or(c, "radius", 0.0);
            if (!(R > 0)) throw InputError("circle radius must be positive");
            auto ctr = io::get_or(c, "center", std::vector<double>{0.0, 0.0});
            if (ctr.size() != 2) throw InputError("circle center must be [x, y]");
            C0 = flow_eff::circle(R, io::get_or(c, "points", 2048), {ctr[0], ctr[1]});
        } else if (cfg.contains("initial")) {
            for (const auto& v : cfg.at("initial")) {
                if (!v.is_array() || v.size() != 2) throw InputError("vertex must be [x, y]");
                C0.push_back({v[0].get<double>(), v[1].get<double>()});
            }
        } else {
            throw InputError("--shape convex needs 'circle' or 'initial'");
        }
        flow_eff::ConvexRun run;
        try {
            run = flow_eff::convex_flow(law, C0, T, so);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
        io::write_text(out + ".traj.jsonl", io::convex_jsonl(run));
        summary = {{"extinct", run.extinct}, {"samples", run.samples.size()}};
        if (svg) {
            std::vector<double> t;
            for (auto& s : run.samples) t.push_back(s.t);
            summary["svg"] = harness::render_svg(run, t, out).size();
        }
    } else {
        throw InputError("unknown shape " + shape);
    }
    print(summary);
    return exit_ok;
}

int run_calibrate(double p, double q, double y, int chi, int n0, double alpha, double beta, double eps) {
    ForcingField F{alpha, beta, eps};
    try {
        forcing::validate(F);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    if (!(q > p)) throw InputError("need p < q");
    if (chi < -1 || chi > 1) throw InputError("chi must be -1, 0 or 1");
    if (n0 != -1 && n0 != 1) throw InputError("n0 must be -1 or 1");
    HorizontalEdge e{p, q, chi == 0 ? n0 : -chi, chi == 0 ? n0 : chi};
    auto j = io::to_json(calibrate::is_calibrable(e, F));
    j["edge"] = {{"p", p}, {"q", q}, {"y", y}, {"chi", chi}, {"n_p", e.n_p}, {"n_q", e.n_q}};
    print(j);
    return exit_ok;
}

int run_oracle(int count, int M, std::uint64_t seed) {
    if (count <= 0 || M < 100) throw InputError("need count > 0 and M >= 100");
    auto r = harness::oracle_corpus({count, M, seed});
    json d = json::array();
    for (auto& c : r.disagreements)
        d.push_back({{"alpha", c.F.alpha}, {"beta", c.F.beta}, {"epsilon", c.F.epsilon}, {"p", c.edge.p},
                     {"q", c.edge.q}, {"n_p", c.edge.n_p}, {"n_q", c.edge.n_q}, {"analytic", c.analytic},
                     {"oracle", c.oracle}});
    print({{"total", r.total},
           {"compared", r.compared},
           {"marginal", r.marginal},
           {"agree", r.agree},
           {"calibrable", r.calibrable},
           {"agreement", r.compared ? double(r.agree) / r.compared : 1.0},
           {"seconds", r.seconds},
           {"disagreements", d}});
    return r.disagreements.empty() ? exit_ok : exit_assert;
}

int run_converge(const std::string& config, const std::string& out, bool check, double bound) {
    auto cfg = io::read_json(config);
    io::require_keys(cfg, {"alpha", "beta", "initial", "rectangle", "eps", "T", "samples", "branch_policy", "dt_max"},
                     config);
    harness::ConvergeConfig c;
    auto law = law_from(cfg);
    c.alpha = law.alpha;
    c.beta = law.beta;
    c.initial = io::shape_from_config(cfg);
    c.eps_list = io::get_or(cfg, "eps", std::vector<double>{});
    if (c.eps_list.empty()) throw InputError("'eps' list required");
    for (std::size_t i = 1; i < c.eps_list.size(); ++i)
        if (!(c.eps_list[i] < c.eps_list[i - 1])) throw InputError("'eps' must be strictly decreasing");
    for (double e : c.eps_list) field_from({{"alpha", c.alpha}, {"beta", c.beta}, {"epsilon", e}});
    c.T = io::get_or(cfg, "T", 0.0);
    c.samples = io::get_or(cfg, "samples", 200);
    c.eps_options.policy = policy_from(cfg);
    c.eps_options.dt_max = io::get_or(cfg, "dt_max", c.eps_options.dt_max);
    harness::ConvergeReport r;
    try {
        r = harness::converge(c);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    json rows = json::array();
    std::string csv = "eps,sup_distance,ratio,t_at_sup,initial_distance,events\n";
    for (auto& row : r.rows) {
        rows.push_back({{"eps", row.eps},
                        {"sup_distance", row.sup_distance},
                        {"ratio", row.sup_distance / row.eps},
                        {"t_at_sup", row.t_at_sup},
                        {"initial_distance", row.initial_distance},
                        {"events", row.events},
                        {"extinct_early", row.extinct_early}});
        char buf[200];
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%zu\n", row.eps, row.sup_distance,
                      row.sup_distance / row.eps, row.t_at_sup, row.initial_distance, row.events);
        csv += buf;
    }
    if (!out.empty()) io::write_text(out + ".csv", csv);
    bool ok = r.monotone && r.max_ratio <= bound;
    print({{"T", r.T}, {"order", r.order}, {"monotone", r.monotone}, {"max_ratio", r.max_ratio}, {"bound", bound},
           {"ok", ok}, {"rows", rows}});
    return check && !ok ? exit_assert : exit_ok;
}

json compare_json(const harness::CompareReport& r) {
    return {{"ok", r.ok()},
            {"containment", r.containment},
            {"gap_from_start", r.gap_from_start},
            {"gap_ordered", r.gap_ordered},
            {"initial_gap", r.gaps.empty() ? 0.0 : r.gaps.front()},
            {"samples", r.gaps.size()},
            {"violations", r.violations}};
}

int run_compare(const std::string& config, int random, std::uint64_t seed, double alpha, double beta, double eps,
                double T) {
    if (!config.empty()) {
        auto cfg = io::read_json(config);
        io::require_keys(cfg, {"alpha", "beta", "epsilon", "inner", "outer", "T", "samples", "auto_snap"}, config);
        harness::CompareConfig c;
        c.F = field_from(cfg);
        if (!cfg.contains("inner") || !cfg.contains("outer")) throw InputError("'inner' and 'outer' required");
        c.inner = io::polyrectangle_from_json(cfg.at("inner"));
        c.outer = io::polyrectangle_from_json(cfg.at("outer"));
        c.T = io::get_or(cfg, "T", c.T);
        c.samples = io::get_or(cfg, "samples", c.samples);
        c.auto_snap = io::get_or(cfg, "auto_snap", c.auto_snap);
        harness::CompareReport r;
        try {
            r = harness::compare(c);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
        print(compare_json(r));
        return r.ok() ? exit_ok : exit_assert;
    }
    if (random <= 0) throw InputError("give --config or --random N");
    ForcingField F{alpha, beta, eps};
    try {
        forcing::validate(F);
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
    std::mt19937_64 rng(seed);
    json runs = json::array();
    bool all = true;
    for (int k = 0; k < random; ++k) {
        auto [inner, outer] = harness::random_nested_pair(F, rng);
        auto r = harness::compare({F, inner, outer, T, 100, false});
        auto j = compare_json(r);
        j["inner"] = io::to_json(inner);
        j["outer"] = io::to_json(outer);
        runs.push_back(j);
        all = all && r.ok();
    }
    print({{"ok", all}, {"runs", runs}});
    return all ? exit_ok : exit_assert;
}

std::vector<double> axis_values(const std::vector<double>& spec, const char* name) {
    if (spec.size() != 3 || spec[2] < 1) throw InputError(std::string(name) + " must be from,to,count");
    return harness::linspace(spec[0], spec[1], static_cast<int>(spec[2]));
}

int run_portrait(double alpha, double beta, const std::vector<double>& l1, const std::vector<double>& l2, double T,
                 const std::string& out) {
    harness::PortraitConfig c;
    c.alpha = alpha;
    c.beta = beta;
    law_from({{"alpha", alpha}, {"beta", beta}});
    c.l1_values = axis_values(l1, "--l1");
    c.l2_values = axis_values(l2, "--l2");
    for (double v : c.l1_values)
        if (!(v > 0)) throw InputError("lengths must be positive");
    for (double v : c.l2_values)
        if (!(v > 0)) throw InputError("lengths must be positive");
    c.T = T;
    auto csv = harness::portrait_csv(harness::portrait(c));
    if (out.empty())
        std::cout << csv;
    else
        io::write_text(out, csv);
    return exit_ok;
}

int run_render(const std::string& traj, std::vector<double> times, int frames, const std::string& out) {
    auto fr = io::read_frames(traj);
    if (fr.empty()) throw InputError(traj + ": no states");
    if (times.empty() && frames > 0) times = harness::linspace(fr.front().t, fr.back().t, frames);
    std::size_t k = 0;
    for (double t : times) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < fr.size(); ++i)
            if (std::abs(fr[i].t - t) < std::abs(fr[best].t - t)) best = i;
        char buf[32];
        std::snprintf(buf, sizeof buf, "_%04zu.svg", k++);
        io::write_text(out + buf, harness::svg_polygon(fr[best].boundary));
    }
    print({{"files", k}});
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crystalline curvature flow in a layered forcing medium"};
    app.require_subcommand(1);

    std::string config, out, shape = "polyrectangle";
    bool svg = false;
    auto* eps_cmd = app.add_subcommand("simulate-eps", "run the eps-scale flow");
    eps_cmd->add_option("--config", config, "JSON config")->required()->check(CLI::ExistingFile);
    eps_cmd->add_option("--out", out, "output prefix")->required();
    eps_cmd->add_flag("--svg", svg, "write one SVG per sample");

    auto* eff_cmd = app.add_subcommand("simulate-eff", "run the effective flow");
    eff_cmd->add_option("--config", config, "JSON config")->required()->check(CLI::ExistingFile);
    eff_cmd->add_option("--out", out, "output prefix")->required();
    eff_cmd->add_option("--shape", shape, "rectangle|polyrectangle|convex")
        ->check(CLI::IsMember({"rectangle", "polyrectangle", "convex"}));
    eff_cmd->add_flag("--svg", svg, "write one SVG per sample");

    double p = 0, q = 1, y = 0, alpha = -1, beta = 1, eps = 1;
    int chi = 1, n0 = 1;
    auto* cal_cmd = app.add_subcommand("calibrate", "calibrability of a horizontal edge");
    cal_cmd->add_option("--p", p)->required();
    cal_cmd->add_option("--q", q)->required();
    cal_cmd->add_option("--y", y);
    cal_cmd->add_option("--chi", chi);
    cal_cmd->add_option("--n0", n0, "sign of n on a zero-curvature edge");
    cal_cmd->add_option("--alpha", alpha);
    cal_cmd->add_option("--beta", beta);
    cal_cmd->add_option("--eps", eps);

    int count = 500, M = 400;
    std::uint64_t seed = 1;
    auto* or_cmd = app.add_subcommand("oracle", "analytic calibrability vs taut-string oracle on random edges");
    or_cmd->add_option("--count", count);
    or_cmd->add_option("-M,--nodes", M, "oracle nodes per period");
    or_cmd->add_option("--seed", seed);

    bool check = false;
    double bound = 3.0;
    auto* conv_cmd = app.add_subcommand("converge", "eps-sweep against the effective flow");
    conv_cmd->add_option("--config", config, "JSON config")->required()->check(CLI::ExistingFile);
    conv_cmd->add_option("--out", out, "CSV prefix");
    conv_cmd->add_flag("--check", check, "exit 2 unless errors are monotone and below bound*eps");
    conv_cmd->add_option("--bound", bound);

    int random = 0;
    double T = 1.0;
    auto* cmp_cmd = app.add_subcommand("compare", "comparison principle on nested pairs");
    cmp_cmd->add_option("--config", config, "JSON config with inner/outer")->check(CLI::ExistingFile);
    cmp_cmd->add_option("--random", random, "number of random nested pairs");
    cmp_cmd->add_option("--seed", seed);
    cmp_cmd->add_option("--alpha", alpha);
    cmp_cmd->add_option("--beta", beta);
    cmp_cmd->add_option("--eps", eps);
    cmp_cmd->add_option("--T", T);

    std::vector<double> l1{0.5, 6, 12}, l2{0.5, 6, 12};
    double Tp = 50.0;
    auto* por_cmd = app.add_subcommand("portrait", "regimes of the effective rectangle flow");
    por_cmd->add_option("--alpha", alpha);
    por_cmd->add_option("--beta", beta);
    por_cmd->add_option("--l1", l1, "from to count")->expected(3)->delimiter(',');
    por_cmd->add_option("--l2", l2, "from to count")->expected(3)->delimiter(',');
    por_cmd->add_option("--T", Tp);
    por_cmd->add_option("--out", out, "CSV path (default stdout)");

    std::string traj;
    std::vector<double> times;
    int frames = 0;
    auto* ren_cmd = app.add_subcommand("render", "SVG snapshots from a .traj.jsonl file");
    ren_cmd->add_option("--traj", traj)->required()->check(CLI::ExistingFile);
    ren_cmd->add_option("--times", times)->delimiter(',');
    ren_cmd->add_option("--frames", frames, "evenly spaced frames when --times is absent");
    ren_cmd->add_option("--out", out, "file prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (*eps_cmd) return simulate_eps(config, out, svg);
        if (*eff_cmd) return simulate_eff(config, out, shape, svg);
        if (*cal_cmd) return run_calibrate(p, q, y, chi, n0, alpha, beta, eps);
        if (*or_cmd) return run_oracle(count, M, seed);
        if (*conv_cmd) return run_converge(config, out, check, bound);
        if (*cmp_cmd) return run_compare(config, random, seed, alpha, beta, eps, T);
        if (*por_cmd) return run_portrait(alpha, beta, l1, l2, Tp, out);
        if (*ren_cmd) return run_render(traj, times, frames, out);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    } catch (const ForcingError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
    return exit_input;
}
