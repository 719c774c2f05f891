#include "crystal/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace crystal::io {

json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path);
    f << body;
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw InputError(where + ": expected a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw InputError(where + ": unknown key '" + it.key() + "'");
}

json to_json(const Polyrectangle& P) {
    json a = json::array();
    for (auto& v : P.vertices) a.push_back({v.x, v.y});
    return a;
}

Polyrectangle polyrectangle_from_json(const json& j) {
    if (!j.is_array()) throw InputError("polyrectangle must be an array of [x, y] pairs");
    Polyrectangle P;
    for (const auto& v : j) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw InputError("polyrectangle vertex must be [x, y]");
        P.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    try {
        return geometry::normalize(P);
    } catch (const std::exception& e) {
        throw InputError(std::string("invalid polyrectangle: ") + e.what());
    }
}

Polyrectangle shape_from_config(const json& cfg, const char* key) {
    if (cfg.contains(key)) {
        if (cfg.contains("rectangle")) throw InputError("give either '" + std::string(key) + "' or 'rectangle'");
        return polyrectangle_from_json(cfg.at(key));
    }
    if (!cfg.contains("rectangle")) throw InputError("missing initial shape ('" + std::string(key) + "' or 'rectangle')");
    const auto& r = cfg.at("rectangle");
    require_keys(r, {"l1", "l2", "center"}, "rectangle");
    double l1 = get_or(r, "l1", 0.0), l2 = get_or(r, "l2", 0.0);
    if (!(l1 > 0 && l2 > 0)) throw InputError("rectangle lengths must be positive");
    Vec2 c;
    if (r.contains("center")) {
        auto v = get_or(r, "center", std::vector<double>{});
        if (v.size() != 2) throw InputError("rectangle center must be [x, y]");
        c = {v[0], v[1]};
    }
    return geometry::rectangle(l1, l2, c);
}

json to_json(const FlowEvent& e) {
    json j{{"t", e.t}, {"kind", to_string(e.kind)}, {"edges", e.edges}, {"values", e.values}};
    if (!e.note.empty()) j["note"] = e.note;
    if (!e.span.empty()) j["span"] = e.span;
    return j;
}

json to_json(const std::vector<FlowEvent>& events) {
    json a = json::array();
    for (auto& e : events) a.push_back(to_json(e));
    return a;
}

json to_json(const FlowState& s) {
    json j;
    j["t"] = s.t;
    j["vertices"] = to_json(s.polygon());
    json edges = json::array();
    for (std::size_t i = 0; i < s.loop.size(); ++i) {
        auto g = geometry::loop_geom(s.loop, i);
        json e{{"id", s.loop[i].id},
               {"axis", s.loop[i].horizontal ? "h" : "v"},
               {"normal", s.loop[i].normal},
               {"c", s.loop[i].c},
               {"length", g.length},
               {"chi", g.chi}};
        if (i < s.status.size()) e["status"] = to_string(s.status[i]);
        if (i < s.velocity.size()) e["velocity"] = s.velocity[i];
        edges.push_back(e);
    }
    j["edges"] = edges;
    return j;
}

json to_json(const CalibrabilityReport& r) {
    json j{{"calibrable", r.calibrable},
           {"analytic_calibrable", r.analytic_calibrable},
           {"consistent", r.consistent},
           {"marginal", r.marginal},
           {"velocity", r.velocity},
           {"max_abs_n", r.max_abs_n},
           {"max_interior_abs_n", r.max_interior_abs_n},
           {"criterion", to_string(r.criterion)},
           {"slack", r.slack}};
    auto opt = [&](const char* k, const std::optional<double>& v) {
        if (v) j[k] = *v;
    };
    opt("failure_point", r.failure_point);
    opt("sigma1", r.sigma1);
    opt("sigma2", r.sigma2);
    opt("sigma_star", r.sigma_star);
    opt("sigma_tilde", r.sigma_tilde);
    return j;
}

std::string trajectory_jsonl(const FlowTrajectory& tr) {
    std::string out;
    for (const auto& s : tr.samples) out += to_json(s).dump() + "\n";
    return out;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string trajectory_csv(const FlowTrajectory& tr) {
    std::size_t width = 0;
    std::vector<std::vector<Edge>> rows;
    for (const auto& s : tr.samples) {
        rows.push_back(geometry::edges(s.polygon()));
        width = std::max(width, rows.back().size());
    }
    std::ostringstream os;
    os << "t";
    for (std::size_t k = 0; k < width; ++k) os << ",l" << k;
    os << "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << num(tr.samples[i].t);
        for (auto& e : rows[i]) os << "," << num(e.length);
        os << "\n";
    }
    return os.str();
}

std::string rectangle_csv(const flow_eff::RectRun& run) {
    std::ostringstream os;
    os << "t,l1,l2\n";
    for (auto& s : run.samples) os << num(s.t) << "," << num(s.l1) << "," << num(s.l2) << "\n";
    return os.str();
}

std::string convex_jsonl(const flow_eff::ConvexRun& run) {
    std::string out;
    auto facet = [](const flow_eff::Facet& f) {
        return json{{"position", f.position}, {"length", f.length}, {"lo", f.lo}, {"hi", f.hi}};
    };
    for (const auto& s : run.samples) {
        json j{{"t", s.t},
               {"shift", s.shift},
               {"top", facet(s.top)},
               {"bottom", facet(s.bottom)},
               {"left", facet(s.left)},
               {"right", facet(s.right)}};
        json b = json::array();
        for (auto& v : s.boundary) b.push_back({v.x, v.y});
        j["vertices"] = b;
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<Frame> read_frames(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path);
    std::vector<Frame> frames;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            auto j = json::parse(line);
            Frame fr;
            fr.t = j.at("t").get<double>();
            for (const auto& v : j.at("vertices")) fr.boundary.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
            frames.push_back(std::move(fr));
        } catch (const json::exception& e) {
            throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return frames;
}

}  // namespace crystal::io
