#pragma once

#include "crystal/flow_eff.hpp"
#include "crystal/flow_eps.hpp"
#include "crystal/forcing.hpp"
#include "crystal/geometry.hpp"
#include "crystal/trajectory.hpp"

#include <json.hpp>

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace crystal::io {

using nlohmann::json;

// Malformed or unreadable input; the CLI maps it to exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& body);

// Throws InputError naming the first key of `j` not in `allowed`.
void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where);

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("bad value for '") + key + "': " + e.what());
    }
}

json to_json(const Polyrectangle& P);
Polyrectangle polyrectangle_from_json(const json& j);

// Initial shape from a config: "initial" (vertex array) or "rectangle" ({l1, l2, center?}).
Polyrectangle shape_from_config(const json& cfg, const char* key = "initial");

json to_json(const FlowEvent& e);
json to_json(const std::vector<FlowEvent>& events);
json to_json(const FlowState& s);
json to_json(const CalibrabilityReport& r);

// One state per line.
std::string trajectory_jsonl(const FlowTrajectory& tr);
// t, then the edge lengths of the normalized polygon in canonical order (rows may differ in width).
std::string trajectory_csv(const FlowTrajectory& tr);
std::string rectangle_csv(const flow_eff::RectRun& run);
std::string convex_jsonl(const flow_eff::ConvexRun& run);

// Frames (t, boundary) read back from a .traj.jsonl file.
struct Frame {
    double t = 0.0;
    std::vector<Vec2> boundary;
};
std::vector<Frame> read_frames(const std::string& path);

}  // namespace crystal::io
