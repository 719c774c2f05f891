#pragma once

#include "crystal/calibrate.hpp"
#include "crystal/forcing.hpp"
#include "crystal/geometry.hpp"
#include "crystal/trajectory.hpp"

#include <string>
#include <vector>

namespace crystal {

// What a vertical edge does on an interface where both one-sided velocities point away from it.
enum class BranchPolicy { Cross, Stay };

BranchPolicy parse_branch_policy(const std::string& s);
std::string to_string(BranchPolicy p);

struct EpsOptions {
    double dt_max = 1e-2;
    std::vector<double> sample_times;  // empty: record after every event
    BranchPolicy policy = BranchPolicy::Cross;
    bool auto_snap = false;
    double extinction_length = 1e-6;
    long max_steps = 20'000'000;
};

namespace flow_eps {

constexpr double vanish_tol = 1e-9;
constexpr double event_time_tol = 1e-10;

// Per-edge integration data. Moving vertical edges carry the phase of the cell they sweep
// and the cell bounds; an event fires when they leave it.
struct EdgeState {
    EdgeStatus status = EdgeStatus::Moving;
    double g = 0.0;
    double cell_lo = 0.0, cell_hi = 0.0;
    int dir = 0;  // last direction of motion along x (vertical edges)
};

struct EpsState {
    double t = 0.0;
    geometry::EdgeLoop loop;
    std::vector<EdgeState> edges;
    long next_id = 0;
    long steps = 0;
    long max_steps = 20'000'000;
};

// Moves every vertical edge onto the nearest interface of its stable class: outward +e1 onto
// alpha->beta interfaces, -e1 onto beta->alpha ones. Ties go toward the interior.
Polyrectangle snap_to_C(const Polyrectangle& P, const ForcingField& F);

EpsState initial_state(const Polyrectangle& P, const ForcingField& F, const EpsOptions& opt,
                       std::vector<FlowEvent>* log = nullptr);

// Inward normal velocity of every loop edge in the given state.
std::vector<double> velocities(const EpsState& s, const ForcingField& F);

// One RK4 step with frozen statuses; no event handling.
EpsState step_ode(const EpsState& s, const ForcingField& F, double dt);

// Advances s to the earliest event before `horizon` (bisection to event_time_tol) and returns
// the events that fired there; returns an empty list when the horizon is reached first.
std::vector<FlowEvent> locate_next_event(EpsState& s, const ForcingField& F, double horizon, double dt_max);

// Applies a located event. Returns false when the evolution cannot continue (extinction or an
// unsupported topology change); the terminal event is appended to the log.
bool apply_event(EpsState& s, const FlowEvent& ev, const ForcingField& F, BranchPolicy policy,
                 std::vector<FlowEvent>& log);

FlowState to_flow_state(const EpsState& s, const ForcingField& F);

FlowTrajectory run(const Polyrectangle& initial, const ForcingField& F, double T, const EpsOptions& opt = {});

}  // namespace flow_eps
}  // namespace crystal
