#pragma once

#include "crystal/geometry.hpp"

#include <string>
#include <vector>

namespace crystal {

enum class EventKind { Break, Vanish, Recompose, Pin, Unpin, NonUniqueBranch, CalibrabilityMarginal, Extinction, Halt };

std::string to_string(EventKind k);

struct FlowEvent {
    double t = 0.0;
    EventKind kind = EventKind::Vanish;
    std::vector<long> edges;     // edge ids involved
    std::vector<double> values;  // split abscissas, one-sided velocities, ...
    std::string note;
    std::vector<double> span;    // [lo, hi] of a broken edge
};

enum class EdgeStatus { Moving, Pinned, Unstable };

std::string to_string(EdgeStatus s);

struct FlowState {
    double t = 0.0;
    geometry::EdgeLoop loop;
    std::vector<EdgeStatus> status;  // one per loop edge
    std::vector<double> velocity;    // inward normal velocity per loop edge

    Polyrectangle polygon() const;  // normalized (collinear pieces merged)
};

struct FlowTrajectory {
    std::vector<FlowState> samples;
    std::vector<FlowEvent> events;
    bool extinct = false;
    double t_end = 0.0;

    std::size_t count(EventKind k) const;
};

}  // namespace crystal
