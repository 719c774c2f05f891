#include "crystal/trajectory.hpp"

#include <algorithm>

namespace crystal {

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::Break: return "Break";
        case EventKind::Vanish: return "Vanish";
        case EventKind::Recompose: return "Recompose";
        case EventKind::Pin: return "Pin";
        case EventKind::Unpin: return "Unpin";
        case EventKind::NonUniqueBranch: return "NonUniqueBranch";
        case EventKind::CalibrabilityMarginal: return "CalibrabilityMarginal";
        case EventKind::Extinction: return "Extinction";
        case EventKind::Halt: return "Halt";
    }
    return "?";
}

std::string to_string(EdgeStatus s) {
    switch (s) {
        case EdgeStatus::Moving: return "moving";
        case EdgeStatus::Pinned: return "pinned";
        case EdgeStatus::Unstable: return "unstable";
    }
    return "?";
}

Polyrectangle FlowState::polygon() const { return geometry::normalize(geometry::from_loop(loop)); }

std::size_t FlowTrajectory::count(EventKind k) const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [k](const FlowEvent& e) { return e.kind == k; }));
}

}  // namespace crystal
