#pragma once

#include <string>
#include <vector>

#include "schex/resolve.hpp"
#include "schex/schema.hpp"

namespace schex {

struct TerminalBinding {
    std::string component_id;
    std::string role;
    int connection_index = -1;  // index into the connection list
    double angle_deg = 0.0;
};

// One endpoint of a resolved connection at this component.
struct PinEndpoint {
    int connection_index = -1;
    double angle_deg = 0.0;
};

struct PinError {
    std::string component_id;
    std::string reason;  // "UnmappedPin" | "PinCollision" | "MissingPin"
    std::string detail;
};

struct AssignResult {
    std::vector<TerminalBinding> bindings;
    std::vector<PinError> errors;
};

// Maps each endpoint to the terminal whose angular window contains its
// approach angle. Symmetric two-terminal categories take t1/t2 in
// ascending angle order; rails, ports and junctions accept any angle,
// junctions without an endpoint limit. Errors never drop endpoints
// silently; the caller escalates them.
AssignResult assign_terminals(const ComponentBox& c, const std::vector<PinEndpoint>& endpoints);

}  // namespace schex
