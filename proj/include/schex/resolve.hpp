#pragma once

#include <optional>
#include <string>
#include <vector>

#include "schex/trace.hpp"

namespace schex {

enum class GroupCase { Dangling, Direct, OddException, Crossing };

GroupCase classify_size(std::size_t touched_count);
GroupCase classify_group(const ConnectionGroup& g);

std::string group_case_name(GroupCase c);

// One side of a resolved binary connection.
struct Endpoint {
    std::string component_id;
    PixelCoord contact{};
    double angle_deg = 0.0;
};

struct BinaryConnection {
    Endpoint a;
    Endpoint b;
    std::vector<PixelCoord> via;  // resolved intersection centers traversed
    int region_id = 0;            // originating wire region
};

struct InsertedJunction {
    std::string id;
    PixelCoord center{};
    ComponentBox box;  // synthetic 3x3 box
};

struct GroupException {
    int region_id = 0;
    std::string reason;  // "OddGroup" or "ArmAmbiguity"
};

struct ResolutionReport {
    std::vector<BinaryConnection> connections;
    std::vector<InsertedJunction> inserted_junctions;
    std::vector<GroupException> exceptions;
    std::vector<PixelCoord> resolved_crossings;
};

// Densest spot of the region under a k x k window: returns the region
// pixel maximizing the windowed region-pixel count. Straight runs and
// symmetric crossings produce count plateaus, so among maximal pixels the
// most locally central one wins (largest number of axis neighbors also in
// the plateau), with remaining ties broken by smallest (row, col). k = 1
// carries no density signal and returns the smallest region pixel.
PixelCoord locate_intersection(const ConnectionGroup& g, int kernel);

struct DanglingResolution {
    InsertedJunction junction;
    BinaryConnection connection;
};

// Caps a stub wire with a synthetic junction at the region pixel farthest
// (geodesic, along region pixels) from the contact pixel.
DanglingResolution insert_dangling_junction(const ConnectionGroup& g,
                                            const ComponentBox& component,
                                            const std::string& junction_id);

struct CrossingArm {
    std::vector<PixelCoord> pixels;         // sorted
    double angle_deg = 0.0;                 // direction from the blocked center
    std::vector<std::string> component_ids; // touched original components
};

struct CrossingSplit {
    std::vector<CrossingArm> arms;     // sorted by angle when ok
    std::string failure;               // empty = ok, else ArmAmbiguity cause
};

// Deletes a k x k block at `center` and reports the resulting arms. Arms
// touching no component, fewer than four arms, an odd arm count, or two
// arms closer than kArmAngleMinSepDeg in angle make the split ambiguous.
CrossingSplit resolve_crossing(const ConnectionGroup& g, PixelCoord center, int kernel,
                               const std::vector<ComponentBox>& boxes);

// Pairs each arm with the opposite one in angle-sorted cyclic order: index
// i with i + m for 2m arms. Returns pairs of indices into the input list,
// or nothing when the arm count is odd or below four.
std::optional<std::vector<std::pair<std::size_t, std::size_t>>> reroute_opposites(
    const std::vector<double>& arm_angles);

// Reduces every group to binary connections: stubs gain junctions,
// junction-free crossings are blocked and rerouted pairwise until all
// groups are Direct, odd groups and unsplittable crossings become
// exceptions. Exceptions are data; the caller decides what to exclude.
ResolutionReport resolve_all(const std::vector<ConnectionGroup>& groups,
                             const std::vector<ComponentBox>& boxes, int kernel);

}  // namespace schex
