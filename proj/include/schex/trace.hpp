#pragma once

#include <string>
#include <vector>

#include "schex/segment.hpp"

namespace schex {

struct Contact {
    std::string component_id;
    PixelCoord pixel;  // smallest (row, col) wire pixel adjacent to the box
};

// One maximal connected wire region and every box it touches.
struct ConnectionGroup {
    int region_id = 0;
    std::vector<PixelCoord> pixels;  // sorted
    std::vector<Contact> touched;    // distinct component ids, sorted by id
};

struct SelfLoopWarning {
    int region_id = 0;
    std::string component_id;
};

struct TraceResult {
    std::vector<ConnectionGroup> groups;  // sorted by smallest region pixel
    // A region meeting the same box at two separate contact sites is a
    // shorted component; reported for human review, not an error.
    std::vector<SelfLoopWarning> self_loops;
};

TraceResult find_groups(const BinaryRaster& r, const Schematic& s,
                        Connectivity conn = kDefaultConnectivity);

// Direction the wire leaves the component: angle from the box center to
// the centroid of region pixels within Manhattan distance
// kContactWindowRadius of the contact pixel.
double contact_angle(const ConnectionGroup& g, const ComponentBox& component);

}  // namespace schex
