#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schex/netlist.hpp"
#include "schex/raster.hpp"
#include "schex/schema.hpp"

namespace schex {

struct SynthConfig {
    std::uint64_t seed = 1;
    int count_min = 3;
    int count_max = 8;
    double crossing_probability = 0.0;
    double omit_junction_probability = 0.0;
    double dangling_probability = 0.0;
    int line_width = 1;   // 1..3 pixels
    int grid_pitch = 16;  // routing lane spacing, >= 4 * line_width
};

void validate_config(const SynthConfig& cfg);

struct RouteSegment {
    PixelCoord a{}, b{};  // axis-aligned, node centers
};

struct NetRoute {
    std::string net;
    std::vector<RouteSegment> segments;
};

// Ground-truth record of one rendered instance.
struct SynthLayout {
    Netlist netlist;
    std::vector<ComponentBox> placements;  // sampled components only
    std::vector<NetRoute> routes;
    std::vector<PixelCoord> crossing_points;     // junction-free wire crossings
    std::vector<PixelCoord> junction_dots;       // drawn dots (annotated components)
    std::vector<PixelCoord> omitted_junctions;   // dot sites sampled for omission
    std::vector<std::string> dangling_nets;      // single-member stub nets
};

struct RenderResult {
    GrayImage image;
    AnnotationFile annotations;
    SynthLayout layout;
};

// Seed-deterministic random netlist: connected through its multi-member
// nets, exactly one gnd, no net touching one component twice. With
// dangling_probability > 0 leftover terminals become single-member stub
// nets (at 1.0, every output has at least one); with
// omit_junction_probability > 0 the sample always contains a net of three
// or more members so an omission site exists.
Netlist sample_netlist(const SynthConfig& cfg);

// Places components on a coarse grid and Manhattan-routes every net.
// Wires of different nets only meet at recorded perpendicular crossings;
// three-way meets of one net carry a junction dot (drawn as a disk and
// annotated as a junction component) unless sampled for omission. Throws
// RenderGiveUp when no routable placement is found within the retry
// budget.
RenderResult render(const SynthConfig& cfg, const Netlist& n,
                    const std::string& image_name = "");

}  // namespace schex
