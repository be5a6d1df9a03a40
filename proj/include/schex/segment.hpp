#pragma once

#include <string>
#include <vector>

#include "schex/raster.hpp"
#include "schex/schema.hpp"

namespace schex {

// One connected drawing on a page: a component cluster plus all wire ink
// reachable from it.
struct Schematic {
    std::vector<ComponentBox> boxes;
    std::vector<PixelCoord> ink_region;  // sorted, disjoint from all boxes
    std::string page_ref;
};

// Ink pixels not covered by any box, sorted row-major.
std::vector<PixelCoord> wire_pixels(const BinaryRaster& r,
                                    const std::vector<ComponentBox>& boxes);

struct SegmentResult {
    std::vector<Schematic> schematics;
    // Wire ink reachable from no box (captions, stray marks); dropped.
    int stray_ink_pixels = 0;
};

// Partitions boxes into connectivity classes: A joins B when a wire-ink
// path links pixels adjacent to their borders. Output ordered by each
// class's smallest (y0, x0); invariant under permutation of the input.
SegmentResult segment_page(const BinaryRaster& r, const std::vector<ComponentBox>& boxes,
                           const std::string& page_ref = "",
                           Connectivity conn = kDefaultConnectivity);

}  // namespace schex
