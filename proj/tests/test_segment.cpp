#include <doctest.h>

#include <algorithm>
#include <set>

#include "schex/rng.hpp"
#include "schex/segment.hpp"
#include "test_util.hpp"

using namespace schex;
using testutil::box;
using testutil::raster_from;

TEST_CASE("wire_pixels excludes box-covered ink") {
    SUBCASE("all ink inside one box") {
        auto r = raster_from({
            "......",
            ".##...",
            ".##...",
            "......",
        });
        auto wires = wire_pixels(r, {box("a", ComponentCategory::Gnd, 1, 1, 3, 3)});
        CHECK(wires.empty());
    }
    SUBCASE("segment fully outside boxes") {
        testutil::Canvas cv(20, 5);
        cv.hline(2, 4, 13);
        auto wires = wire_pixels(cv.raster(), {box("a", ComponentCategory::Gnd, 0, 0, 2, 2)});
        CHECK(wires.size() == 10);
    }
    SUBCASE("half-covered segment keeps only the outside half") {
        testutil::Canvas cv(20, 5);
        cv.hline(2, 0, 9);
        auto b = box("a", ComponentCategory::Gnd, 0, 0, 5, 5);
        auto wires = wire_pixels(cv.raster(), {b});
        // Oracle: per-pixel membership.
        std::vector<PixelCoord> expect;
        for (int c = 0; c < 10; ++c)
            if (!b.contains({2, c})) expect.push_back({2, c});
        CHECK(wires == expect);
    }
}

namespace {

// Page with three boxes: a and b joined by a wire, c isolated.
struct TwoClusterPage {
    BinaryRaster raster = raster_from({"."});
    std::vector<ComponentBox> boxes;

    TwoClusterPage() {
        testutil::Canvas cv(60, 30);
        cv.hline(5, 8, 19);  // a (0,0)-(8,10) to b (20,0)-(28,10)
        raster = cv.raster();
        boxes = {
            box("a", ComponentCategory::Resistor, 0, 0, 8, 11),
            box("b", ComponentCategory::Resistor, 20, 0, 28, 11),
            box("c", ComponentCategory::Gnd, 40, 20, 50, 28),
        };
    }
};

}  // namespace

TEST_CASE("segment_page splits by wire connectivity") {
    TwoClusterPage page;
    auto result = segment_page(page.raster, page.boxes, "p");
    REQUIRE(result.schematics.size() == 2);
    CHECK(result.schematics[0].boxes.size() == 2);
    CHECK(result.schematics[0].boxes[0].id == "a");
    CHECK(result.schematics[0].boxes[1].id == "b");
    CHECK(result.schematics[0].ink_region.size() == 12);
    CHECK(result.schematics[1].boxes.size() == 1);
    CHECK(result.schematics[1].boxes[0].id == "c");
    CHECK(result.schematics[1].ink_region.empty());
    CHECK(result.stray_ink_pixels == 0);

    SUBCASE("oracle: flood-fill reachability agrees") {
        // a and b reachable from each other, c from neither.
        auto wires = wire_pixels(page.raster, page.boxes);
        std::set<PixelCoord> wire_set(wires.begin(), wires.end());
        std::set<PixelCoord> seen;
        std::vector<PixelCoord> stack;
        for (const auto& p : wires)
            if (box_pixel_gap(page.boxes[0], p) == 1) stack.push_back(p);
        while (!stack.empty()) {
            auto p = stack.back();
            stack.pop_back();
            if (!seen.insert(p).second) continue;
            for (const auto& q : neighbors(page.raster, p))
                if (wire_set.count(q)) stack.push_back(q);
        }
        bool reaches_b = false, reaches_c = false;
        for (const auto& p : seen) {
            reaches_b |= box_pixel_gap(page.boxes[1], p) == 1;
            reaches_c |= box_pixel_gap(page.boxes[2], p) == 1;
        }
        CHECK(reaches_b);
        CHECK_FALSE(reaches_c);
    }
}

TEST_CASE("single box on a blank page forms a singleton schematic") {
    auto r = raster_from({"....", "....", "...."});
    auto result = segment_page(r, {box("a", ComponentCategory::Gnd, 1, 1, 3, 3)}, "p");
    REQUIRE(result.schematics.size() == 1);
    CHECK(result.schematics[0].boxes.size() == 1);
    CHECK(result.schematics[0].ink_region.empty());
}

TEST_CASE("segment_page ignores input box order") {
    TwoClusterPage page;
    auto base = segment_page(page.raster, page.boxes, "p");
    std::vector<ComponentBox> permuted = {page.boxes[2], page.boxes[0], page.boxes[1]};
    auto other = segment_page(page.raster, permuted, "p");
    REQUIRE(base.schematics.size() == other.schematics.size());
    for (std::size_t i = 0; i < base.schematics.size(); ++i) {
        std::vector<std::string> ids_a, ids_b;
        for (const auto& b : base.schematics[i].boxes) ids_a.push_back(b.id);
        for (const auto& b : other.schematics[i].boxes) ids_b.push_back(b.id);
        CHECK(ids_a == ids_b);
        CHECK(base.schematics[i].ink_region == other.schematics[i].ink_region);
    }
}

TEST_CASE("segment_page output partitions boxes and wire ink") {
    TwoClusterPage page;
    // Extra decorative stroke reachable from no box.
    testutil::Canvas cv(60, 30);
    cv.hline(5, 8, 19);
    cv.hline(25, 2, 12);
    auto raster = cv.raster();
    auto result = segment_page(raster, page.boxes, "p");

    std::set<std::string> all_ids;
    std::set<PixelCoord> all_pixels;
    std::size_t total_boxes = 0, total_pixels = 0;
    for (const auto& s : result.schematics) {
        total_boxes += s.boxes.size();
        total_pixels += s.ink_region.size();
        for (const auto& b : s.boxes) all_ids.insert(b.id);
        for (const auto& p : s.ink_region) all_pixels.insert(p);
    }
    CHECK(total_boxes == page.boxes.size());
    CHECK(all_ids.size() == total_boxes);
    CHECK(all_pixels.size() == total_pixels);
    CHECK(result.stray_ink_pixels == 11);
    CHECK(total_pixels + static_cast<std::size_t>(result.stray_ink_pixels) ==
          wire_pixels(raster, page.boxes).size());
}

TEST_CASE("adding a bridging ink pixel merges two schematics") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        int gap_row = rng.range(2, 12);
        testutil::Canvas cv(40, 16);
        cv.hline(3, 6, 14);   // stub out of a
        cv.hline(12, 24, 33); // stub out of b
        std::vector<ComponentBox> boxes = {
            box("a", ComponentCategory::Resistor, 0, 0, 6, 7),
            box("b", ComponentCategory::Resistor, 34, 9, 40, 16),
        };
        auto split = segment_page(cv.raster(), boxes, "p");
        CHECK(split.schematics.size() == 2);

        // Bridge the two stubs with a connecting path.
        cv.vline(14, 3, gap_row);
        cv.hline(gap_row, 14, 24);
        cv.vline(24, gap_row, 12);
        auto merged = segment_page(cv.raster(), boxes, "p");
        CHECK(merged.schematics.size() == 1);
        CHECK(merged.schematics[0].boxes.size() == 2);
    }
}
