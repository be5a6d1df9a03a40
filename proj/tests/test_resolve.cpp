#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "schex/resolve.hpp"
#include "schex/rng.hpp"
#include "test_util.hpp"

using namespace schex;
using testutil::box;

namespace {

ConnectionGroup group_of(const BinaryRaster& r, const Schematic& s, std::size_t index = 0) {
    auto traced = find_groups(r, s);
    REQUIRE(traced.groups.size() > index);
    return traced.groups[index];
}

// A plus crossing of the given line width centered at (row, col), with
// four port boxes at the arm ends.
struct PlusFixture {
    BinaryRaster raster = testutil::raster_from({"."});
    Schematic schematic;
    PixelCoord center{};

    PlusFixture(int row, int col, int width, int arm, int canvas_w = 96, int canvas_h = 96) {
        testutil::Canvas cv(canvas_w, canvas_h);
        cv.hline(row, col - arm, col + arm, width);
        cv.vline(col, row - arm, row + arm, width);
        raster = cv.raster();
        center = {row, col};
        int hi = (width - 1) / 2, lo = width / 2;
        std::vector<ComponentBox> boxes = {
            box("w", ComponentCategory::Port, col - arm - 8, row - lo - 3, col - arm,
                row + hi + 4),
            box("e", ComponentCategory::Port, col + arm + 1, row - lo - 3, col + arm + 9,
                row + hi + 4),
            box("n", ComponentCategory::Port, col - lo - 3, row - arm - 8, col + hi + 4,
                row - arm),
            box("s", ComponentCategory::Port, col - lo - 3, row + arm + 1, col + hi + 4,
                row + arm + 9),
        };
        auto result = segment_page(raster, boxes, "p");
        REQUIRE(result.schematics.size() == 1);
        schematic = result.schematics[0];
    }

    ConnectionGroup group() const { return group_of(raster, schematic); }
};

// w--e horizontal wire crossed by two vertical wires n1--s1 and n2--s2.
struct DoubleCrossFixture {
    BinaryRaster raster = testutil::raster_from({"."});
    Schematic schematic;

    DoubleCrossFixture() {
        testutil::Canvas cv(96, 48);
        cv.hline(20, 8, 79);
        cv.vline(28, 8, 31);
        cv.vline(60, 8, 31);
        raster = cv.raster();
        std::vector<ComponentBox> boxes = {
            box("w", ComponentCategory::Port, 0, 16, 8, 25),
            box("e", ComponentCategory::Port, 80, 16, 88, 25),
            box("n1", ComponentCategory::Port, 24, 0, 33, 8),
            box("s1", ComponentCategory::Port, 24, 32, 33, 40),
            box("n2", ComponentCategory::Port, 56, 0, 65, 8),
            box("s2", ComponentCategory::Port, 56, 32, 65, 40),
        };
        auto result = segment_page(raster, boxes, "p");
        REQUIRE(result.schematics.size() == 1);
        schematic = result.schematics[0];
    }
};

}  // namespace

TEST_CASE("classify_group by touched count") {
    CHECK(classify_size(1) == GroupCase::Dangling);
    CHECK(classify_size(2) == GroupCase::Direct);
    CHECK(classify_size(3) == GroupCase::OddException);
    CHECK(classify_size(4) == GroupCase::Crossing);
    CHECK(classify_size(5) == GroupCase::OddException);
    CHECK(classify_size(6) == GroupCase::Crossing);
    CHECK_THROWS_AS(classify_size(0), InvalidInput);
}

TEST_CASE("insert_dangling_junction") {
    SUBCASE("straight stub puts the junction at the far end") {
        testutil::Canvas cv(30, 12);
        cv.hline(5, 8, 17);
        auto r = cv.raster();
        auto b = box("a", ComponentCategory::Resistor, 0, 0, 8, 11);
        auto result = segment_page(r, {b}, "p");
        auto g = group_of(r, result.schematics[0]);
        auto resolved = insert_dangling_junction(g, b, "xj1");
        CHECK(resolved.junction.center == PixelCoord{5, 17});
        CHECK(resolved.junction.box.x0 == 16);
        CHECK(resolved.junction.box.x1 == 19);
        CHECK(resolved.connection.a.component_id == "a");
        CHECK(resolved.connection.b.component_id == "xj1");
        CHECK(resolved.connection.via.empty());
    }
    SUBCASE("one-pixel stub centers on that pixel") {
        testutil::Canvas cv(20, 12);
        cv.set(5, 8);
        auto r = cv.raster();
        auto b = box("a", ComponentCategory::Resistor, 0, 0, 8, 11);
        auto result = segment_page(r, {b}, "p");
        auto g = group_of(r, result.schematics[0]);
        auto resolved = insert_dangling_junction(g, b, "xj1");
        CHECK(resolved.junction.center == PixelCoord{5, 8});
    }
    SUBCASE("hooked stub uses geodesic, not euclidean, distance") {
        // Right, up, then back left: the tip ends near the contact in
        // straight-line distance but is geodesically farthest.
        testutil::Canvas cv(40, 30);
        cv.hline(20, 8, 20);
        cv.vline(20, 16, 20);
        cv.hline(16, 10, 20);
        auto r = cv.raster();
        auto b = box("a", ComponentCategory::Resistor, 0, 15, 8, 26);
        auto result = segment_page(r, {b}, "p");
        auto g = group_of(r, result.schematics[0]);
        REQUIRE(g.touched.size() == 1);
        auto resolved = insert_dangling_junction(g, b, "xj1");

        // Oracle: BFS distances along the region.
        std::set<PixelCoord> members(g.pixels.begin(), g.pixels.end());
        std::map<PixelCoord, int> dist{{g.touched[0].pixel, 0}};
        std::vector<PixelCoord> frontier{g.touched[0].pixel};
        while (!frontier.empty()) {
            std::vector<PixelCoord> next;
            for (const auto& p : frontier) {
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        PixelCoord q{p.row + dr, p.col + dc};
                        if ((dr || dc) && members.count(q) && !dist.count(q)) {
                            dist[q] = dist[p] + 1;
                            next.push_back(q);
                        }
                    }
            }
            frontier = std::move(next);
        }
        PixelCoord far = g.touched[0].pixel;
        int best = -1;
        for (const auto& p : g.pixels) {
            if (dist.at(p) > best) {
                best = dist.at(p);
                far = p;
            }
        }
        CHECK(resolved.junction.center == far);
        CHECK(far == PixelCoord{16, 10});
    }
}

TEST_CASE("locate_intersection finds crossing centers") {
    SUBCASE("width-1 plus with k=3 hits the exact center") {
        PlusFixture fx(20, 24, 1, 5, 48, 48);
        CHECK(locate_intersection(fx.group(), 3) == fx.center);
    }
    SUBCASE("k=1 degenerates to the smallest region pixel") {
        PlusFixture fx(20, 24, 1, 5, 48, 48);
        auto g = fx.group();
        CHECK(locate_intersection(g, 1) == g.pixels.front());
    }
    SUBCASE("two identical crossings pick the upper-left one") {
        DoubleCrossFixture fx;
        auto g = group_of(fx.raster, fx.schematic);
        CHECK(g.touched.size() == 6);
        CHECK(locate_intersection(g, 3) == PixelCoord{20, 28});
        CHECK(locate_intersection(g, 5) == PixelCoord{20, 28});
    }
    SUBCASE("result is translation invariant") {
        for (auto [dr, dc] : {std::pair{0, 0}, std::pair{3, 7}, std::pair{11, 2}}) {
            PlusFixture fx(20 + dr, 24 + dc, 1, 6, 72, 72);
            CHECK(locate_intersection(fx.group(), 5) == PixelCoord{20 + dr, 24 + dc});
        }
    }
    SUBCASE("width-1 plus is exact for any odd kernel") {
        PlusFixture fx(24, 24, 1, 9, 64, 64);
        for (int k : {3, 5, 7, 9}) CHECK(locate_intersection(fx.group(), k) == fx.center);
    }
    SUBCASE("kernel validation") {
        PlusFixture fx(20, 24, 1, 5, 48, 48);
        auto g = fx.group();
        CHECK_THROWS_AS(locate_intersection(g, 4), InvalidInput);
        CHECK_THROWS_AS(locate_intersection(g, 0), InvalidInput);
    }
    SUBCASE("oracle: brute-force windowed count over the plus region") {
        PlusFixture fx(20, 24, 1, 5, 48, 48);
        auto g = fx.group();
        int best = -1;
        std::vector<PixelCoord> argmax;
        for (const auto& p : g.pixels) {
            int count = 0;
            for (const auto& q : g.pixels)
                if (std::abs(p.row - q.row) <= 1 && std::abs(p.col - q.col) <= 1) ++count;
            if (count > best) {
                best = count;
                argmax.clear();
            }
            if (count == best) argmax.push_back(p);
        }
        CHECK(best == 5);  // the center's 3x3 window count
        auto found = locate_intersection(g, 3);
        CHECK(std::find(argmax.begin(), argmax.end(), found) != argmax.end());
        CHECK(found == fx.center);
    }
}

TEST_CASE("resolve_crossing splits a plus into four arms") {
    PlusFixture fx(24, 24, 1, 12, 72, 72);
    auto g = fx.group();
    auto split = resolve_crossing(g, fx.center, 5, fx.schematic.boxes);
    REQUIRE(split.failure.empty());
    REQUIRE(split.arms.size() == 4);
    CHECK(split.arms[0].angle_deg == doctest::Approx(0.0).epsilon(0.01));
    CHECK(split.arms[1].angle_deg == doctest::Approx(90.0).epsilon(0.01));
    CHECK(split.arms[2].angle_deg == doctest::Approx(180.0).epsilon(0.01));
    CHECK(split.arms[3].angle_deg == doctest::Approx(270.0).epsilon(0.01));
    CHECK(split.arms[0].component_ids == std::vector<std::string>{"e"});
    CHECK(split.arms[1].component_ids == std::vector<std::string>{"n"});
    CHECK(split.arms[2].component_ids == std::vector<std::string>{"w"});
    CHECK(split.arms[3].component_ids == std::vector<std::string>{"s"});
}

TEST_CASE("resolve_crossing rejects a T junction (three arms)") {
    testutil::Canvas cv(60, 60);
    cv.hline(30, 8, 51);
    cv.vline(30, 30, 51);
    auto r = cv.raster();
    std::vector<ComponentBox> boxes = {
        box("w", ComponentCategory::Port, 0, 26, 8, 35),
        box("e", ComponentCategory::Port, 52, 26, 60, 35),
        box("s", ComponentCategory::Port, 26, 52, 35, 60),
    };
    auto result = segment_page(r, boxes, "p");
    auto g = group_of(r, result.schematics[0]);
    auto split = resolve_crossing(g, PixelCoord{30, 30}, 5, result.schematics[0].boxes);
    CHECK_FALSE(split.failure.empty());
    CHECK(split.arms.empty());
}

TEST_CASE("reroute_opposites pairs angle-sorted arms") {
    SUBCASE("axis-aligned") {
        auto pairs = reroute_opposites({0, 90, 180, 270});
        REQUIRE(pairs.has_value());
        CHECK(*pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {1, 3}});
    }
    SUBCASE("rotated by ten degrees") {
        auto pairs = reroute_opposites({10, 100, 190, 280});
        REQUIRE(pairs.has_value());
        CHECK(*pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {1, 3}});
    }
    SUBCASE("skewed diagonals pair by sorted index") {
        auto pairs = reroute_opposites({0, 45, 180, 225});
        REQUIRE(pairs.has_value());
        CHECK(*pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {1, 3}});
    }
    SUBCASE("unsorted input pairs by cyclic order, not list position") {
        auto pairs = reroute_opposites({180, 0, 270, 90});
        REQUIRE(pairs.has_value());
        CHECK(*pairs == std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}, {3, 2}});
    }
    SUBCASE("odd or too-small arm counts are unpairable") {
        CHECK_FALSE(reroute_opposites({0, 90, 180}).has_value());
        CHECK_FALSE(reroute_opposites({0, 180}).has_value());
    }
    SUBCASE("pairing is invariant under a common rotation") {
        Rng rng(5);
        for (int trial = 0; trial < 50; ++trial) {
            int m = 2 + static_cast<int>(rng.below(2));  // 4 or 6 arms
            std::vector<double> angles;
            double a = rng.real() * 20.0;
            for (int i = 0; i < 2 * m; ++i) {
                angles.push_back(a);
                a += 20.0 + rng.real() * (360.0 / (2 * m) - 20.0);
            }
            auto canon = [](std::vector<std::pair<std::size_t, std::size_t>> v) {
                for (auto& pr : v)
                    if (pr.first > pr.second) std::swap(pr.first, pr.second);
                std::sort(v.begin(), v.end());
                return v;
            };
            auto base = reroute_opposites(angles);
            REQUIRE(base.has_value());
            double off = rng.real() * 360.0;
            std::vector<double> rotated;
            for (double v : angles) rotated.push_back(normalize_deg(v + off));
            auto rot = reroute_opposites(rotated);
            REQUIRE(rot.has_value());
            CHECK(canon(*base) == canon(*rot));
        }
    }
}

TEST_CASE("resolve_all") {
    SUBCASE("all-direct input echoes the groups") {
        testutil::Canvas cv(40, 12);
        cv.hline(5, 8, 27);
        auto r = cv.raster();
        std::vector<ComponentBox> boxes = {box("a", ComponentCategory::Resistor, 0, 0, 8, 11),
                                           box("b", ComponentCategory::Resistor, 28, 0, 36, 11)};
        auto result = segment_page(r, boxes, "p");
        auto traced = find_groups(r, result.schematics[0]);
        auto report = resolve_all(traced.groups, result.schematics[0].boxes, 5);
        CHECK(report.exceptions.empty());
        CHECK(report.inserted_junctions.empty());
        REQUIRE(report.connections.size() == 1);
        CHECK(report.connections[0].a.component_id == "a");
        CHECK(report.connections[0].b.component_id == "b");
        CHECK(report.connections[0].via.empty());
    }
    SUBCASE("dangling plus direct yields one junction and two connections") {
        testutil::Canvas cv(60, 24);
        cv.hline(5, 8, 27);   // a--b
        cv.hline(16, 8, 18);  // stub off a
        auto r = cv.raster();
        std::vector<ComponentBox> boxes = {box("a", ComponentCategory::Resistor, 0, 0, 8, 23),
                                           box("b", ComponentCategory::Resistor, 28, 0, 36, 11)};
        auto result = segment_page(r, boxes, "p");
        auto traced = find_groups(r, result.schematics[0]);
        REQUIRE(traced.groups.size() == 2);
        auto report = resolve_all(traced.groups, result.schematics[0].boxes, 5);
        CHECK(report.exceptions.empty());
        REQUIRE(report.inserted_junctions.size() == 1);
        CHECK(report.inserted_junctions[0].id == "xj1");
        REQUIRE(report.connections.size() == 2);
    }
    SUBCASE("an odd group flags the schematic and reduces nothing") {
        testutil::Canvas cv(60, 60);
        cv.hline(30, 8, 51);
        cv.vline(30, 30, 51);
        auto r = cv.raster();
        std::vector<ComponentBox> boxes = {
            box("w", ComponentCategory::Port, 0, 26, 8, 35),
            box("e", ComponentCategory::Port, 52, 26, 60, 35),
            box("s", ComponentCategory::Port, 26, 52, 35, 60),
        };
        auto result = segment_page(r, boxes, "p");
        auto traced = find_groups(r, result.schematics[0]);
        auto report = resolve_all(traced.groups, result.schematics[0].boxes, 5);
        REQUIRE(report.exceptions.size() == 1);
        CHECK(report.exceptions[0].reason == "OddGroup");
        CHECK(report.connections.empty());
    }
    SUBCASE("plus crossing reduces to two straight-through connections") {
        PlusFixture fx(24, 24, 1, 12, 72, 72);
        auto traced = find_groups(fx.raster, fx.schematic);
        auto report = resolve_all(traced.groups, fx.schematic.boxes, 5);
        CHECK(report.exceptions.empty());
        REQUIRE(report.connections.size() == 2);
        REQUIRE(report.resolved_crossings.size() == 1);
        CHECK(report.resolved_crossings[0] == fx.center);
        std::set<std::set<std::string>> got;
        for (const auto& c : report.connections) {
            got.insert({c.a.component_id, c.b.component_id});
            REQUIRE(c.via.size() == 1);
            CHECK(c.via[0] == fx.center);
        }
        CHECK(got == std::set<std::set<std::string>>{{"w", "e"}, {"n", "s"}});
    }
    SUBCASE("six-box double crossing reduces chain-wise") {
        DoubleCrossFixture fx;
        auto traced = find_groups(fx.raster, fx.schematic);
        REQUIRE(traced.groups.size() == 1);
        CHECK(traced.groups[0].touched.size() == 6);
        auto report = resolve_all(traced.groups, fx.schematic.boxes, 5);
        CHECK(report.exceptions.empty());
        CHECK(report.resolved_crossings.size() == 2);
        REQUIRE(report.connections.size() == 3);
        std::map<std::set<std::string>, std::vector<PixelCoord>> got;
        for (const auto& c : report.connections)
            got[{c.a.component_id, c.b.component_id}] = c.via;
        REQUIRE(got.count({"e", "w"}));
        REQUIRE(got.count({"n1", "s1"}));
        REQUIRE(got.count({"n2", "s2"}));
        CHECK(got.at({"e", "w"}).size() == 2);  // traverses both intersections
        CHECK(got.at({"n1", "s1"}) == std::vector<PixelCoord>{{20, 28}});
        CHECK(got.at({"n2", "s2"}) == std::vector<PixelCoord>{{20, 60}});
    }
    SUBCASE("H-shaped even group (two dropped dots) flags, never emits") {
        // Two vertical wires tied by a bar with no junction dots: four
        // touched boxes, so it classifies as Crossing, but no block can
        // split it into pairable arms.
        testutil::Canvas cv(64, 48);
        cv.vline(20, 8, 39);
        cv.vline(40, 8, 39);
        cv.hline(24, 20, 40);
        auto r = cv.raster();
        std::vector<ComponentBox> boxes = {
            box("n1", ComponentCategory::Port, 16, 0, 25, 8),
            box("s1", ComponentCategory::Port, 16, 40, 25, 48),
            box("n2", ComponentCategory::Port, 36, 0, 45, 8),
            box("s2", ComponentCategory::Port, 36, 40, 45, 48),
        };
        auto result = segment_page(r, boxes, "p");
        auto traced = find_groups(r, result.schematics[0]);
        REQUIRE(traced.groups.size() == 1);
        REQUIRE(traced.groups[0].touched.size() == 4);
        auto report = resolve_all(traced.groups, result.schematics[0].boxes, 5);
        REQUIRE_FALSE(report.exceptions.empty());
        CHECK(report.exceptions[0].reason == "ArmAmbiguity");
        CHECK(report.connections.empty());
    }
}

TEST_CASE("locate_intersection stays within floor(k/2) for widths 1-3") {
    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        int width = 1 + static_cast<int>(rng.below(3));
        int arm = 12 + static_cast<int>(rng.below(8));
        int row = 30 + static_cast<int>(rng.below(18));
        int col = 30 + static_cast<int>(rng.below(18));
        PlusFixture fx(row, col, width, arm, 96, 96);
        double cy = row - (width % 2 == 0 ? 0.5 : 0.0);
        double cx = col - (width % 2 == 0 ? 0.5 : 0.0);
        for (int k : {3, 5, 7}) {
            auto found = locate_intersection(fx.group(), k);
            double cheb = std::max(std::abs(found.row - cy), std::abs(found.col - cx));
            CHECK(cheb <= k / 2);
            if (width == 1) CHECK(found == PixelCoord{row, col});
        }
    }
}
