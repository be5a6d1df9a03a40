#include <doctest.h>

#include <map>
#include <numeric>
#include <set>

#include "schex/synth.hpp"

using namespace schex;

namespace {

SynthConfig config(std::uint64_t seed, int lo, int hi) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.count_min = lo;
    cfg.count_max = hi;
    return cfg;
}

bool netlist_connected(const Netlist& n) {
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < n.components.size(); ++i)
        index[n.components[i].id] = static_cast<int>(i);
    std::vector<std::vector<int>> adj(n.components.size());
    for (const auto& net : n.nets) {
        if (net.members.size() < 2) continue;
        for (std::size_t i = 1; i < net.members.size(); ++i) {
            int a = index.at(net.members[0].component_id);
            int b = index.at(net.members[i].component_id);
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
    }
    std::vector<std::uint8_t> seen(n.components.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        ++reached;
        for (int d : adj[static_cast<std::size_t>(c)])
            if (!seen[static_cast<std::size_t>(d)]) {
                seen[static_cast<std::size_t>(d)] = 1;
                stack.push_back(d);
            }
    }
    return reached == n.components.size();
}

}  // namespace

TEST_CASE("sample_netlist is deterministic in the seed") {
    auto cfg = config(17, 2, 2);
    Netlist a = sample_netlist(cfg);
    Netlist b = sample_netlist(cfg);
    CHECK(emit_spice(a) == emit_spice(b));
    CHECK(a.components.size() == 2);

    auto other = sample_netlist(config(18, 2, 2));
    CHECK(other.components.size() == 2);
}

TEST_CASE("sampled netlists are connected and well-formed") {
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        Netlist n = sample_netlist(config(seed, 3, 30));
        CHECK(netlist_connected(n));
        int gnd = 0;
        std::set<std::string> ids;
        for (const auto& c : n.components) {
            CHECK(ids.insert(c.id).second);
            gnd += c.category == ComponentCategory::Gnd ? 1 : 0;
        }
        CHECK(gnd == 1);
        for (const auto& net : n.nets) {
            CHECK(net.members.size() >= 2);  // no stubs when dangling is off
            std::set<std::string> comps;
            for (const auto& m : net.members) CHECK(comps.insert(m.component_id).second);
        }
    }
}

TEST_CASE("dangling probability one forces at least one stub net") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        auto cfg = config(seed, 3, 10);
        cfg.dangling_probability = 1.0;
        Netlist n = sample_netlist(cfg);
        int stubs = 0;
        for (const auto& net : n.nets) stubs += net.members.size() == 1 ? 1 : 0;
        CHECK(stubs >= 1);
        CHECK(netlist_connected(n));
    }
}

TEST_CASE("omit probability forces a junction site to exist") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        auto cfg = config(seed, 3, 10);
        cfg.omit_junction_probability = 1.0;
        Netlist n = sample_netlist(cfg);
        bool wide = false;
        for (const auto& net : n.nets) wide |= net.members.size() >= 3;
        CHECK(wide);
    }
}

TEST_CASE("render is byte-deterministic") {
    auto cfg = config(7, 4, 8);
    cfg.crossing_probability = 0.5;
    Netlist n = sample_netlist(cfg);
    RenderResult a = render(cfg, n, "x.pgm");
    RenderResult b = render(cfg, n, "x.pgm");
    CHECK(a.image.samples == b.image.samples);
    CHECK(save_annotations(a.annotations) == save_annotations(b.annotations));
    CHECK(a.layout.crossing_points == b.layout.crossing_points);
    CHECK(a.layout.junction_dots == b.layout.junction_dots);
}

TEST_CASE("rendered annotations validate and carry junction dots") {
    for (std::uint64_t seed = 3; seed <= 10; ++seed) {
        auto cfg = config(seed, 4, 10);
        Netlist n = sample_netlist(cfg);
        RenderResult r = render(cfg, n, "img.pgm");
        AnnotationFile back = load_annotations(save_annotations(r.annotations));
        CHECK(back.boxes.size() == r.annotations.boxes.size());
        int dots = 0;
        for (const auto& b : back.boxes)
            dots += b.category == ComponentCategory::Junction ? 1 : 0;
        CHECK(dots == static_cast<int>(r.layout.junction_dots.size()));
        CHECK(r.layout.omitted_junctions.empty());
        CHECK(back.page_width == r.image.width);
        CHECK(back.page_height == r.image.height);
    }
}

TEST_CASE("crossing probability one forces a recorded crossing") {
    // Four components, two disjoint two-member nets.
    Netlist n;
    n.title = "cross";
    n.components = {{"g1", ComponentCategory::Gnd, Orientation::R0, ""},
                    {"p1", ComponentCategory::Port, Orientation::R0, ""},
                    {"p2", ComponentCategory::Port, Orientation::R0, ""},
                    {"p3", ComponentCategory::Port, Orientation::R0, ""}};
    n.nets = {{"0", {{"g1", "t1"}, {"p1", "t1"}}}, {"net1", {{"p2", "t1"}, {"p3", "t1"}}}};
    SynthConfig cfg = config(5, 4, 4);
    cfg.crossing_probability = 1.0;
    RenderResult r = render(cfg, n, "img.pgm");
    CHECK(r.layout.crossing_points.size() >= 1);

    SUBCASE("the crossing is drawn without a junction dot") {
        CHECK(r.layout.junction_dots.empty());
        BinaryRaster raster = binarize(r.image);
        for (const auto& p : r.layout.crossing_points) CHECK(raster.ink(p));
    }
}

TEST_CASE("omit probability one records omitted dots on multi-way nets") {
    auto cfg = config(11, 5, 9);
    cfg.omit_junction_probability = 1.0;
    Netlist n = sample_netlist(cfg);
    RenderResult r = render(cfg, n, "img.pgm");
    CHECK(r.layout.omitted_junctions.size() >= 1);
    CHECK(r.layout.junction_dots.empty());
    for (const auto& b : r.annotations.boxes)
        CHECK(b.category != ComponentCategory::Junction);
}

TEST_CASE("dangling nets render as stub wires flagged in the layout") {
    auto cfg = config(13, 3, 6);
    cfg.dangling_probability = 1.0;
    Netlist n = sample_netlist(cfg);
    RenderResult r = render(cfg, n, "img.pgm");
    CHECK(r.layout.dangling_nets.size() >= 1);
    std::set<std::string> single;
    for (const auto& net : n.nets)
        if (net.members.size() == 1) single.insert(net.name);
    CHECK(std::set<std::string>(r.layout.dangling_nets.begin(),
                                r.layout.dangling_nets.end()) == single);
}

TEST_CASE("an unroutable netlist gives up instead of looping") {
    // K5 on five MOSFETs: ten pairwise nets, not planar, and crossings
    // are disabled.
    Netlist n;
    n.title = "k5";
    std::vector<std::string> ids = {"m1", "m2", "m3", "m4", "m5"};
    for (const auto& id : ids)
        n.components.push_back({id, ComponentCategory::Nmos4, Orientation::R0,
                                default_parameters(ComponentCategory::Nmos4)});
    const std::vector<std::string> roles = terminal_roles(ComponentCategory::Nmos4);
    std::vector<int> used(5, 0);
    int net_no = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t k = i + 1; k < 5; ++k) {
            Net net;
            net.name = "net" + std::to_string(++net_no);
            net.members.push_back({ids[i], roles[static_cast<std::size_t>(used[i]++)]});
            net.members.push_back({ids[k], roles[static_cast<std::size_t>(used[k]++)]});
            std::sort(net.members.begin(), net.members.end());
            n.nets.push_back(std::move(net));
        }
    }
    std::sort(n.nets.begin(), n.nets.end(),
              [](const Net& a, const Net& b) { return a.name < b.name; });
    SynthConfig cfg = config(1, 5, 5);
    CHECK_THROWS_AS(render(cfg, n, "img.pgm"), RenderGiveUp);
}

TEST_CASE("render validates its input netlist") {
    SynthConfig cfg = config(1, 2, 2);
    SUBCASE("self-loop nets are rejected") {
        Netlist n;
        n.title = "x";
        n.components = {{"r1", ComponentCategory::Resistor, Orientation::R0, "1k"},
                        {"g1", ComponentCategory::Gnd, Orientation::R0, ""}};
        n.nets = {{"0", {{"g1", "t1"}, {"r1", "t1"}, {"r1", "t2"}}}};
        CHECK_THROWS_AS(render(cfg, n, "i.pgm"), InvalidInput);
    }
    SUBCASE("unbound terminals are rejected") {
        Netlist n;
        n.title = "x";
        n.components = {{"r1", ComponentCategory::Resistor, Orientation::R0, "1k"},
                        {"g1", ComponentCategory::Gnd, Orientation::R0, ""}};
        n.nets = {{"0", {{"g1", "t1"}, {"r1", "t1"}}}};
        CHECK_THROWS_AS(render(cfg, n, "i.pgm"), InvalidInput);
    }
    SUBCASE("junction components are renderer-internal") {
        Netlist n;
        n.title = "x";
        n.components = {{"j1", ComponentCategory::Junction, Orientation::R0, ""}};
        n.nets = {{"net1", {{"j1", "t1"}}}};
        CHECK_THROWS_AS(render(cfg, n, "i.pgm"), InvalidInput);
    }
}
