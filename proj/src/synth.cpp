#include "schex/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "schex/rng.hpp"

namespace schex {

thread_local long xrej_coin = 0, xrej_taken = 0, xrej_bend = 0, xrej_clash = 0;

namespace {

constexpr int kPlacementRetries = 10;
constexpr int kSampleRetries = 300;

char id_prefix_for(ComponentCategory c) {
    switch (c) {
        case ComponentCategory::Nmos3:
        case ComponentCategory::Nmos4:
        case ComponentCategory::Pmos3:
        case ComponentCategory::Pmos4: return 'm';
        case ComponentCategory::Npn:
        case ComponentCategory::Pnp: return 'q';
        case ComponentCategory::Resistor: return 'r';
        case ComponentCategory::Capacitor: return 'c';
        case ComponentCategory::Inductor: return 'l';
        case ComponentCategory::Diode: return 'd';
        case ComponentCategory::Vsource: return 'v';
        case ComponentCategory::Isource: return 'i';
        case ComponentCategory::Gnd: return 'g';
        case ComponentCategory::Vdd: return 'u';
        case ComponentCategory::Port: return 'p';
        case ComponentCategory::Junction: return 'j';
    }
    return 'x';
}

const std::vector<ComponentCategory>& weighted_pool() {
    static const std::vector<ComponentCategory> pool = [] {
        std::vector<std::pair<ComponentCategory, int>> weights = {
            {ComponentCategory::Nmos4, 3},    {ComponentCategory::Pmos4, 3},
            {ComponentCategory::Nmos3, 1},    {ComponentCategory::Pmos3, 1},
            {ComponentCategory::Npn, 1},      {ComponentCategory::Pnp, 1},
            {ComponentCategory::Resistor, 3}, {ComponentCategory::Capacitor, 2},
            {ComponentCategory::Inductor, 1}, {ComponentCategory::Diode, 1},
            {ComponentCategory::Vsource, 1},  {ComponentCategory::Isource, 1},
            {ComponentCategory::Vdd, 1},      {ComponentCategory::Port, 1},
        };
        std::vector<ComponentCategory> flat;
        for (auto [cat, w] : weights)
            for (int i = 0; i < w; ++i) flat.push_back(cat);
        return flat;
    }();
    return pool;
}

}  // namespace

void validate_config(const SynthConfig& cfg) {
    auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob_ok(cfg.crossing_probability) || !prob_ok(cfg.omit_junction_probability) ||
        !prob_ok(cfg.dangling_probability))
        throw InvalidInput("synth: probabilities must be in [0,1]");
    if (cfg.line_width < 1 || cfg.line_width > 3)
        throw InvalidInput("synth: line width must be 1..3");
    if (cfg.grid_pitch < 4 * cfg.line_width)
        throw InvalidInput("synth: grid pitch must be at least 4x line width");
    if (cfg.count_min < 1 || cfg.count_max < cfg.count_min)
        throw InvalidInput("synth: bad component count range");
}

Netlist sample_netlist(const SynthConfig& cfg) {
    validate_config(cfg);
    Rng rng(cfg.seed);
    const int n = rng.range(cfg.count_min, cfg.count_max);

    for (int attempt = 0; attempt < kSampleRetries; ++attempt) {
        std::vector<ComponentCategory> cats;
        cats.push_back(ComponentCategory::Gnd);
        bool have_vdd = false;
        for (int i = 1; i < n; ++i) {
            ComponentCategory pick = rng.pick(weighted_pool());
            // A second vdd symbol could fuse two of its nets later and
            // short some component; one rail of each kind is plenty.
            if (pick == ComponentCategory::Vdd) {
                if (have_vdd) pick = ComponentCategory::Resistor;
                have_vdd = true;
            }
            cats.push_back(pick);
        }
        if (cfg.dangling_probability > 0.0 && n >= 2) {
            bool has_large = false;
            for (auto c : cats)
                if (terminal_roles(c).size() >= 3) has_large = true;
            if (!has_large) cats[1] = ComponentCategory::Nmos4;  // guarantees leftovers
        }

        std::vector<Component> comps;
        std::map<char, int> counters;
        for (auto c : cats) {
            char prefix = id_prefix_for(c);
            std::string id = std::string(1, prefix) + std::to_string(++counters[prefix]);
            std::string params = emits_card(c) ? default_parameters(c) : "";
            comps.push_back({id, c, Orientation::R0, params});
        }

        struct RawNet {
            std::vector<NetMember> members;
            std::set<int> comp_set;
            bool has_gnd = false, has_vdd = false, stub = false;
        };
        std::vector<RawNet> nets;
        std::function<void(RawNet&, int, const std::string&)> add_member_impl;
        auto add_member = [&](RawNet& net, int ci, const std::string& role) {
            add_member_impl(net, ci, role);
        };
        // Nets stay small, and no component pair is tied by more than two
        // nets: parallel same-pair wires cannot cross each other, so a
        // third one usually cannot be drawn at all.
        std::map<std::pair<int, int>, int> pair_nets;
        auto pair_count = [&](int ci, int cj) {
            auto it = pair_nets.find(std::minmax(ci, cj));
            return it == pair_nets.end() ? 0 : it->second;
        };
        auto note_pairs = [&](const RawNet& net, int ci) {
            for (int cj : net.comp_set)
                if (cj != ci) pair_nets[std::minmax(ci, cj)]++;
        };
        auto joinable = [&](const RawNet& net, int ci) {
            if (net.stub || net.members.size() >= 4 || net.comp_set.count(ci)) return false;
            if (cats[static_cast<std::size_t>(ci)] == ComponentCategory::Gnd && net.has_vdd)
                return false;
            if (cats[static_cast<std::size_t>(ci)] == ComponentCategory::Vdd && net.has_gnd)
                return false;
            for (int cj : net.comp_set)
                if (pair_count(ci, cj) >= 2) return false;
            return true;
        };
        add_member_impl = [&](RawNet& net, int ci, const std::string& role) {
            note_pairs(net, ci);
            net.members.push_back({comps[static_cast<std::size_t>(ci)].id, role});
            net.comp_set.insert(ci);
            if (cats[static_cast<std::size_t>(ci)] == ComponentCategory::Gnd)
                net.has_gnd = true;
            if (cats[static_cast<std::size_t>(ci)] == ComponentCategory::Vdd)
                net.has_vdd = true;
        };
        auto pairable = [&](int ci, int cj) {
            if (ci == cj || pair_count(ci, cj) >= 2) return false;
            auto a = cats[static_cast<std::size_t>(ci)], b = cats[static_cast<std::size_t>(cj)];
            return !((a == ComponentCategory::Gnd && b == ComponentCategory::Vdd) ||
                     (a == ComponentCategory::Vdd && b == ComponentCategory::Gnd));
        };

        // Virtual placement on a coarse grid: nets only form between
        // nearby components, the way page-sized circuits are drawn, so the
        // result stays close to planar and the renderer can route it.
        const int vcols = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
        std::vector<int> vcell(static_cast<std::size_t>(n));
        std::iota(vcell.begin(), vcell.end(), 0);
        rng.shuffle(vcell);
        auto near = [&](int ci, int cj) {
            int ax = vcell[static_cast<std::size_t>(ci)] % vcols;
            int ay = vcell[static_cast<std::size_t>(ci)] / vcols;
            int bx = vcell[static_cast<std::size_t>(cj)] % vcols;
            int by = vcell[static_cast<std::size_t>(cj)] / vcols;
            return std::max(std::abs(ax - bx), std::abs(ay - by)) <= 2;
        };
        auto net_near = [&](const RawNet& net, int ci) {
            for (int cj : net.comp_set)
                if (!near(ci, cj)) return false;
            return true;
        };

        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        std::vector<std::vector<std::string>> open(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            open[static_cast<std::size_t>(i)] = terminal_roles(cats[static_cast<std::size_t>(i)]);
            rng.shuffle(open[static_cast<std::size_t>(i)]);
        }

        bool failed = false;
        // Spanning structure: each component after the first attaches to
        // the already-connected part, preferring nearby partners.
        for (int k = 1; k < n && !failed; ++k) {
            int ci = order[static_cast<std::size_t>(k)];
            auto& slots = open[static_cast<std::size_t>(ci)];
            if (slots.empty()) {
                failed = true;
                break;
            }
            std::string role = slots.back();
            slots.pop_back();

            std::vector<int> compat;
            for (std::size_t ni = 0; ni < nets.size(); ++ni)
                if (joinable(nets[ni], ci) && net_near(nets[ni], ci))
                    compat.push_back(static_cast<int>(ni));

            if (!compat.empty() && rng.chance(0.35)) {
                add_member(nets[static_cast<std::size_t>(rng.pick(compat))], ci, role);
                continue;
            }
            std::vector<int> earlier, earlier_far;
            for (int k2 = 0; k2 < k; ++k2) {
                int cj = order[static_cast<std::size_t>(k2)];
                if (open[static_cast<std::size_t>(cj)].empty() || !pairable(ci, cj)) continue;
                (near(ci, cj) ? earlier : earlier_far).push_back(cj);
            }
            if (earlier.empty()) earlier = std::move(earlier_far);  // keep it connected
            if (!earlier.empty()) {
                int cj = rng.pick(earlier);
                std::string role2 = open[static_cast<std::size_t>(cj)].back();
                open[static_cast<std::size_t>(cj)].pop_back();
                RawNet net;
                add_member(net, cj, role2);
                add_member(net, ci, role);
                nets.push_back(std::move(net));
            } else if (!compat.empty()) {
                add_member(nets[static_cast<std::size_t>(rng.pick(compat))], ci, role);
            } else {
                failed = true;
            }
        }
        if (failed) continue;

        // Leftover terminals either dangle, join a nearby net, or pair up
        // with another nearby leftover.
        std::vector<std::pair<int, std::string>> pending;
        for (int k = 0; k < n; ++k) {
            int ci = order[static_cast<std::size_t>(k)];
            auto& slots = open[static_cast<std::size_t>(ci)];
            while (!slots.empty()) {
                std::string role = slots.back();
                slots.pop_back();
                if (rng.chance(cfg.dangling_probability)) {
                    RawNet stub;
                    add_member(stub, ci, role);
                    stub.stub = true;
                    nets.push_back(std::move(stub));
                    continue;
                }
                std::vector<int> compat;
                for (std::size_t ni = 0; ni < nets.size(); ++ni)
                    if (joinable(nets[ni], ci) && net_near(nets[ni], ci))
                        compat.push_back(static_cast<int>(ni));
                if (!compat.empty() && rng.chance(0.5))
                    add_member(nets[static_cast<std::size_t>(rng.pick(compat))], ci, role);
                else
                    pending.push_back({ci, role});
            }
        }
        std::vector<std::uint8_t> used(pending.size(), 0);
        for (std::size_t i = 0; i < pending.size() && !failed; ++i) {
            if (used[i]) continue;
            bool done = false;
            for (std::size_t k = i + 1; k < pending.size() && !done; ++k) {
                if (used[k] || !pairable(pending[i].first, pending[k].first) ||
                    !near(pending[i].first, pending[k].first))
                    continue;
                RawNet net;
                add_member(net, pending[i].first, pending[i].second);
                add_member(net, pending[k].first, pending[k].second);
                nets.push_back(std::move(net));
                used[i] = used[k] = 1;
                done = true;
            }
            if (done) continue;
            std::vector<int> compat;
            for (std::size_t ni = 0; ni < nets.size(); ++ni)
                if (joinable(nets[ni], pending[i].first) && net_near(nets[ni], pending[i].first))
                    compat.push_back(static_cast<int>(ni));
            if (!compat.empty()) {
                add_member(nets[static_cast<std::size_t>(rng.pick(compat))], pending[i].first,
                           pending[i].second);
            } else if (cfg.dangling_probability > 0.0) {
                RawNet stub;
                add_member(stub, pending[i].first, pending[i].second);
                stub.stub = true;
                nets.push_back(std::move(stub));
            } else {
                failed = true;
            }
        }
        if (failed) continue;

        bool has_stub = false, has_wide = false;
        for (const auto& net : nets) {
            has_stub |= net.stub;
            has_wide |= net.members.size() >= 3;
        }
        if (cfg.dangling_probability >= 1.0 && !has_stub) continue;
        if (cfg.omit_junction_probability > 0.0 && !has_wide) continue;

        // Connectivity through multi-member nets.
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (const auto& net : nets) {
            if (net.comp_set.size() < 2) continue;
            std::vector<int> list(net.comp_set.begin(), net.comp_set.end());
            for (std::size_t i = 1; i < list.size(); ++i) {
                adj[static_cast<std::size_t>(list[0])].push_back(list[i]);
                adj[static_cast<std::size_t>(list[i])].push_back(list[0]);
            }
        }
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int reached = 0;
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
        if (reached != n) continue;

        std::vector<std::vector<NetMember>> classes;
        for (auto& net : nets) classes.push_back(std::move(net.members));
        auto finalized = finalize_nets(std::move(classes), comps);
        if (finalized.rail_short) continue;

        Netlist out;
        out.title = "seed" + std::to_string(cfg.seed);
        out.components = std::move(comps);
        out.nets = std::move(finalized.nets);
        return out;
    }
    throw Error("sample_netlist: no valid netlist for this configuration after " +
                std::to_string(kSampleRetries) + " attempts");
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

// Node directions: N, E, S, W.
constexpr int kDy[4] = {-1, 0, 1, 0};
constexpr int kDx[4] = {0, 1, 0, -1};
inline int opposite(int d) { return (d + 2) % 4; }
inline std::uint8_t dbit(int d) { return static_cast<std::uint8_t>(1u << d); }
inline bool straight_mask(std::uint8_t m) {
    return m == (dbit(0) | dbit(2)) || m == (dbit(1) | dbit(3));
}
inline bool vertical_mask(std::uint8_t m) { return m == (dbit(0) | dbit(2)); }
inline int popcount8(std::uint8_t m) { return __builtin_popcount(m); }

struct NodeState {
    int net = -1;                // owning net
    std::uint8_t edges = 0;      // owner's incident edges (+ pin stem bit)
    int cross_net = -1;          // net passing straight through, if any
    std::uint8_t cross_edges = 0;
    bool box = false;            // covered by a component box
    bool dot = false;            // drawn junction dot
};

struct PinSpot {
    int comp = -1;
    std::string role;
    int net = -1;
    int gx = 0, gy = 0;  // stem node just outside the box
    int outward = 0;     // direction pointing away from the box
};

struct DotSite {
    int net = -1;
    int gx = 0, gy = 0;
    bool omitted = false;
};

struct GridCrossing {
    int gx = 0, gy = 0;
    int net_a = -1, net_b = -1;
};

// Ink regions of the partial drawing: maximal wire pieces bounded by
// pins and drawn junction dots, merged wherever two pieces cross. A new
// crossing is legal only if the two regions are distinct and no component
// or dot touches both, which is exactly when extraction can undo it.
struct Regions {
    std::vector<int> parent;            // union-find over grid nodes
    std::vector<std::set<int>> comps;   // root -> touched components/dots

    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x)
            x = parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (comps[static_cast<std::size_t>(a)].size() < comps[static_cast<std::size_t>(b)].size())
            std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        comps[static_cast<std::size_t>(a)].merge(comps[static_cast<std::size_t>(b)]);
    }
    const std::set<int>& comps_of(int node) {
        return comps[static_cast<std::size_t>(find(node))];
    }
};

// A net as drawn: either a whole netlist net or one split-off piece of a
// rail net tied to its own rail symbol.
struct DrawNet {
    std::string name;
    std::vector<int> pin_ids;  // indexes into Router::pins
    bool stub = false;
};

struct Router {
    const SynthConfig& cfg;
    const Netlist& net_list;
    Rng rng;

    int GX = 0, GY = 0;
    int ncols = 0, nrows = 0;
    std::vector<NodeState> grid;
    std::vector<std::uint8_t> routed;  // node is connected to its net's tree
    std::map<std::pair<int, int>, int> h_edges, v_edges;  // (gx,gy) -> draw net
    std::vector<PinSpot> pins;
    std::vector<DrawNet> dnets;
    std::vector<ComponentBox> comp_boxes;
    std::vector<ComponentBox> rail_boxes;  // synthetic split-rail symbols
    std::vector<DotSite> dots;
    std::vector<GridCrossing> crossings;
    std::vector<std::uint8_t> allow_cross;  // per-draw-net coin
    Regions regions;
    std::map<std::string, int> comp_index;
    int rip_budget = 0;

    struct Snapshot {
        std::vector<NodeState> grid;
        std::vector<std::uint8_t> routed;
        std::map<std::pair<int, int>, int> h_edges, v_edges;
        std::vector<DotSite> dots;
        std::vector<GridCrossing> crossings;
        Rng rng{0};
    };
    Snapshot snapshot() const {
        return {grid, routed, h_edges, v_edges, dots, crossings, rng};
    }
    void restore(const Snapshot& s) {
        grid = s.grid;
        routed = s.routed;
        h_edges = s.h_edges;
        v_edges = s.v_edges;
        dots = s.dots;
        crossings = s.crossings;
        rng = s.rng;
        recompute_regions();
    }

    Router(const SynthConfig& c, const Netlist& n, const Rng& r) : cfg(c), net_list(n), rng(r) {
        for (std::size_t i = 0; i < n.components.size(); ++i)
            comp_index[n.components[i].id] = static_cast<int>(i);
    }

    NodeState& at(int gx, int gy) { return grid[static_cast<std::size_t>(gy) * GX + gx]; }
    bool in_grid(int gx, int gy) const { return gx >= 0 && gx < GX && gy >= 0 && gy < GY; }
    bool is_routed(int gx, int gy) const {
        return routed[static_cast<std::size_t>(gy) * GX + gx] != 0;
    }
    void mark_routed(int gx, int gy) { routed[static_cast<std::size_t>(gy) * GX + gx] = 1; }

    int px(int g) const { return cfg.grid_pitch * (g + 1); }

    bool place(int attempt);
    bool route_all();
    bool route_net(int net_index, bool may_rip, int protected_net = -1);
    bool route_pin(const PinSpot& pin, int net_index, bool may_rip, int protected_net,
                   std::vector<std::pair<int, int>>& tree_nodes);
    bool dijkstra(const PinSpot& pin, int net_index, int ignore_a, int ignore_b,
                  const std::set<std::pair<int, int>>& banned,
                  std::vector<std::pair<int, int>>& path, std::vector<int>& path_dirs);
    void commit(int net_index, const std::vector<std::pair<int, int>>& path,
                const std::vector<int>& path_dirs,
                std::vector<std::pair<int, int>>& tree_nodes);
    void rip_net(int net_index);
    void recompute_regions();
};

bool Router::place(int attempt) {
    const int n = static_cast<int>(net_list.components.size());
    ncols = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
    nrows = (n + ncols - 1) / ncols;
    // Boxes span 3 nodes; cells sit 9 apart leaving 6-lane channels, with
    // a 4-lane highway around the outside.
    GX = 9 * (ncols - 1) + 11;
    GY = 9 * (nrows - 1) + 11;
    grid.assign(static_cast<std::size_t>(GX) * GY, NodeState{});
    routed.assign(static_cast<std::size_t>(GX) * GY, 0);
    h_edges.clear();
    v_edges.clear();
    pins.clear();
    comp_boxes.clear();
    dots.clear();
    crossings.clear();

    // Connectivity-driven placement: seed with the best-connected
    // component, then grow by putting each next component into the free
    // cell nearest its already-placed net mates. A seeded pick among the
    // best few cells keeps retry attempts diverse.
    std::vector<std::vector<int>> affinity(static_cast<std::size_t>(n),
                                           std::vector<int>(static_cast<std::size_t>(n), 0));
    for (const auto& net : net_list.nets) {
        for (std::size_t a = 0; a < net.members.size(); ++a) {
            for (std::size_t b = a + 1; b < net.members.size(); ++b) {
                int i = comp_index.at(net.members[a].component_id);
                int k = comp_index.at(net.members[b].component_id);
                affinity[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]++;
                affinity[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]++;
            }
        }
    }
    std::vector<int> cell_of(static_cast<std::size_t>(n), -1);
    {
        std::vector<std::uint8_t> cell_used(static_cast<std::size_t>(ncols) * nrows, 0);
        std::vector<std::uint8_t> placed(static_cast<std::size_t>(n), 0);
        int first = 0, best_total = -1;
        for (int i = 0; i < n; ++i) {
            int total = 0;
            for (int k = 0; k < n; ++k)
                total += affinity[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            if (total > best_total) {
                best_total = total;
                first = i;
            }
        }
        int center = (nrows / 2) * ncols + ncols / 2;
        cell_of[static_cast<std::size_t>(first)] = center;
        cell_used[static_cast<std::size_t>(center)] = 1;
        placed[static_cast<std::size_t>(first)] = 1;
        for (int step = 1; step < n; ++step) {
            int pick = -1, best_conn = -1;
            for (int i = 0; i < n; ++i) {
                if (placed[static_cast<std::size_t>(i)]) continue;
                int conn = 0;
                for (int k = 0; k < n; ++k)
                    if (placed[static_cast<std::size_t>(k)])
                        conn += affinity[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                if (conn > best_conn) {
                    best_conn = conn;
                    pick = i;
                }
            }
            std::vector<std::pair<long, int>> scored;
            for (int cell = 0; cell < ncols * nrows; ++cell) {
                if (cell_used[static_cast<std::size_t>(cell)]) continue;
                long score = 0;
                for (int k = 0; k < n; ++k) {
                    int a = affinity[static_cast<std::size_t>(pick)][static_cast<std::size_t>(k)];
                    if (!placed[static_cast<std::size_t>(k)] || !a) continue;
                    int ox = cell_of[static_cast<std::size_t>(k)] % ncols;
                    int oy = cell_of[static_cast<std::size_t>(k)] / ncols;
                    score += static_cast<long>(a) *
                             (std::abs(cell % ncols - ox) + std::abs(cell / ncols - oy));
                }
                scored.push_back({score, cell});
            }
            std::sort(scored.begin(), scored.end());
            std::size_t span = std::min<std::size_t>(scored.size(), 3);
            int cell = scored[rng.below(span)].second;
            cell_of[static_cast<std::size_t>(pick)] = cell;
            cell_used[static_cast<std::size_t>(cell)] = 1;
            placed[static_cast<std::size_t>(pick)] = 1;
        }
    }

    // Hill climbing on total net half-perimeter: move components into
    // empty cells or swap pairs while that shortens the nets. Short nets
    // route locally and do not wall off the grid.
    {
        std::vector<std::vector<int>> nets_of(static_cast<std::size_t>(n));
        for (std::size_t ni = 0; ni < net_list.nets.size(); ++ni)
            for (const auto& m : net_list.nets[ni].members)
                nets_of[static_cast<std::size_t>(comp_index.at(m.component_id))].push_back(
                    static_cast<int>(ni));
        auto hpwl = [&](int ni) {
            const Net& net = net_list.nets[static_cast<std::size_t>(ni)];
            if (net.members.size() < 2) return 0;
            int x0 = 1 << 30, y0 = 1 << 30, x1 = -(1 << 30), y1 = -(1 << 30);
            for (const auto& m : net.members) {
                int cell = cell_of[static_cast<std::size_t>(comp_index.at(m.component_id))];
                x0 = std::min(x0, cell % ncols);
                x1 = std::max(x1, cell % ncols);
                y0 = std::min(y0, cell / ncols);
                y1 = std::max(y1, cell / ncols);
            }
            return (x1 - x0) + (y1 - y0);
        };
        auto cost_around = [&](int i, int j) {
            std::set<int> nets;
            nets.insert(nets_of[static_cast<std::size_t>(i)].begin(),
                        nets_of[static_cast<std::size_t>(i)].end());
            if (j >= 0)
                nets.insert(nets_of[static_cast<std::size_t>(j)].begin(),
                            nets_of[static_cast<std::size_t>(j)].end());
            int total = 0;
            for (int ni : nets) total += hpwl(ni);
            return total;
        };
        std::vector<int> comp_at(static_cast<std::size_t>(ncols) * nrows, -1);
        for (int i = 0; i < n; ++i) comp_at[static_cast<std::size_t>(cell_of[static_cast<std::size_t>(i)])] = i;
        for (int pass = 0; pass < 8; ++pass) {
            bool improved = false;
            for (int i = 0; i < n; ++i) {
                for (int cell = 0; cell < ncols * nrows; ++cell) {
                    int old_cell = cell_of[static_cast<std::size_t>(i)];
                    if (cell == old_cell) continue;
                    int j = comp_at[static_cast<std::size_t>(cell)];
                    int before = cost_around(i, j);
                    cell_of[static_cast<std::size_t>(i)] = cell;
                    if (j >= 0) cell_of[static_cast<std::size_t>(j)] = old_cell;
                    int after = cost_around(i, j);
                    if (after < before) {
                        comp_at[static_cast<std::size_t>(cell)] = i;
                        comp_at[static_cast<std::size_t>(old_cell)] = j < 0 ? -1 : j;
                        if (j >= 0) comp_at[static_cast<std::size_t>(old_cell)] = j;
                        improved = true;
                    } else {
                        cell_of[static_cast<std::size_t>(i)] = old_cell;
                        if (j >= 0) cell_of[static_cast<std::size_t>(j)] = cell;
                    }
                }
            }
            if (!improved) break;
        }
    }

    std::map<std::pair<std::string, std::string>, int> net_of_term;
    for (std::size_t ni = 0; ni < net_list.nets.size(); ++ni)
        for (const auto& m : net_list.nets[ni].members)
            net_of_term[{m.component_id, m.role}] = static_cast<int>(ni);

    // Orientations face pins toward their net mates, the way a human
    // would draw the symbol; a seeded pick between the two best keeps
    // symbol variety across the corpus.
    std::vector<Orientation> orientations;
    for (int i = 0; i < n; ++i) {
        const Component& comp = net_list.components[static_cast<std::size_t>(i)];
        int cx = cell_of[static_cast<std::size_t>(i)] % ncols;
        int cy = cell_of[static_cast<std::size_t>(i)] / ncols;
        std::vector<std::pair<double, int>> scored;
        for (int oi = 0; oi < 8; ++oi) {
            auto o = static_cast<Orientation>(oi);
            double score = 0.0;
            for (const auto& win : pin_windows(comp.category, o)) {
                auto it = net_of_term.find({comp.id, win.role});
                if (it == net_of_term.end()) continue;
                const Net& net = net_list.nets[static_cast<std::size_t>(it->second)];
                double sx = 0, sy = 0;
                int count = 0;
                for (const auto& m : net.members) {
                    if (m.component_id == comp.id) continue;
                    int k = comp_index.at(m.component_id);
                    sx += cell_of[static_cast<std::size_t>(k)] % ncols - cx;
                    sy += cell_of[static_cast<std::size_t>(k)] / ncols - cy;
                    ++count;
                }
                if (count == 0) continue;
                double len = std::hypot(sx, sy);
                if (len < 1e-9) continue;
                double rad = win.angle_deg * 3.14159265358979323846 / 180.0;
                // Pin direction in image coordinates (y grows downward).
                score += (std::cos(rad) * sx / len) + (-std::sin(rad) * sy / len);
            }
            scored.push_back({-score, oi});
        }
        std::sort(scored.begin(), scored.end());
        orientations.push_back(static_cast<Orientation>(
            scored[rng.below(std::min<std::size_t>(scored.size(), 2))].second));
    }

    // Refinement sweeps: with every other symbol's tentative orientation
    // known, re-pick each orientation so pins face the actual stem spots
    // of their net mates. Greatly reduces wrap-around arcs between
    // neighbours tied by several nets.
    auto stem_offset = [&](ComponentCategory cat, Orientation o, const std::string& role,
                           int& sx, int& sy) {
        for (const auto& win : pin_windows(cat, o)) {
            if (win.role != role) continue;
            switch (static_cast<int>(std::lround(win.angle_deg)) % 360) {
                case 90: sx = 1; sy = -1; return;
                case 0: sx = 3; sy = 1; return;
                case 270: sx = 1; sy = 3; return;
                case 180: sx = -1; sy = 1; return;
            }
        }
        sx = 1;
        sy = 1;
    };
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (int i = 0; i < n; ++i) {
            const Component& comp = net_list.components[static_cast<std::size_t>(i)];
            int bx0 = 9 * (cell_of[static_cast<std::size_t>(i)] % ncols) + 4;
            int by0 = 9 * (cell_of[static_cast<std::size_t>(i)] / ncols) + 4;
            double best = -1e18;
            Orientation best_o = orientations[static_cast<std::size_t>(i)];
            for (int oi = 0; oi < 8; ++oi) {
                auto o = static_cast<Orientation>(oi);
                double score = oi == static_cast<int>(orientations[static_cast<std::size_t>(i)])
                                   ? 0.1
                                   : 0.0;  // mild stickiness for determinism
                for (const auto& win : pin_windows(comp.category, o)) {
                    auto it = net_of_term.find({comp.id, win.role});
                    if (it == net_of_term.end()) continue;
                    int sx, sy;
                    stem_offset(comp.category, o, win.role, sx, sy);
                    double px0 = bx0 + sx, py0 = by0 + sy;
                    const Net& net = net_list.nets[static_cast<std::size_t>(it->second)];
                    for (const auto& m : net.members) {
                        if (m.component_id == comp.id) continue;
                        int k = comp_index.at(m.component_id);
                        int obx = 9 * (cell_of[static_cast<std::size_t>(k)] % ncols) + 4;
                        int oby = 9 * (cell_of[static_cast<std::size_t>(k)] / ncols) + 4;
                        int ox, oy;
                        stem_offset(net_list.components[static_cast<std::size_t>(k)].category,
                                    orientations[static_cast<std::size_t>(k)], m.role, ox, oy);
                        score -= std::abs(px0 - (obx + ox)) + std::abs(py0 - (oby + oy));
                    }
                }
                if (score > best) {
                    best = score;
                    best_o = o;
                }
            }
            orientations[static_cast<std::size_t>(i)] = best_o;
        }
    }

    for (int i = 0; i < n; ++i) {
        const Component& comp = net_list.components[static_cast<std::size_t>(i)];
        int bx = 9 * (cell_of[static_cast<std::size_t>(i)] % ncols) + 4;
        int by = 9 * (cell_of[static_cast<std::size_t>(i)] / ncols) + 4;
        for (int gy = by; gy <= by + 2; ++gy)
            for (int gx = bx; gx <= bx + 2; ++gx) at(gx, gy).box = true;

        ComponentBox box;
        box.id = comp.id;
        box.category = comp.category;
        box.orientation = orientations[static_cast<std::size_t>(i)];
        box.x0 = px(bx);
        box.y0 = px(by);
        box.x1 = px(bx + 2) + 1;
        box.y1 = px(by + 2) + 1;
        comp_boxes.push_back(box);

        for (const auto& win : pin_windows(comp.category, box.orientation)) {
            int angle = static_cast<int>(std::lround(win.angle_deg)) % 360;
            PinSpot pin;
            pin.comp = i;
            pin.role = win.role;
            auto it = net_of_term.find({comp.id, win.role});
            if (it == net_of_term.end())
                throw InvalidInput("render: terminal " + comp.id + "." + win.role +
                                   " is bound to no net");
            pin.net = it->second;
            switch (angle) {
                case 90: pin.gx = bx + 1; pin.gy = by - 1; pin.outward = 0; break;
                case 0: pin.gx = bx + 3; pin.gy = by + 1; pin.outward = 1; break;
                case 270: pin.gx = bx + 1; pin.gy = by + 3; pin.outward = 2; break;
                case 180: pin.gx = bx - 1; pin.gy = by + 1; pin.outward = 3; break;
                default: throw InvalidInput("render: pin angle not axis-aligned");
            }
            pins.push_back(pin);
        }
    }

    // Split big rail nets into per-connection pieces, each capped by its
    // own rail symbol, the way printed schematics scatter ground and
    // supply markers. Extraction later reunites the pieces by name, and
    // every piece is a short local wire instead of one page-wide net.
    // Omission corpora keep rails whole so multi-way meets still exist.
    dnets.clear();
    rail_boxes.clear();
    int synth_comp_id = static_cast<int>(net_list.components.size());
    int rail_counter = 0;
    const std::size_t real_pin_count = pins.size();
    std::vector<int> orig_net(real_pin_count);
    for (std::size_t pi = 0; pi < real_pin_count; ++pi) orig_net[pi] = pins[pi].net;
    for (std::size_t ni = 0; ni < net_list.nets.size(); ++ni) {
        const Net& net = net_list.nets[ni];
        std::vector<int> net_pin_ids;
        for (std::size_t pi = 0; pi < real_pin_count; ++pi)
            if (orig_net[pi] == static_cast<int>(ni)) net_pin_ids.push_back(static_cast<int>(pi));

        bool is_rail = net.name == "0" || net.name == "VDD";
        bool split = is_rail && net_pin_ids.size() >= 3 &&
                     cfg.omit_junction_probability == 0.0;
        if (!split) {
            DrawNet dn;
            dn.name = net.name;
            dn.pin_ids = net_pin_ids;
            dn.stub = net.members.size() == 1;
            for (int pid : net_pin_ids) pins[static_cast<std::size_t>(pid)].net =
                static_cast<int>(dnets.size());
            dnets.push_back(std::move(dn));
            continue;
        }

        ComponentCategory rail_cat =
            net.name == "0" ? ComponentCategory::Gnd : ComponentCategory::Vdd;
        std::vector<int> base;  // pins staying on the original piece
        bool base_has_rail = false;
        int peeled = 0;
        for (int pid : net_pin_ids) {
            PinSpot& pin = pins[static_cast<std::size_t>(pid)];
            bool pin_is_rail =
                net_list.components[static_cast<std::size_t>(pin.comp)].category == rail_cat;
            if (pin_is_rail) {
                base.push_back(pid);
                base_has_rail = true;
                continue;
            }
            // Peel all but one non-rail pin, keeping one wire to the
            // original symbol so it stays connected.
            if (!base_has_rail && base.empty()) {
                base.push_back(pid);
                continue;
            }
            // Tiny synthetic rail symbol two lanes out from the pin: one
            // grid node, so it costs no channel capacity.
            int cx = pin.gx + 2 * kDx[pin.outward];
            int cy = pin.gy + 2 * kDy[pin.outward];
            int sx = cx - kDx[pin.outward], sy = cy - kDy[pin.outward];
            bool fits = in_grid(cx, cy) && !at(cx, cy).box && at(cx, cy).net == -1 &&
                        at(sx, sy).net == -1 && !at(sx, sy).box;
            if (fits)
                for (const auto& other : pins)
                    if (std::abs(other.gx - cx) <= 1 && std::abs(other.gy - cy) <= 1) {
                        fits = false;
                        break;
                    }
            if (!fits) {
                base.push_back(pid);
                continue;
            }

            at(cx, cy).box = true;
            ComponentBox rb;
            rb.id = (rail_cat == ComponentCategory::Gnd ? "xg" : "xu") +
                    std::to_string(++rail_counter);
            rb.category = rail_cat;
            // Point the symbol's stem side back at the wire it caps.
            int want = (static_cast<int>(std::lround(
                            pin_windows(rail_cat, Orientation::R0)[0].angle_deg)) /
                        90) % 4;  // direction index of the R0 stem
            static const int kAngleDir[4] = {1, 0, 3, 2};  // 0,90,180,270 -> E,N,W,S
            int have = kAngleDir[want];
            int need = opposite(pin.outward);
            int turns = 0;
            while (have != need && turns < 4) {
                have = (have + 3) % 4;  // rotating left takes N->W->S->E
                ++turns;
            }
            rb.orientation = static_cast<Orientation>(turns % 4);
            rb.x0 = px(cx) - 5;
            rb.y0 = px(cy) - 5;
            rb.x1 = px(cx) + 6;
            rb.y1 = px(cy) + 6;
            rail_boxes.push_back(rb);

            PinSpot rail_pin;
            rail_pin.comp = synth_comp_id++;
            rail_pin.role = "t1";
            rail_pin.gx = sx;
            rail_pin.gy = sy;
            rail_pin.outward = opposite(pin.outward);
            rail_pin.net = static_cast<int>(dnets.size());
            pins.push_back(rail_pin);

            DrawNet piece;
            piece.name = net.name;
            piece.pin_ids = {pid, static_cast<int>(pins.size()) - 1};
            pins[static_cast<std::size_t>(pid)].net = static_cast<int>(dnets.size());
            dnets.push_back(std::move(piece));
            ++peeled;
        }
        DrawNet dn;
        dn.name = net.name;
        dn.pin_ids = base;
        for (int pid : base) pins[static_cast<std::size_t>(pid)].net =
            static_cast<int>(dnets.size());
        dnets.push_back(std::move(dn));
        (void)peeled;
    }

    // Claim every stem node up front so no other net can occupy or cross
    // an unrouted pin approach.
    for (const auto& pin : pins) {
        NodeState& node = at(pin.gx, pin.gy);
        if (node.box || node.net != -1) return false;
        node.net = pin.net;
        node.edges = dbit(opposite(pin.outward));
    }

    // The probability steers how often wires cross; a net that draws a
    // "no" coin may still cross on late retry attempts, because some
    // drawings only close when a structurally necessary crossing exists.
    allow_cross.assign(dnets.size(), 0);
    bool escalate = attempt >= kPlacementRetries / 2 && cfg.crossing_probability > 0.0;
    for (std::size_t ni = 0; ni < dnets.size(); ++ni) {
        bool allow = rng.chance(cfg.crossing_probability) || escalate;
        if (dnets[ni].stub) allow = false;  // stubs never cross
        allow_cross[ni] = allow ? 1 : 0;
    }
    recompute_regions();
    return true;
}

// Rebuilds the region view of the current drawing: wire nodes connect
// along their edges, drawn dot nodes split their net but tag the
// neighbouring pieces, crossings fuse the two regions that meet, and pin
// stems tag their region with the pin's component.
void Router::recompute_regions() {
    const int nodes = GX * GY;
    regions.parent.resize(static_cast<std::size_t>(nodes));
    std::iota(regions.parent.begin(), regions.parent.end(), 0);
    regions.comps.assign(static_cast<std::size_t>(nodes), {});

    auto nid = [&](int gx, int gy) { return gy * GX + gx; };
    for (int gy = 0; gy < GY; ++gy) {
        for (int gx = 0; gx < GX; ++gx) {
            const NodeState& node = at(gx, gy);
            if (node.net == -1 || node.dot) continue;
            // Owner's edges, and the crossing net's edges, all join here.
            std::uint8_t mask = node.edges | node.cross_edges;
            for (int d = 0; d < 4; ++d) {
                if (!(mask & dbit(d))) continue;
                int tx = gx + kDx[d], ty = gy + kDy[d];
                if (!in_grid(tx, ty)) continue;
                const NodeState& to = at(tx, ty);
                if (to.net == -1) continue;
                if (to.dot) continue;  // drawn dots split the wire
                regions.unite(nid(gx, gy), nid(tx, ty));
            }
        }
    }
    int dot_id = 1000000;
    for (const auto& d : dots) {
        ++dot_id;
        if (at(d.gx, d.gy).dot == false && !d.omitted) continue;  // ripped leftover (none expected)
        if (d.omitted) continue;  // no dot drawn: pieces stay merged
        for (int dir = 0; dir < 4; ++dir) {
            int tx = d.gx + kDx[dir], ty = d.gy + kDy[dir];
            if (!in_grid(tx, ty)) continue;
            if (at(tx, ty).net == -1) continue;
            if (at(d.gx, d.gy).edges & dbit(dir))
                regions.comps[static_cast<std::size_t>(regions.find(nid(tx, ty)))].insert(dot_id);
        }
    }
    for (const auto& pin : pins) {
        const NodeState& node = at(pin.gx, pin.gy);
        if (node.net != pin.net) continue;
        regions.comps[static_cast<std::size_t>(regions.find(nid(pin.gx, pin.gy)))].insert(
            pin.comp);
    }
}

bool Router::dijkstra(const PinSpot& pin, int net_index, int ignore_a, int ignore_b,
                      const std::set<std::pair<int, int>>& banned,
                      std::vector<std::pair<int, int>>& path, std::vector<int>& path_dirs) {
    constexpr int kInf = 1 << 28;
    const bool allow = allow_cross[static_cast<std::size_t>(net_index)] != 0;
    const int states = GX * GY * 4;
    std::vector<int> dist(static_cast<std::size_t>(states), kInf);
    std::vector<int> parent(static_cast<std::size_t>(states), -1);
    auto sid = [&](int gx, int gy, int d) { return (gy * GX + gx) * 4 + d; };

    // Effective node view with `ignore_net` ripped out: its plain nodes
    // read as free and its crossing nodes fall back to the other net.
    struct View {
        int net;
        std::uint8_t edges;
        int cross_net;
    };
    auto ignored = [&](int net) { return net != -1 && (net == ignore_a || net == ignore_b); };
    auto view = [&](const NodeState& ns) -> View {
        if (ignore_a == -1 && ignore_b == -1) return {ns.net, ns.edges, ns.cross_net};
        if (ignored(ns.net))
            return ignored(ns.cross_net) || ns.cross_net == -1
                       ? View{-1, 0, -1}
                       : View{ns.cross_net, ns.cross_edges, -1};
        if (ignored(ns.cross_net)) return {ns.net, ns.edges, -1};
        return {ns.net, ns.edges, ns.cross_net};
    };

    using QE = std::pair<int, int>;  // (cost, state)
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
    int start = sid(pin.gx, pin.gy, pin.outward);
    dist[static_cast<std::size_t>(start)] = 0;
    pq.push({0, start});

    struct Arrival {
        int cost = 1 << 29;
        int gx = 0, gy = 0, dir = 0, from_state = -1;
    } best;

    while (!pq.empty()) {
        auto [cost, state] = pq.top();
        pq.pop();
        if (cost != dist[static_cast<std::size_t>(state)]) continue;
        if (cost >= best.cost) break;  // later arrivals can only be worse
        int d = state % 4;
        int gx = (state / 4) % GX;
        int gy = state / 4 / GX;
        View here = view(at(gx, gy));
        bool here_foreign = here.net != -1 && here.net != net_index;

        for (int nd = 0; nd < 4; ++nd) {
            if (here_foreign && nd != d) continue;  // straight through crossings
            if (!here_foreign && nd == opposite(d)) continue;
            int tx = gx + kDx[nd], ty = gy + kDy[nd];
            if (!in_grid(tx, ty)) continue;
            const NodeState& raw = at(tx, ty);
            if (raw.box) continue;
            View to = view(raw);
            int step = 4 + (nd != d ? 3 : 0);

            if (to.net == net_index) {
                // Join candidate: a connected tree node, not a crossing,
                // with at most two incident edges so far.
                if (!is_routed(tx, ty) || to.cross_net != -1 || raw.dot ||
                    popcount8(to.edges) > 2)
                    continue;
                int total = cost + step;
                if (total < best.cost ||
                    (total == best.cost &&
                     std::tie(ty, tx, nd) < std::tie(best.gy, best.gx, best.dir))) {
                    best = {total, tx, ty, nd, state};
                }
                continue;
            }
            int next_cost;
            if (to.net == -1) {
                next_cost = cost + step;
            } else {
                // Foreign wire: pass straight through, perpendicular, and
                // only when the crossing keeps the region forest clean.
                extern thread_local long xrej_coin, xrej_taken, xrej_bend, xrej_clash;
                if (!allow) { ++xrej_coin; continue; }
                if (to.cross_net != -1 || raw.dot) { ++xrej_taken; continue; }
                if (!straight_mask(to.edges)) { ++xrej_bend; continue; }
                bool to_vertical = vertical_mask(to.edges);
                bool move_vertical = (nd == 0 || nd == 2);
                if (to_vertical == move_vertical) continue;
                if (banned.count({tx, ty})) continue;
                // The crossed region must not already reach this pin's
                // component; the full path check runs before commit.
                if (!getenv("SCHEX_FREECROSS") && regions.comps_of(ty * GX + tx).count(pin.comp)) { ++xrej_clash; continue; }
                // At probability 1 crossings are free so routes stop
                // detouring around each other.
                next_cost = cost + step + (cfg.crossing_probability >= 1.0 ? 0 : 9);
            }
            int ns = sid(tx, ty, nd);
            if (next_cost < dist[static_cast<std::size_t>(ns)]) {
                dist[static_cast<std::size_t>(ns)] = next_cost;
                parent[static_cast<std::size_t>(ns)] = state;
                pq.push({next_cost, ns});
            }
        }
    }

    if (best.from_state == -1) return false;
    std::vector<std::pair<int, int>> rev{{best.gx, best.gy}};
    std::vector<int> rev_dirs{best.dir};
    int state = best.from_state;
    while (state != -1) {
        rev.push_back({(state / 4) % GX, state / 4 / GX});
        rev_dirs.push_back(state % 4);
        state = parent[static_cast<std::size_t>(state)];
    }
    path.assign(rev.rbegin(), rev.rend());
    path_dirs.assign(rev_dirs.rbegin(), rev_dirs.rend());
    return true;
}

void Router::commit(int net_index, const std::vector<std::pair<int, int>>& path,
                    const std::vector<int>& path_dirs,
                    std::vector<std::pair<int, int>>& tree_nodes) {
    auto record = [&](int gx, int gy, int bit_dir) {
        NodeState& node = at(gx, gy);
        if (node.net == -1) {
            node.net = net_index;
            node.edges = dbit(bit_dir);
        } else if (node.net == net_index) {
            node.edges |= dbit(bit_dir);
        } else {
            if (node.cross_net == -1) {
                node.cross_net = net_index;
                crossings.push_back({gx, gy, node.net, net_index});
            }
            node.cross_edges |= dbit(bit_dir);
        }
    };

    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto [ax, ay] = path[i];
        auto [bx, by] = path[i + 1];
        int nd = path_dirs[i + 1];
        record(ax, ay, nd);
        record(bx, by, opposite(nd));
        auto key = std::make_pair(std::min(ax, bx), std::min(ay, by));
        (nd % 2 == 1 ? h_edges : v_edges)[key] = net_index;
        if (at(ax, ay).net == net_index && !is_routed(ax, ay)) {
            mark_routed(ax, ay);
            tree_nodes.push_back({ax, ay});
        }
        if (at(bx, by).net == net_index && !is_routed(bx, by)) {
            mark_routed(bx, by);
            tree_nodes.push_back({bx, by});
        }
    }

    auto [jx, jy] = path.back();
    NodeState& join = at(jx, jy);
    if (join.net == net_index && popcount8(join.edges) == 3) {
        DotSite site;
        site.net = net_index;
        site.gx = jx;
        site.gy = jy;
        site.omitted = rng.chance(cfg.omit_junction_probability);
        dots.push_back(site);
        if (!site.omitted) join.dot = true;
    }
    recompute_regions();
}

void Router::rip_net(int net_index) {
    for (int gy = 0; gy < GY; ++gy) {
        for (int gx = 0; gx < GX; ++gx) {
            NodeState& node = at(gx, gy);
            if (node.net == net_index) {
                if (node.cross_net != -1) {
                    // The other net keeps the node; no longer a crossing.
                    node.net = node.cross_net;
                    node.edges = node.cross_edges;
                    node.cross_net = -1;
                    node.cross_edges = 0;
                    mark_routed(gx, gy);
                } else {
                    node = NodeState{};
                    routed[static_cast<std::size_t>(gy) * GX + gx] = 0;
                }
                continue;
            }
            if (node.cross_net == net_index) {
                node.cross_net = -1;
                node.cross_edges = 0;
            }
        }
    }
    for (auto it = h_edges.begin(); it != h_edges.end();)
        it = it->second == net_index ? h_edges.erase(it) : std::next(it);
    for (auto it = v_edges.begin(); it != v_edges.end();)
        it = it->second == net_index ? v_edges.erase(it) : std::next(it);
    for (auto it = crossings.begin(); it != crossings.end();)
        it = (it->net_a == net_index || it->net_b == net_index) ? crossings.erase(it)
                                                                : std::next(it);
    std::vector<DotSite> kept;
    for (const auto& d : dots)
        if (d.net != net_index) kept.push_back(d);
    dots = std::move(kept);

    // Restore the ripped net's pin stems.
    for (const auto& pin : pins) {
        if (pin.net != net_index) continue;
        NodeState& node = at(pin.gx, pin.gy);
        node.net = net_index;
        node.edges = dbit(opposite(pin.outward));
        routed[static_cast<std::size_t>(pin.gy) * GX + pin.gx] = 0;
    }
    recompute_regions();
}

bool Router::route_pin(const PinSpot& pin, int net_index, bool may_rip, int protected_net,
                       std::vector<std::pair<int, int>>& tree_nodes) {
    std::set<std::pair<int, int>> banned;
    for (int retry = 0; retry < 8; ++retry) {
        std::vector<std::pair<int, int>> path;
        std::vector<int> dirs;
        if (!dijkstra(pin, net_index, -1, -1, banned, path, dirs)) break;

        // Simulate the region this path will create: the pin's component,
        // plus either a fresh junction dot at the join or the joined tree
        // region, plus every region the path crosses. Each crossed region
        // must be new and component-disjoint or extraction could not undo
        // the crossings; ban the first offender and search again.
        auto [jx, jy] = path.back();
        std::set<int> merged_comps{pin.comp};
        std::set<int> merged_roots{regions.find(pin.gy * GX + pin.gx)};
        const NodeState& join = at(jx, jy);
        bool join_makes_dot = popcount8(join.edges) == 2;
        if (!join_makes_dot) {
            const auto& jc = regions.comps_of(jy * GX + jx);
            merged_comps.insert(jc.begin(), jc.end());
            merged_roots.insert(regions.find(jy * GX + jx));
        }
        std::pair<int, int> offender{-1, -1};
        for (std::size_t i = 1; i + 1 < path.size(); ++i) {
            const auto& node = path[i];
            const NodeState& ns = at(node.first, node.second);
            if (ns.net == -1 || ns.net == net_index || ns.cross_net != -1) continue;
            int root = regions.find(node.second * GX + node.first);
            const auto& rc = regions.comps[static_cast<std::size_t>(root)];
            bool clash = merged_roots.count(root) != 0;
            for (int c : rc)
                if (!clash && merged_comps.count(c)) clash = true;
            if (clash && !getenv("SCHEX_FREECROSS")) {
                offender = node;
                break;
            }
            merged_roots.insert(root);
            merged_comps.insert(rc.begin(), rc.end());
        }
        if (offender.first != -1) {
            banned.insert(offender);
            continue;
        }
        commit(net_index, path, dirs, tree_nodes);
        return true;
    }

    if (getenv("SCHEX_DBG")) {
        fprintf(stderr, "route stuck: net %d (%s) pin comp%d.%s at (%d,%d) allow=%d rip=%d\n",
                net_index, dnets[static_cast<std::size_t>(net_index)].name.c_str(), pin.comp,
                pin.role.c_str(), pin.gx, pin.gy,
                (int)allow_cross[static_cast<std::size_t>(net_index)], (int)may_rip);
        for (int gy = 0; gy < GY; ++gy) {
            std::string line;
            for (int gx = 0; gx < GX; ++gx) {
                const NodeState& ns = at(gx, gy);
                char ch = '.';
                if (ns.box) ch = '#';
                else if (gx == pin.gx && gy == pin.gy) ch = 'S';
                else if (ns.net == net_index) ch = is_routed(gx, gy) ? 'T' : 't';
                else if (ns.dot) ch = 'O';
                else if (ns.cross_net == net_index) ch = 'Y';
                else if (ns.cross_net != -1) ch = 'X';
                else if (ns.net != -1) {
                    static const char* alphabet = "abcdefghijklmnpqruvwz";
                    ch = alphabet[ns.net % 21];
                }
                line += ch;
            }
            fprintf(stderr, "%2d %s\n", gy, line.c_str());
        }
    }
    if (!may_rip || rip_budget <= 0) return false;
    // Rip-up and reroute: tear out one routed net (or a nested pair)
    // whose removal unblocks this pin, route the pin, then reroute the
    // victims around it. Failed trials roll back so every candidate gets
    // a clean chance.
    // Candidate victims: nets with wire within a window of the stuck pin,
    // nearest wall first.
    std::map<int, int> near_dist;
    auto note = [&](int gx, int gy, int net) {
        int d = std::abs(gx - pin.gx) + std::abs(gy - pin.gy);
        if (d > 14) return;
        auto [it, inserted] = near_dist.insert({net, d});
        if (!inserted) it->second = std::min(it->second, d);
    };
    for (const auto& [key, net] : h_edges) note(key.first, key.second, net);
    for (const auto& [key, net] : v_edges) note(key.first, key.second, net);
    std::vector<int> present;
    for (const auto& [net, d] : near_dist)
        if (net != net_index && net != protected_net) present.push_back(net);
    std::sort(present.begin(), present.end(),
              [&](int a, int b) { return near_dist[a] != near_dist[b] ? near_dist[a] < near_dist[b] : a < b; });
    auto try_rip = [&](int v1, int v2) {
        std::vector<std::pair<int, int>> path;
        std::vector<int> dirs;
        if (!dijkstra(pin, net_index, v1, v2, {}, path, dirs)) return false;
        Snapshot saved = snapshot();
        auto saved_tree = tree_nodes;
        --rip_budget;
        rip_net(v1);
        if (v2 != -1) rip_net(v2);
        bool ok = route_pin(pin, net_index, false, protected_net, tree_nodes) &&
                  route_net(v1, true, net_index) &&
                  (v2 == -1 || route_net(v2, true, net_index));
        if (ok) return true;
        restore(saved);
        tree_nodes = saved_tree;
        return false;
    };
    for (int v : present)
        if (try_rip(v, -1)) return true;
    if (rip_budget > 1) {
        for (std::size_t a = 0; a < present.size(); ++a)
            for (std::size_t b = a + 1; b < present.size(); ++b)
                if (try_rip(present[a], present[b])) return true;
    }
    return false;
}

bool Router::route_net(int net_index, bool may_rip, int protected_net) {
    const DrawNet& net = dnets[static_cast<std::size_t>(net_index)];
    std::vector<const PinSpot*> net_pins;
    for (int pid : net.pin_ids) net_pins.push_back(&pins[static_cast<std::size_t>(pid)]);

    if (net_pins.empty()) return true;
    if (net.stub) {
        // Dangling stub: the stem plus one lane outward when free.
        const PinSpot& pin = *net_pins[0];
        mark_routed(pin.gx, pin.gy);
        int tx = pin.gx + kDx[pin.outward], ty = pin.gy + kDy[pin.outward];
        if (in_grid(tx, ty) && !at(tx, ty).box && at(tx, ty).net == -1) {
            at(tx, ty).net = net_index;
            at(tx, ty).edges = dbit(opposite(pin.outward));
            at(pin.gx, pin.gy).edges |= dbit(pin.outward);
            mark_routed(tx, ty);
            auto key = std::make_pair(std::min(pin.gx, tx), std::min(pin.gy, ty));
            (pin.outward % 2 == 1 ? h_edges : v_edges)[key] = net_index;
        }
        return true;
    }

    // Grow from the top-left pin, always attaching the pin nearest the
    // current tree: compact trees wall off less space.
    std::sort(net_pins.begin(), net_pins.end(), [](const PinSpot* a, const PinSpot* b) {
        return std::tie(a->gy, a->gx) < std::tie(b->gy, b->gx);
    });
    mark_routed(net_pins[0]->gx, net_pins[0]->gy);
    std::vector<std::pair<int, int>> tree_nodes{{net_pins[0]->gx, net_pins[0]->gy}};
    std::vector<std::uint8_t> attached(net_pins.size(), 0);
    attached[0] = 1;
    for (std::size_t round = 1; round < net_pins.size(); ++round) {
        std::size_t pick = 0;
        int best_dist = 1 << 30;
        for (std::size_t pi = 0; pi < net_pins.size(); ++pi) {
            if (attached[pi]) continue;
            int d = 1 << 30;
            for (const auto& [tx, ty] : tree_nodes)
                d = std::min(d,
                             std::abs(net_pins[pi]->gx - tx) + std::abs(net_pins[pi]->gy - ty));
            if (d < best_dist) {
                best_dist = d;
                pick = pi;
            }
        }
        attached[pick] = 1;
        if (!route_pin(*net_pins[pick], net_index, may_rip, protected_net, tree_nodes))
            return false;
    }
    return true;
}

bool Router::route_all() {
    // Small, local nets first: they take direct paths and leave straight
    // runs that bigger nets may later cross where that is allowed.
    std::vector<std::array<int, 4>> extent(dnets.size(),
                                           {1 << 30, 1 << 30, -(1 << 30), -(1 << 30)});
    for (const auto& pin : pins) {
        auto& e = extent[static_cast<std::size_t>(pin.net)];
        e[0] = std::min(e[0], pin.gx);
        e[1] = std::min(e[1], pin.gy);
        e[2] = std::max(e[2], pin.gx);
        e[3] = std::max(e[3], pin.gy);
    }
    std::vector<int> order(dnets.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& na = dnets[static_cast<std::size_t>(a)];
        const auto& nb = dnets[static_cast<std::size_t>(b)];
        if (na.pin_ids.size() != nb.pin_ids.size())
            return na.pin_ids.size() < nb.pin_ids.size();
        const auto& ea = extent[static_cast<std::size_t>(a)];
        const auto& eb = extent[static_cast<std::size_t>(b)];
        int pa = (ea[2] - ea[0]) + (ea[3] - ea[1]);
        int pb = (eb[2] - eb[0]) + (eb[3] - eb[1]);
        if (pa != pb) return pa < pb;
        if (na.name != nb.name) return na.name < nb.name;
        return a < b;
    });

    // One placement gets several tries; whenever an order fails, the net
    // that got stuck routes first on the next try so it claims resources
    // before its blockers exist.
    for (int trial = 0; trial < 6; ++trial) {
        if (trial > 0) {
            // Clear all wires but keep placement, orientations and coins.
            for (auto& node : grid) {
                if (node.box) continue;
                node = NodeState{};
            }
            std::fill(routed.begin(), routed.end(), 0);
            h_edges.clear();
            v_edges.clear();
            dots.clear();
            crossings.clear();
            for (const auto& pin : pins) {
                NodeState& node = at(pin.gx, pin.gy);
                node.net = pin.net;
                node.edges = dbit(opposite(pin.outward));
            }
            recompute_regions();
        }
        rip_budget = 24;
        int failed_net = -1;
        int routed_count = 0;
        for (int ni : order) {
            if (!route_net(ni, true)) {
                failed_net = ni;
                break;
            }
            ++routed_count;
        }
        if (getenv("SCHEX_DBG2"))
            fprintf(stderr, "trial %d: routed %d/%zu nets%s\n", trial, routed_count,
                    order.size(), failed_net == -1 ? " ALL" : "");
        if (failed_net == -1) return true;
        auto it = std::find(order.begin(), order.end(), failed_net);
        order.erase(it);
        order.insert(order.begin(), failed_net);
    }
    return false;
}

void draw_hline(GrayImage& img, int y, int x0, int x1, int w) {
    int lo = -(w / 2), hi = (w - 1) / 2;
    if (x0 > x1) std::swap(x0, x1);
    for (int dy = lo; dy <= hi; ++dy)
        for (int x = x0; x <= x1; ++x)
            img.samples[static_cast<std::size_t>(y + dy) * img.width + x] = 0;
}

void draw_vline(GrayImage& img, int x, int y0, int y1, int w) {
    int lo = -(w / 2), hi = (w - 1) / 2;
    if (y0 > y1) std::swap(y0, y1);
    for (int dx = lo; dx <= hi; ++dx)
        for (int y = y0; y <= y1; ++y)
            img.samples[static_cast<std::size_t>(y) * img.width + x + dx] = 0;
}

}  // namespace

RenderResult render(const SynthConfig& cfg, const Netlist& n, const std::string& image_name) {
    validate_config(cfg);
    if (n.components.empty()) throw InvalidInput("render: empty netlist");
    std::set<std::string> ids;
    std::map<std::string, const Component*> comp_of;
    for (const auto& c : n.components) {
        if (c.category == ComponentCategory::Junction)
            throw InvalidInput("render: junctions are created by the renderer, not placed");
        if (!ids.insert(c.id).second)
            throw InvalidInput("render: duplicate component id \"" + c.id + "\"");
        comp_of[c.id] = &c;
    }
    std::set<std::pair<std::string, std::string>> seen_terms;
    for (const auto& net : n.nets) {
        std::set<std::string> comps_in_net;
        for (const auto& m : net.members) {
            if (!comp_of.count(m.component_id))
                throw InvalidInput("render: net \"" + net.name + "\" references unknown \"" +
                                   m.component_id + "\"");
            if (!comps_in_net.insert(m.component_id).second)
                throw InvalidInput("render: net \"" + net.name + "\" touches \"" +
                                   m.component_id + "\" twice (shorted component)");
            if (!seen_terms.insert({m.component_id, m.role}).second)
                throw InvalidInput("render: terminal " + m.component_id + "." + m.role +
                                   " appears in two nets");
        }
    }

    // A forced crossing needs two routable nets that share no component.
    bool crossing_possible = false;
    for (std::size_t i = 0; i < n.nets.size() && !crossing_possible; ++i) {
        if (n.nets[i].members.size() < 2) continue;
        for (std::size_t k = i + 1; k < n.nets.size(); ++k) {
            if (n.nets[k].members.size() < 2) continue;
            std::set<std::string> a;
            for (const auto& m : n.nets[i].members) a.insert(m.component_id);
            bool disjoint = true;
            for (const auto& m : n.nets[k].members) disjoint &= !a.count(m.component_id);
            if (disjoint) {
                crossing_possible = true;
                break;
            }
        }
    }

    Rng rng(cfg.seed ^ 0xD1B54A32D192ED03ULL);
    Router router(cfg, n, rng);

    bool ok = false;
    for (int attempt = 0; attempt < kPlacementRetries && !ok; ++attempt) {
        ok = router.place(attempt) && router.route_all();
        if (ok && cfg.crossing_probability >= 1.0 && crossing_possible &&
            router.crossings.empty())
            ok = false;  // the config demands at least one crossing
    }
    if (!ok)
        throw RenderGiveUp("render: no routable placement within " +
                           std::to_string(kPlacementRetries) + " attempts (seed " +
                           std::to_string(cfg.seed) + ")");

    const int u = cfg.grid_pitch, w = cfg.line_width;
    GrayImage img;
    img.width = u * (router.GX + 1) + 1;
    img.height = u * (router.GY + 1) + 1;
    img.samples.assign(static_cast<std::size_t>(img.width) * img.height, 255);

    RenderResult out;
    out.layout.netlist = n;
    out.layout.placements = router.comp_boxes;

    std::map<std::string, NetRoute> routes;
    auto px = [&](int g) { return u * (g + 1); };
    auto add_seg = [&](int net, PixelCoord a, PixelCoord b) {
        routes[router.dnets[static_cast<std::size_t>(net)].name].segments.push_back({a, b});
    };
    for (const auto& [key, net] : router.h_edges) {
        auto [gx, gy] = key;
        draw_hline(img, px(gy), px(gx), px(gx + 1), w);
        add_seg(net, {px(gy), px(gx)}, {px(gy), px(gx + 1)});
    }
    for (const auto& [key, net] : router.v_edges) {
        auto [gx, gy] = key;
        draw_vline(img, px(gx), px(gy), px(gy + 1), w);
        add_seg(net, {px(gy), px(gx)}, {px(gy + 1), px(gx)});
    }

    // Pin stems from the stem node to the box edge.
    for (const auto& pin : router.pins) {
        int sx = px(pin.gx), sy = px(pin.gy);
        int ex = sx + kDx[opposite(pin.outward)] * (u - 1);
        int ey = sy + kDy[opposite(pin.outward)] * (u - 1);
        if (pin.outward % 2 == 0)
            draw_vline(img, sx, sy, ey, w);
        else
            draw_hline(img, sy, sx, ex, w);
        add_seg(pin.net, {sy, sx}, {ey, ex});
    }

    std::vector<ComponentBox> all_boxes = router.comp_boxes;
    all_boxes.insert(all_boxes.end(), router.rail_boxes.begin(), router.rail_boxes.end());

    // Component symbols: border plus a diagonal, strictly inside the box.
    for (const auto& box : all_boxes) {
        draw_hline(img, box.y0, box.x0, box.x1 - 1, 1);
        draw_hline(img, box.y1 - 1, box.x0, box.x1 - 1, 1);
        draw_vline(img, box.x0, box.y0, box.y1 - 1, 1);
        draw_vline(img, box.x1 - 1, box.y0, box.y1 - 1, 1);
        int side = std::min(box.x1 - box.x0, box.y1 - box.y0);
        for (int t = 2; t < side - 2; ++t)
            img.samples[static_cast<std::size_t>(box.y0 + t) * img.width + box.x0 + t] = 0;
    }

    // Junction dots: filled disks, annotated as components when drawn.
    out.annotations.image = image_name;
    out.annotations.page_width = img.width;
    out.annotations.page_height = img.height;
    out.annotations.boxes = all_boxes;
    int dot_counter = 0;
    for (const auto& site : router.dots) {
        PixelCoord center{px(site.gy), px(site.gx)};
        if (site.omitted) {
            out.layout.omitted_junctions.push_back(center);
            continue;
        }
        for (int dy = -w; dy <= w; ++dy)
            for (int dx = -w; dx <= w; ++dx)
                if (dy * dy + dx * dx <= w * w)
                    img.samples[static_cast<std::size_t>(center.row + dy) * img.width +
                                center.col + dx] = 0;
        ComponentBox dot;
        dot.id = "j" + std::to_string(++dot_counter);
        dot.category = ComponentCategory::Junction;
        dot.orientation = Orientation::R0;
        dot.x0 = center.col - w;
        dot.y0 = center.row - w;
        dot.x1 = center.col + w + 1;
        dot.y1 = center.row + w + 1;
        out.annotations.boxes.push_back(dot);
        out.layout.junction_dots.push_back(center);
    }

    for (const auto& c : router.crossings)
        out.layout.crossing_points.push_back({px(c.gy), px(c.gx)});
    std::sort(out.layout.crossing_points.begin(), out.layout.crossing_points.end());
    for (const auto& net : n.nets)
        if (net.members.size() == 1) out.layout.dangling_nets.push_back(net.name);
    for (auto& [name, route] : routes) {
        route.net = name;
        std::sort(route.segments.begin(), route.segments.end(),
                  [](const RouteSegment& a, const RouteSegment& b) {
                      return std::tie(a.a, a.b) < std::tie(b.a, b.b);
                  });
        out.layout.routes.push_back(std::move(route));
    }
    out.image = std::move(img);
    return out;
}

}  // namespace schex
