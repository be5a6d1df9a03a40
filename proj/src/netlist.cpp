#include "schex/netlist.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace schex {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace

const std::string& default_parameters(ComponentCategory c) {
    static const std::map<ComponentCategory, std::string> params = {
        {ComponentCategory::Nmos3, "NMOS W=1u L=1u"},
        {ComponentCategory::Nmos4, "NMOS W=1u L=1u"},
        {ComponentCategory::Pmos3, "PMOS W=1u L=1u"},
        {ComponentCategory::Pmos4, "PMOS W=1u L=1u"},
        {ComponentCategory::Npn, "NPN"},
        {ComponentCategory::Pnp, "PNP"},
        {ComponentCategory::Resistor, "1k"},
        {ComponentCategory::Capacitor, "1p"},
        {ComponentCategory::Inductor, "1n"},
        {ComponentCategory::Diode, "DDEF"},
        {ComponentCategory::Vsource, "DC 1"},
        {ComponentCategory::Isource, "DC 1m"},
    };
    auto it = params.find(c);
    if (it == params.end())
        throw InvalidInput("no default parameters for " + category_name(c));
    return it->second;
}

char card_prefix(ComponentCategory c) {
    switch (c) {
        case ComponentCategory::Nmos3:
        case ComponentCategory::Nmos4:
        case ComponentCategory::Pmos3:
        case ComponentCategory::Pmos4: return 'M';
        case ComponentCategory::Npn:
        case ComponentCategory::Pnp: return 'Q';
        case ComponentCategory::Resistor: return 'R';
        case ComponentCategory::Capacitor: return 'C';
        case ComponentCategory::Inductor: return 'L';
        case ComponentCategory::Diode: return 'D';
        case ComponentCategory::Vsource: return 'V';
        case ComponentCategory::Isource: return 'I';
        default: break;
    }
    throw InvalidInput("category emits no card: " + category_name(c));
}

BuildNetsResult build_nets(const std::vector<TerminalBinding>& bindings,
                           const std::vector<BinaryConnection>& connections,
                           const std::vector<Component>& components) {
    std::map<std::string, const Component*> comp_by_id;
    for (const auto& c : components) comp_by_id[c.id] = &c;

    // Terminal index per distinct (component, role). Junction bindings
    // stay per-connection so each incident wire reaches the same class.
    std::map<std::pair<std::string, std::string>, int> term_index;
    std::vector<NetMember> terms;
    auto term_of = [&](const std::string& comp, const std::string& role) {
        auto key = std::make_pair(comp, role);
        auto it = term_index.find(key);
        if (it != term_index.end()) return it->second;
        int id = static_cast<int>(terms.size());
        term_index[key] = id;
        terms.push_back({comp, role});
        return id;
    };

    std::map<std::pair<std::string, int>, const TerminalBinding*> binding_by_endpoint;
    for (const auto& b : bindings)
        binding_by_endpoint[{b.component_id, b.connection_index}] = &b;

    UnionFind uf(0);
    uf.parent.reserve(connections.size() * 2);
    auto ensure = [&](int idx) {
        while (static_cast<int>(uf.parent.size()) <= idx)
            uf.parent.push_back(static_cast<int>(uf.parent.size()));
    };

    for (std::size_t ci = 0; ci < connections.size(); ++ci) {
        const auto& conn = connections[ci];
        int side[2];
        const Endpoint* eps[2] = {&conn.a, &conn.b};
        for (int s = 0; s < 2; ++s) {
            auto it = binding_by_endpoint.find({eps[s]->component_id, static_cast<int>(ci)});
            if (it == binding_by_endpoint.end())
                throw InvalidInput("build_nets: endpoint of connection " + std::to_string(ci) +
                                   " at \"" + eps[s]->component_id + "\" has no binding");
            side[s] = term_of(it->second->component_id, it->second->role);
        }
        ensure(std::max(side[0], side[1]));
        uf.unite(side[0], side[1]);
    }
    ensure(static_cast<int>(terms.size()) - 1);

    // Junctions fuse everything they touch.
    std::map<std::string, std::vector<int>> by_component;
    for (int t = 0; t < static_cast<int>(terms.size()); ++t)
        by_component[terms[static_cast<std::size_t>(t)].component_id].push_back(t);
    for (const auto& [id, list] : by_component) {
        auto it = comp_by_id.find(id);
        if (it != comp_by_id.end() && it->second->category == ComponentCategory::Junction)
            for (std::size_t i = 1; i < list.size(); ++i) uf.unite(list[0], list[i]);
    }

    // Gather classes with junction members removed.
    std::map<int, std::vector<NetMember>> classes;
    for (int t = 0; t < static_cast<int>(terms.size()); ++t) {
        const auto& m = terms[static_cast<std::size_t>(t)];
        auto it = comp_by_id.find(m.component_id);
        bool junction =
            it != comp_by_id.end() && it->second->category == ComponentCategory::Junction;
        auto& cls = classes[uf.find(t)];
        if (!junction) cls.push_back(m);
    }
    std::vector<std::vector<NetMember>> member_groups;
    for (auto& [root, members] : classes)
        if (!members.empty()) member_groups.push_back(std::move(members));
    return finalize_nets(std::move(member_groups), components);
}

BuildNetsResult finalize_nets(std::vector<std::vector<NetMember>> classes,
                              const std::vector<Component>& components) {
    std::map<std::string, const Component*> comp_by_id;
    for (const auto& c : components) comp_by_id[c.id] = &c;

    BuildNetsResult out;
    struct RawNet {
        std::vector<NetMember> members;
        std::string forced_name;  // empty = ordinary net
        bool has_gnd = false, has_vdd = false;
    };
    std::vector<RawNet> raw;
    for (auto& members : classes) {
        if (members.empty()) continue;
        RawNet net;
        std::sort(members.begin(), members.end());
        net.members = std::move(members);
        std::string port_name;
        for (const auto& m : net.members) {
            auto it = comp_by_id.find(m.component_id);
            if (it == comp_by_id.end()) continue;
            switch (it->second->category) {
                case ComponentCategory::Gnd: net.has_gnd = true; break;
                case ComponentCategory::Vdd: net.has_vdd = true; break;
                case ComponentCategory::Port:
                    if (port_name.empty() || m.component_id < port_name)
                        port_name = m.component_id;
                    break;
                default: break;
            }
        }
        if (net.has_gnd && net.has_vdd) {
            out.rail_short = true;
            out.rail_short_details.push_back("net with members starting at " +
                                             net.members.front().component_id + "." +
                                             net.members.front().role);
        }
        if (net.has_gnd)
            net.forced_name = "0";
        else if (net.has_vdd)
            net.forced_name = "VDD";
        else if (!port_name.empty())
            net.forced_name = port_name;
        raw.push_back(std::move(net));
    }

    // Nets forced to the same name are electrically one net.
    std::map<std::string, RawNet> named;
    std::vector<RawNet> ordinary;
    for (auto& net : raw) {
        if (net.forced_name.empty()) {
            ordinary.push_back(std::move(net));
            continue;
        }
        auto [it, inserted] = named.insert({net.forced_name, net});
        if (!inserted) {
            auto& dst = it->second.members;
            dst.insert(dst.end(), net.members.begin(), net.members.end());
            std::sort(dst.begin(), dst.end());
        }
    }

    std::sort(ordinary.begin(), ordinary.end(), [](const RawNet& a, const RawNet& b) {
        return a.members.front() < b.members.front();
    });
    std::set<std::string> used;
    for (const auto& [name, net] : named) used.insert(name);
    int counter = 0;
    for (auto& net : ordinary) {
        std::string name;
        do {
            name = "net" + std::to_string(++counter);
        } while (used.count(name));
        used.insert(name);
        out.nets.push_back({name, std::move(net.members)});
    }
    for (auto& [name, net] : named) out.nets.push_back({name, std::move(net.members)});
    std::sort(out.nets.begin(), out.nets.end(),
              [](const Net& a, const Net& b) { return a.name < b.name; });
    return out;
}

std::string emit_spice(const Netlist& n) {
    std::map<std::pair<std::string, std::string>, std::string> net_of;
    for (const auto& net : n.nets) {
        for (const auto& m : net.members) {
            auto [it, inserted] = net_of.insert({{m.component_id, m.role}, net.name});
            if (!inserted)
                throw InvalidInput("emit_spice: terminal " + m.component_id + "." + m.role +
                                   " appears in two nets");
        }
    }

    std::vector<const Component*> cards;
    for (const auto& c : n.components)
        if (emits_card(c.category)) cards.push_back(&c);
    std::sort(cards.begin(), cards.end(),
              [](const Component* a, const Component* b) { return a->id < b->id; });

    std::string out = n.title + "\n";
    for (const Component* c : cards) {
        auto net_for = [&](const std::string& role) {
            auto it = net_of.find({c->id, role});
            if (it == net_of.end())
                throw MissingPinError("MissingPin: " + c->id + "." + role + " is unbound");
            return it->second;
        };
        std::string line;
        line += card_prefix(c->category);
        line += c->id;
        for (const auto& role : terminal_roles(c->category)) line += " " + net_for(role);
        if (c->category == ComponentCategory::Nmos3 || c->category == ComponentCategory::Pmos3)
            line += " " + net_for("source");  // body tied to source by convention
        if (!c->parameters.empty()) line += " " + c->parameters;
        out += line + "\n";
    }
    out += ".end\n";
    return out;
}

Netlist parse_spice(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    if (lines.empty()) throw ParseError("spice: empty input");

    Netlist n;
    n.title = lines[0];
    std::map<std::string, std::vector<NetMember>> nets;
    std::set<std::string> ids;
    bool ended = false;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::string& line = lines[li];
        if (line.empty()) {
            if (li + 1 != lines.size() || !ended)
                throw ParseError("spice: blank line " + std::to_string(li + 1));
            continue;
        }
        if (ended) throw ParseError("spice: content after .end");
        if (line == ".end") {
            ended = true;
            continue;
        }
        auto tok = split_ws(line);
        if (tok.empty() || tok[0].size() < 2)
            throw ParseError("spice: bad card at line " + std::to_string(li + 1));

        Component comp;
        comp.id = tok[0].substr(1);
        if (!ids.insert(comp.id).second)
            throw ParseError("spice: duplicate component id \"" + comp.id + "\"");

        int net_count = 0;
        std::vector<std::string> roles;
        switch (tok[0][0]) {
            case 'M': {
                net_count = 4;
                roles = {"drain", "gate", "source", "body"};
                if (tok.size() < static_cast<std::size_t>(net_count) + 2)
                    throw ParseError("spice: short M card at line " + std::to_string(li + 1));
                const std::string& model = tok[5];
                if (model == "NMOS")
                    comp.category = ComponentCategory::Nmos4;
                else if (model == "PMOS")
                    comp.category = ComponentCategory::Pmos4;
                else
                    throw ParseError("spice: unknown MOS model \"" + model + "\"");
                break;
            }
            case 'Q': {
                net_count = 3;
                roles = {"collector", "base", "emitter"};
                if (tok.size() < static_cast<std::size_t>(net_count) + 2)
                    throw ParseError("spice: short Q card at line " + std::to_string(li + 1));
                const std::string& model = tok[4];
                if (model == "NPN")
                    comp.category = ComponentCategory::Npn;
                else if (model == "PNP")
                    comp.category = ComponentCategory::Pnp;
                else
                    throw ParseError("spice: unknown BJT model \"" + model + "\"");
                break;
            }
            case 'R': net_count = 2; roles = {"t1", "t2"}; comp.category = ComponentCategory::Resistor; break;
            case 'C': net_count = 2; roles = {"t1", "t2"}; comp.category = ComponentCategory::Capacitor; break;
            case 'L': net_count = 2; roles = {"t1", "t2"}; comp.category = ComponentCategory::Inductor; break;
            case 'D': net_count = 2; roles = {"anode", "cathode"}; comp.category = ComponentCategory::Diode; break;
            case 'V': net_count = 2; roles = {"t1", "t2"}; comp.category = ComponentCategory::Vsource; break;
            case 'I': net_count = 2; roles = {"t1", "t2"}; comp.category = ComponentCategory::Isource; break;
            default:
                throw ParseError("spice: unknown card prefix '" + tok[0].substr(0, 1) + "'");
        }
        if (tok.size() < static_cast<std::size_t>(net_count) + 1)
            throw ParseError("spice: card missing nets at line " + std::to_string(li + 1));
        for (int t = 0; t < net_count; ++t)
            nets[tok[static_cast<std::size_t>(t) + 1]].push_back({comp.id, roles[static_cast<std::size_t>(t)]});
        std::string params;
        for (std::size_t t = static_cast<std::size_t>(net_count) + 1; t < tok.size(); ++t) {
            if (!params.empty()) params += " ";
            params += tok[t];
        }
        comp.parameters = params;
        n.components.push_back(std::move(comp));
    }
    if (!ended) throw ParseError("spice: missing .end");

    for (auto& [name, members] : nets) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        n.nets.push_back({name, std::move(members)});
    }
    std::sort(n.nets.begin(), n.nets.end(),
              [](const Net& a, const Net& b) { return a.name < b.name; });
    return n;
}

namespace {

// Comparison form: card components with canonical MOS categories and
// terminals resolved to net indices; "0" and "VDD" are anchored.
struct CanonComp {
    std::string cls;                 // category + parameters
    bool symmetric = false;
    std::vector<int> term_nets;      // in role order
};

struct CanonNetlist {
    std::vector<CanonComp> comps;
    std::vector<int> net_anchor;     // 0 = free, 1 = "0", 2 = "VDD"
    std::vector<int> net_degree;     // card-terminal occurrences
};

ComponentCategory canon_category(ComponentCategory c) {
    if (c == ComponentCategory::Nmos3) return ComponentCategory::Nmos4;
    if (c == ComponentCategory::Pmos3) return ComponentCategory::Pmos4;
    return c;
}

CanonNetlist canonicalize(const Netlist& n) {
    std::map<std::pair<std::string, std::string>, int> net_of;
    std::map<std::string, int> net_id;
    CanonNetlist out;
    auto intern_net = [&](const std::string& name) {
        auto it = net_id.find(name);
        if (it != net_id.end()) return it->second;
        int id = static_cast<int>(out.net_anchor.size());
        net_id[name] = id;
        out.net_anchor.push_back(name == "0" ? 1 : name == "VDD" ? 2 : 0);
        out.net_degree.push_back(0);
        return id;
    };
    for (const auto& net : n.nets) {
        int id = intern_net(net.name);
        for (const auto& m : net.members) net_of[{m.component_id, m.role}] = id;
    }

    std::vector<const Component*> cards;
    for (const auto& c : n.components)
        if (emits_card(c.category)) cards.push_back(&c);
    std::sort(cards.begin(), cards.end(),
              [](const Component* a, const Component* b) { return a->id < b->id; });

    int synthetic = 0;
    for (const Component* c : cards) {
        CanonComp cc;
        ComponentCategory cat = canon_category(c->category);
        cc.cls = category_name(cat) + "|" + c->parameters;
        cc.symmetric = is_symmetric(cat);
        for (const auto& role : terminal_roles(c->category)) {
            auto it = net_of.find({c->id, role});
            int id;
            if (it == net_of.end()) {
                // Unbound terminal: a fresh net no other terminal shares.
                id = static_cast<int>(out.net_anchor.size());
                out.net_anchor.push_back(0);
                out.net_degree.push_back(0);
                ++synthetic;
            } else {
                id = it->second;
            }
            cc.term_nets.push_back(id);
        }
        if (c->category == ComponentCategory::Nmos3 || c->category == ComponentCategory::Pmos3)
            cc.term_nets.push_back(cc.term_nets[2]);  // body = source
        out.comps.push_back(std::move(cc));
    }
    (void)synthetic;
    for (const auto& cc : out.comps)
        for (int t : cc.term_nets) out.net_degree[static_cast<std::size_t>(t)]++;
    return out;
}

struct Matcher {
    const CanonNetlist& A;
    const CanonNetlist& B;
    std::vector<int> net_ab, net_ba;      // net mapping, -1 = unset
    std::vector<int> comp_assignment;     // a-comp -> b-comp
    std::vector<std::uint8_t> b_used;

    Matcher(const CanonNetlist& a, const CanonNetlist& b)
        : A(a),
          B(b),
          net_ab(a.net_anchor.size(), -1),
          net_ba(b.net_anchor.size(), -1),
          comp_assignment(a.comps.size(), -1),
          b_used(b.comps.size(), 0) {}

    bool map_nets(const std::vector<int>& ta, const std::vector<int>& tb,
                  std::vector<std::pair<int, int>>& added) {
        for (std::size_t i = 0; i < ta.size(); ++i) {
            int na = ta[i], nb = tb[i];
            if (A.net_anchor[static_cast<std::size_t>(na)] !=
                B.net_anchor[static_cast<std::size_t>(nb)])
                return false;
            if (A.net_degree[static_cast<std::size_t>(na)] !=
                B.net_degree[static_cast<std::size_t>(nb)])
                return false;
            int cur = net_ab[static_cast<std::size_t>(na)];
            if (cur == -1) {
                if (net_ba[static_cast<std::size_t>(nb)] != -1) return false;
                net_ab[static_cast<std::size_t>(na)] = nb;
                net_ba[static_cast<std::size_t>(nb)] = na;
                added.push_back({na, nb});
            } else if (cur != nb) {
                return false;
            }
        }
        return true;
    }

    void unmap(const std::vector<std::pair<int, int>>& added) {
        for (auto [na, nb] : added) {
            net_ab[static_cast<std::size_t>(na)] = -1;
            net_ba[static_cast<std::size_t>(nb)] = -1;
        }
    }

    bool search(std::size_t ai) {
        if (ai == A.comps.size()) return true;
        const auto& ca = A.comps[ai];
        for (std::size_t bi = 0; bi < B.comps.size(); ++bi) {
            if (b_used[bi]) continue;
            const auto& cb = B.comps[bi];
            if (ca.cls != cb.cls) continue;

            std::vector<std::vector<int>> orders;
            orders.push_back(cb.term_nets);
            if (ca.symmetric && cb.term_nets.size() == 2 &&
                cb.term_nets[0] != cb.term_nets[1])
                orders.push_back({cb.term_nets[1], cb.term_nets[0]});

            for (const auto& tb : orders) {
                std::vector<std::pair<int, int>> added;
                if (map_nets(ca.term_nets, tb, added)) {
                    b_used[bi] = 1;
                    if (search(ai + 1)) return true;
                    b_used[bi] = 0;
                }
                unmap(added);
            }
        }
        return false;
    }
};

}  // namespace

bool graph_equal(const Netlist& a, const Netlist& b) {
    CanonNetlist ca = canonicalize(a);
    CanonNetlist cb = canonicalize(b);
    if (ca.comps.size() != cb.comps.size()) return false;

    std::map<std::string, int> count_a, count_b;
    for (const auto& c : ca.comps) count_a[c.cls]++;
    for (const auto& c : cb.comps) count_b[c.cls]++;
    if (count_a != count_b) return false;

    // Anchored nets must exist on both sides with matching degree.
    for (int anchor : {1, 2}) {
        int da = 0, db = 0;
        for (std::size_t i = 0; i < ca.net_anchor.size(); ++i)
            if (ca.net_anchor[i] == anchor) da += ca.net_degree[i];
        for (std::size_t i = 0; i < cb.net_anchor.size(); ++i)
            if (cb.net_anchor[i] == anchor) db += cb.net_degree[i];
        if (da != db) return false;
    }

    // Hardest components first: larger class, higher terminal count.
    std::sort(ca.comps.begin(), ca.comps.end(), [](const CanonComp& x, const CanonComp& y) {
        if (x.term_nets.size() != y.term_nets.size())
            return x.term_nets.size() > y.term_nets.size();
        return x.cls < y.cls;
    });

    Matcher m(ca, cb);
    return m.search(0);
}

}  // namespace schex
