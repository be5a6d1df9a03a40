#pragma once

#include <string>
#include <vector>

#include "schex/pins.hpp"
#include "schex/resolve.hpp"
#include "schex/schema.hpp"

namespace schex {

class MissingPinError : public Error {
public:
    explicit MissingPinError(const std::string& msg) : Error(msg) {}
};

struct NetMember {
    std::string component_id;
    std::string role;

    auto operator<=>(const NetMember&) const = default;
};

struct Net {
    std::string name;
    std::vector<NetMember> members;  // sorted
};

struct Component {
    std::string id;
    ComponentCategory category = ComponentCategory::Junction;
    Orientation orientation = Orientation::R0;
    std::string parameters;  // SPICE card tail, e.g. "NMOS W=1u L=1u"
};

struct Netlist {
    std::string title;
    std::vector<Component> components;
    std::vector<Net> nets;  // sorted by name
};

// Conventional teaching defaults; schematics in print rarely carry sizing.
const std::string& default_parameters(ComponentCategory c);

char card_prefix(ComponentCategory c);

struct BuildNetsResult {
    std::vector<Net> nets;
    bool rail_short = false;  // some net reached both gnd and vdd symbols
    std::vector<std::string> rail_short_details;
};

// Union-find closure over the connections. Junction components fuse their
// incident connections into one net and drop out of the membership. Nets
// reaching a gnd symbol are named "0", vdd "VDD", ports their id (nets
// forced to the same name become one net); the rest are net1, net2, ...
// ordered by smallest member.
BuildNetsResult build_nets(const std::vector<TerminalBinding>& bindings,
                           const std::vector<BinaryConnection>& connections,
                           const std::vector<Component>& components);

// Naming/merging step shared by the extractor and the synthetic sampler:
// takes raw member groups (junctions already removed) and applies the
// rail/port naming rules above.
BuildNetsResult finalize_nets(std::vector<std::vector<NetMember>> classes,
                              const std::vector<Component>& components);

// Deterministic SPICE text: title line, one card per component sorted by
// id, ".end". MOSFET terminals are emitted drain, gate, source, body;
// 3-terminal MOS devices repeat the source net as body. LF endings,
// ASCII only.
std::string emit_spice(const Netlist& n);

// Reads exactly the dialect emit_spice writes. Verification oracle, not a
// general SPICE front end.
Netlist parse_spice(const std::string& text);

// Category- and parameter-preserving component bijection plus a net
// bijection under which every role-strict terminal lands on the same net;
// symmetric two-terminal devices may swap t1/t2. Net names are free
// except "0" and "VDD", which must map to themselves. 3- and 4-terminal
// MOS devices compare under the emission convention (body tied to
// source).
bool graph_equal(const Netlist& a, const Netlist& b);

}  // namespace schex
