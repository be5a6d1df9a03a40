#include "schex/pins.hpp"

#include <algorithm>
#include <map>

namespace schex {

AssignResult assign_terminals(const ComponentBox& c, const std::vector<PinEndpoint>& endpoints) {
    AssignResult out;
    const auto& roles = terminal_roles(c.category);

    if (c.category == ComponentCategory::Junction) {
        for (const auto& e : endpoints)
            out.bindings.push_back({c.id, "t1", e.connection_index, e.angle_deg});
        return out;
    }

    if (c.category == ComponentCategory::Gnd || c.category == ComponentCategory::Vdd ||
        c.category == ComponentCategory::Port) {
        // Rail and port symbols appear in every orientation; the single
        // terminal binds regardless of approach angle.
        if (endpoints.empty()) {
            out.errors.push_back({c.id, "MissingPin", "t1"});
            return out;
        }
        if (endpoints.size() > 1) {
            out.errors.push_back({c.id, "PinCollision", "t1"});
            return out;
        }
        out.bindings.push_back({c.id, "t1", endpoints[0].connection_index,
                                endpoints[0].angle_deg});
        return out;
    }

    if (is_symmetric(c.category)) {
        auto sorted = endpoints;
        std::sort(sorted.begin(), sorted.end(), [](const PinEndpoint& a, const PinEndpoint& b) {
            if (a.angle_deg != b.angle_deg) return a.angle_deg < b.angle_deg;
            return a.connection_index < b.connection_index;
        });
        if (sorted.size() > roles.size()) {
            out.errors.push_back({c.id, "PinCollision", "more endpoints than terminals"});
            return out;
        }
        for (std::size_t i = 0; i < sorted.size(); ++i)
            out.bindings.push_back({c.id, roles[i], sorted[i].connection_index,
                                    sorted[i].angle_deg});
        for (std::size_t i = sorted.size(); i < roles.size(); ++i)
            out.errors.push_back({c.id, "MissingPin", roles[i]});
        return out;
    }

    const auto windows = pin_windows(c.category, c.orientation);
    std::map<std::string, const PinEndpoint*> taken;
    for (const auto& e : endpoints) {
        const PinWindow* match = nullptr;
        for (const auto& w : windows) {
            if (w.contains(e.angle_deg)) {
                match = &w;
                break;
            }
        }
        if (!match) {
            out.errors.push_back({c.id, "UnmappedPin",
                                  "angle " + std::to_string(e.angle_deg) + " fits no window"});
            continue;
        }
        auto [it, inserted] = taken.insert({match->role, &e});
        if (!inserted) {
            out.errors.push_back({c.id, "PinCollision", match->role});
            continue;
        }
        out.bindings.push_back({c.id, match->role, e.connection_index, e.angle_deg});
    }
    for (const auto& role : roles)
        if (!taken.count(role)) out.errors.push_back({c.id, "MissingPin", role});
    return out;
}

}  // namespace schex
