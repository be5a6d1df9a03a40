#include "schex/schema.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

#include <json.hpp>

namespace schex {

namespace {

struct CategoryInfo {
    ComponentCategory cat;
    const char* name;
    std::vector<std::string> roles;
    bool symmetric;
    bool card;
};

const std::vector<CategoryInfo>& category_table() {
    static const std::vector<CategoryInfo> table = {
        {ComponentCategory::Nmos3, "nmos3", {"drain", "gate", "source"}, false, true},
        {ComponentCategory::Nmos4, "nmos4", {"drain", "gate", "source", "body"}, false, true},
        {ComponentCategory::Pmos3, "pmos3", {"drain", "gate", "source"}, false, true},
        {ComponentCategory::Pmos4, "pmos4", {"drain", "gate", "source", "body"}, false, true},
        {ComponentCategory::Npn, "npn", {"collector", "base", "emitter"}, false, true},
        {ComponentCategory::Pnp, "pnp", {"collector", "base", "emitter"}, false, true},
        {ComponentCategory::Resistor, "resistor", {"t1", "t2"}, true, true},
        {ComponentCategory::Capacitor, "capacitor", {"t1", "t2"}, true, true},
        {ComponentCategory::Inductor, "inductor", {"t1", "t2"}, true, true},
        {ComponentCategory::Diode, "diode", {"anode", "cathode"}, false, true},
        {ComponentCategory::Vsource, "vsource", {"t1", "t2"}, false, true},
        {ComponentCategory::Isource, "isource", {"t1", "t2"}, false, true},
        {ComponentCategory::Gnd, "gnd", {"t1"}, false, false},
        {ComponentCategory::Vdd, "vdd", {"t1"}, false, false},
        {ComponentCategory::Port, "port", {"t1"}, false, false},
        {ComponentCategory::Junction, "junction", {"t1"}, false, false},
    };
    return table;
}

const CategoryInfo& info(ComponentCategory c) {
    return category_table()[static_cast<std::size_t>(c)];
}

const std::array<const char*, 8> kOrientationNames = {"R0",  "R90",  "R180",  "R270",
                                                      "MR0", "MR90", "MR180", "MR270"};

struct R0Pin {
    const char* role;
    double angle;
    double half_width;
};

// Canonical unrotated pin geometry. MOSFET: drain up, gate left, source
// down, body right. BJT: collector up, base left, emitter down. Diode:
// anode up, cathode down. Two-terminal passives and sources: t1 up, t2
// down. Rail/port/junction terminals accept any approach angle; their
// nominal angle only matters to the renderer.
std::vector<R0Pin> r0_pins(ComponentCategory c) {
    constexpr double hw = 44.0;
    switch (c) {
        case ComponentCategory::Nmos3:
        case ComponentCategory::Pmos3:
            return {{"drain", 90, hw}, {"gate", 180, hw}, {"source", 270, hw}};
        case ComponentCategory::Nmos4:
        case ComponentCategory::Pmos4:
            return {{"drain", 90, hw}, {"gate", 180, hw}, {"source", 270, hw}, {"body", 0, hw}};
        case ComponentCategory::Npn:
        case ComponentCategory::Pnp:
            return {{"collector", 90, hw}, {"base", 180, hw}, {"emitter", 270, hw}};
        case ComponentCategory::Diode:
            return {{"anode", 90, hw}, {"cathode", 270, hw}};
        case ComponentCategory::Resistor:
        case ComponentCategory::Capacitor:
        case ComponentCategory::Inductor:
        case ComponentCategory::Vsource:
        case ComponentCategory::Isource:
            return {{"t1", 90, hw}, {"t2", 270, hw}};
        case ComponentCategory::Gnd:
            return {{"t1", 90, 180}};
        case ComponentCategory::Vdd:
            return {{"t1", 270, 180}};
        case ComponentCategory::Port:
            return {{"t1", 0, 180}};
        case ComponentCategory::Junction:
            return {{"t1", 0, 180}};
    }
    throw InvalidInput("unknown category");
}

bool valid_id(const std::string& id) {
    if (id.empty()) return false;
    for (char ch : id) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-' &&
            ch != '.')
            return false;
    }
    return true;
}

bool boxes_overlap(const ComponentBox& a, const ComponentBox& b) {
    return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

}  // namespace

const std::vector<ComponentCategory>& all_categories() {
    static const std::vector<ComponentCategory> cats = [] {
        std::vector<ComponentCategory> v;
        for (const auto& e : category_table()) v.push_back(e.cat);
        return v;
    }();
    return cats;
}

const std::vector<Orientation>& all_orientations() {
    static const std::vector<Orientation> all = {
        Orientation::R0,  Orientation::R90,  Orientation::R180,  Orientation::R270,
        Orientation::MR0, Orientation::MR90, Orientation::MR180, Orientation::MR270};
    return all;
}

std::string category_name(ComponentCategory c) { return info(c).name; }

std::string orientation_name(Orientation o) {
    return kOrientationNames[static_cast<std::size_t>(o)];
}

ComponentCategory category_from_name(const std::string& name) {
    for (const auto& e : category_table())
        if (name == e.name) return e.cat;
    throw ParseError("unknown component category: \"" + name + "\"");
}

Orientation orientation_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kOrientationNames.size(); ++i)
        if (name == kOrientationNames[i]) return static_cast<Orientation>(i);
    throw ParseError("unknown orientation: \"" + name + "\"");
}

Orientation compose(Orientation first, Orientation second) {
    auto mirrored = [](Orientation o) { return static_cast<int>(o) >= 4; };
    auto rot = [](Orientation o) { return static_cast<int>(o) % 4; };
    // Mirror about vertical axis then rotate; mirror conjugates rotation.
    bool m = mirrored(first) != mirrored(second);
    int r = mirrored(second) ? (rot(second) - rot(first) + 4) % 4
                             : (rot(first) + rot(second)) % 4;
    return static_cast<Orientation>((m ? 4 : 0) + r);
}

const std::vector<std::string>& terminal_roles(ComponentCategory c) { return info(c).roles; }

bool is_symmetric(ComponentCategory c) { return info(c).symmetric; }

bool emits_card(ComponentCategory c) { return info(c).card; }

int box_pixel_gap(const ComponentBox& b, PixelCoord p) {
    int dr = 0;
    if (p.row < b.y0)
        dr = b.y0 - p.row;
    else if (p.row >= b.y1)
        dr = p.row - (b.y1 - 1);
    int dc = 0;
    if (p.col < b.x0)
        dc = b.x0 - p.col;
    else if (p.col >= b.x1)
        dc = p.col - (b.x1 - 1);
    return std::max(dr, dc);
}

std::vector<PinWindow> pin_windows(ComponentCategory c, Orientation o) {
    int r = static_cast<int>(o) % 4;
    bool mirrored = static_cast<int>(o) >= 4;
    std::vector<PinWindow> out;
    for (const auto& pin : r0_pins(c)) {
        double a = pin.angle;
        if (mirrored) a = 180.0 - a;  // reflect about the vertical axis
        a = normalize_deg(a + 90.0 * r);
        out.push_back({pin.role, a, pin.half_width});
    }
    return out;
}

AnnotationFile load_annotations(const std::string& document) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(document);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("annotation JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("annotation JSON: top level must be an object");

    static const std::vector<std::string> top_keys = {"image", "page_width", "page_height",
                                                      "boxes"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(top_keys.begin(), top_keys.end(), it.key()) == top_keys.end())
            throw ParseError("annotation JSON: unknown field \"" + it.key() + "\"");
    }
    for (const auto& k : top_keys)
        if (!j.contains(k)) throw ParseError("annotation JSON: missing field \"" + k + "\"");

    AnnotationFile ann;
    if (!j["image"].is_string()) throw ParseError("annotation JSON: \"image\" must be a string");
    ann.image = j["image"].get<std::string>();
    if (!j["page_width"].is_number_integer() || !j["page_height"].is_number_integer())
        throw ParseError("annotation JSON: page dimensions must be integers");
    ann.page_width = j["page_width"].get<int>();
    ann.page_height = j["page_height"].get<int>();
    if (ann.page_width < 1 || ann.page_height < 1)
        throw ParseError("annotation JSON: page dimensions must be positive");
    if (!j["boxes"].is_array()) throw ParseError("annotation JSON: \"boxes\" must be an array");

    static const std::vector<std::string> box_keys = {"id", "category", "orientation",
                                                      "x0",  "y0",      "x1",
                                                      "y1"};
    for (const auto& bj : j["boxes"]) {
        if (!bj.is_object()) throw ParseError("annotation JSON: box entries must be objects");
        for (auto it = bj.begin(); it != bj.end(); ++it) {
            if (std::find(box_keys.begin(), box_keys.end(), it.key()) == box_keys.end())
                throw ParseError("annotation JSON: unknown box field \"" + it.key() + "\"");
        }
        for (const auto& k : box_keys)
            if (!bj.contains(k))
                throw ParseError("annotation JSON: box missing field \"" + k + "\"");

        ComponentBox box;
        if (!bj["id"].is_string()) throw ParseError("annotation JSON: box id must be a string");
        box.id = bj["id"].get<std::string>();
        if (!valid_id(box.id))
            throw ParseError("annotation JSON: invalid box id \"" + box.id + "\"");
        if (!bj["category"].is_string() || !bj["orientation"].is_string())
            throw ParseError("annotation JSON: box \"" + box.id +
                             "\": category/orientation must be strings");
        try {
            box.category = category_from_name(bj["category"].get<std::string>());
            box.orientation = orientation_from_name(bj["orientation"].get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError("annotation JSON: box \"" + box.id + "\": " + e.what());
        }
        for (const char* k : {"x0", "y0", "x1", "y1"})
            if (!bj[k].is_number_integer())
                throw ParseError("annotation JSON: box \"" + box.id + "\": " + k +
                                 " must be an integer");
        box.x0 = bj["x0"].get<int>();
        box.y0 = bj["y0"].get<int>();
        box.x1 = bj["x1"].get<int>();
        box.y1 = bj["y1"].get<int>();
        if (box.x0 >= box.x1 || box.y0 >= box.y1)
            throw ParseError("annotation JSON: box \"" + box.id + "\": empty bounds");
        if (box.x0 < 0 || box.y0 < 0 || box.x1 > ann.page_width || box.y1 > ann.page_height)
            throw ParseError("annotation JSON: box \"" + box.id + "\": bounds outside page");
        ann.boxes.push_back(std::move(box));
    }

    for (std::size_t i = 0; i < ann.boxes.size(); ++i) {
        for (std::size_t k = i + 1; k < ann.boxes.size(); ++k) {
            if (ann.boxes[i].id == ann.boxes[k].id)
                throw AnnotationConflict("duplicate box id \"" + ann.boxes[i].id + "\"");
            if (boxes_overlap(ann.boxes[i], ann.boxes[k]))
                throw AnnotationConflict("boxes \"" + ann.boxes[i].id + "\" and \"" +
                                         ann.boxes[k].id + "\" overlap");
        }
    }
    return ann;
}

std::string save_annotations(const AnnotationFile& ann) {
    nlohmann::ordered_json j;
    j["image"] = ann.image;
    j["page_width"] = ann.page_width;
    j["page_height"] = ann.page_height;
    j["boxes"] = nlohmann::ordered_json::array();
    for (const auto& b : ann.boxes) {
        nlohmann::ordered_json bj;
        bj["id"] = b.id;
        bj["category"] = category_name(b.category);
        bj["orientation"] = orientation_name(b.orientation);
        bj["x0"] = b.x0;
        bj["y0"] = b.y0;
        bj["x1"] = b.x1;
        bj["y1"] = b.y1;
        j["boxes"].push_back(std::move(bj));
    }
    return j.dump(2) + "\n";
}

}  // namespace schex
