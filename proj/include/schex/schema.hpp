#pragma once

#include <string>
#include <vector>

#include "schex/common.hpp"

namespace schex {

enum class ComponentCategory {
    Nmos3,
    Nmos4,
    Pmos3,
    Pmos4,
    Npn,
    Pnp,
    Resistor,
    Capacitor,
    Inductor,
    Diode,
    Vsource,
    Isource,
    Gnd,
    Vdd,
    Port,
    Junction,
};

inline constexpr int kCategoryCount = 16;

// Counterclockwise rotation in 90-degree steps; the M variants mirror
// about the vertical axis before rotating.
enum class Orientation { R0, R90, R180, R270, MR0, MR90, MR180, MR270 };

const std::vector<ComponentCategory>& all_categories();
const std::vector<Orientation>& all_orientations();

std::string category_name(ComponentCategory c);
std::string orientation_name(Orientation o);
ComponentCategory category_from_name(const std::string& name);  // ParseError on unknown
Orientation orientation_from_name(const std::string& name);     // ParseError on unknown

// Composition in the dihedral group: apply `first`, then `second`.
Orientation compose(Orientation first, Orientation second);

// Terminal roles in SPICE card order for the category.
const std::vector<std::string>& terminal_roles(ComponentCategory c);

// True for categories whose two terminals are electrically interchangeable.
bool is_symmetric(ComponentCategory c);

// True for categories that produce a SPICE card. Rails, ports and
// junctions shape net names / connectivity instead.
bool emits_card(ComponentCategory c);

// Annotated device on a page. Bounds are inclusive-exclusive pixel ranges.
struct ComponentBox {
    std::string id;
    ComponentCategory category = ComponentCategory::Junction;
    Orientation orientation = Orientation::R0;
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    double center_x() const { return (x0 + x1) / 2.0; }
    double center_y() const { return (y0 + y1) / 2.0; }
    bool contains(PixelCoord p) const {
        return p.col >= x0 && p.col < x1 && p.row >= y0 && p.row < y1;
    }
};

// Chebyshev gap between an outside pixel and the box; 1 means 8-adjacent
// to the box's border ring.
int box_pixel_gap(const ComponentBox& b, PixelCoord p);

struct PinWindow {
    std::string role;
    double angle_deg = 0.0;       // nominal approach direction
    double half_width_deg = 0.0;  // 180 = accepts any angle

    bool contains(double angle) const {
        return angle_distance_deg(angle, angle_deg) <= half_width_deg;
    }
};

// Orientation-specific angular windows, one per terminal role. Windows
// for one (category, orientation) never overlap; a 44-degree half-width
// leaves exact diagonals unclaimed so ambiguous geometry fails loudly.
std::vector<PinWindow> pin_windows(ComponentCategory c, Orientation o);

struct AnnotationFile {
    std::string image;
    int page_width = 0;
    int page_height = 0;
    std::vector<ComponentBox> boxes;
};

// Strict decode of the annotation JSON: exact field set, known taxonomy
// labels, in-page bounds, unique ids, pairwise non-overlapping boxes.
AnnotationFile load_annotations(const std::string& document);

std::string save_annotations(const AnnotationFile& ann);

}  // namespace schex
