#include "schex/pipeline.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "schex/pins.hpp"
#include "schex/trace.hpp"

namespace schex {

namespace {

void region_bbox(const std::vector<PixelCoord>& pixels, int bbox[4]) {
    if (pixels.empty()) {
        bbox[0] = bbox[1] = bbox[2] = bbox[3] = 0;
        return;
    }
    int rmin = pixels[0].row, rmax = pixels[0].row;
    int cmin = pixels[0].col, cmax = pixels[0].col;
    for (const auto& p : pixels) {
        rmin = std::min(rmin, p.row);
        rmax = std::max(rmax, p.row);
        cmin = std::min(cmin, p.col);
        cmax = std::max(cmax, p.col);
    }
    bbox[0] = rmin;
    bbox[1] = cmin;
    bbox[2] = rmax + 1;
    bbox[3] = cmax + 1;
}

void box_bbox(const ComponentBox& b, int bbox[4]) {
    bbox[0] = b.y0;
    bbox[1] = b.x0;
    bbox[2] = b.y1;
    bbox[3] = b.x1;
}

}  // namespace

void validate_run_config(const RunConfig& rc) {
    if (rc.kernel < 1 || rc.kernel % 2 == 0)
        throw InvalidInput("run config: kernel must be odd and >= 1");
    if (rc.threshold < 0 || rc.threshold > 255)
        throw InvalidInput("run config: threshold must be in [0,255]");
    if (rc.jobs < 1) throw InvalidInput("run config: jobs must be >= 1");
}

std::vector<ReportEntry> PageExtraction::all_issues() const {
    std::vector<ReportEntry> out;
    for (const auto& s : schematics) out.insert(out.end(), s.issues.begin(), s.issues.end());
    return out;
}

PageExtraction extract_page(const GrayImage& image, const AnnotationFile& ann,
                            const RunConfig& rc) {
    validate_run_config(rc);
    if (ann.page_width != image.width || ann.page_height != image.height)
        throw ParseError("annotation page size " + std::to_string(ann.page_width) + "x" +
                         std::to_string(ann.page_height) + " does not match image " +
                         std::to_string(image.width) + "x" + std::to_string(image.height));

    BinaryRaster raster = binarize(image, rc.threshold);
    SegmentResult segments = segment_page(raster, ann.boxes, ann.image, rc.connectivity);

    PageExtraction out;
    out.stray_ink_pixels = segments.stray_ink_pixels;

    int index = 0;
    for (auto& schematic : segments.schematics) {
        SchematicExtraction ext;
        ext.index = ++index;
        ext.schematic = schematic;

        TraceResult traced = find_groups(raster, schematic, rc.connectivity);
        std::map<int, const ConnectionGroup*> group_by_region;
        for (const auto& g : traced.groups) group_by_region[g.region_id] = &g;
        std::map<std::string, const ComponentBox*> box_by_id;
        for (const auto& b : schematic.boxes) box_by_id[b.id] = &b;

        for (const auto& warn : traced.self_loops) {
            ReportEntry e;
            e.schematic_index = ext.index;
            e.region_id = warn.region_id;
            e.reason = "SelfLoop";
            e.blocking = false;
            region_bbox(group_by_region.at(warn.region_id)->pixels, e.bbox);
            ext.issues.push_back(e);
        }

        ext.resolution = resolve_all(traced.groups, schematic.boxes, rc.kernel);
        for (const auto& exc : ext.resolution.exceptions) {
            ReportEntry e;
            e.schematic_index = ext.index;
            e.region_id = exc.region_id;
            e.reason = exc.reason;
            region_bbox(group_by_region.at(exc.region_id)->pixels, e.bbox);
            ext.issues.push_back(e);
        }

        if (!ext.blocked()) {
            std::vector<Component> components;
            for (const auto& b : schematic.boxes)
                components.push_back({b.id, b.category, b.orientation,
                                      emits_card(b.category) ? default_parameters(b.category)
                                                             : ""});
            for (const auto& j : ext.resolution.inserted_junctions)
                components.push_back({j.id, ComponentCategory::Junction, Orientation::R0, ""});

            // Endpoints per component across all connections.
            std::map<std::string, std::vector<PinEndpoint>> endpoints;
            const auto& conns = ext.resolution.connections;
            for (std::size_t ci = 0; ci < conns.size(); ++ci) {
                endpoints[conns[ci].a.component_id].push_back(
                    {static_cast<int>(ci), conns[ci].a.angle_deg});
                endpoints[conns[ci].b.component_id].push_back(
                    {static_cast<int>(ci), conns[ci].b.angle_deg});
            }

            std::map<std::string, const ComponentBox*> all_boxes = box_by_id;
            for (const auto& j : ext.resolution.inserted_junctions)
                all_boxes[j.id] = &j.box;

            std::vector<TerminalBinding> bindings;
            std::vector<PinError> pin_errors;
            for (const auto& comp : components) {
                auto it = endpoints.find(comp.id);
                static const std::vector<PinEndpoint> none;
                AssignResult assigned =
                    assign_terminals(*all_boxes.at(comp.id), it == endpoints.end() ? none
                                                                                   : it->second);
                bindings.insert(bindings.end(), assigned.bindings.begin(),
                                assigned.bindings.end());
                pin_errors.insert(pin_errors.end(), assigned.errors.begin(),
                                  assigned.errors.end());
            }
            for (const auto& pe : pin_errors) {
                ReportEntry e;
                e.schematic_index = ext.index;
                e.region_id = -1;
                e.reason = pe.reason;
                box_bbox(*all_boxes.at(pe.component_id), e.bbox);
                ext.issues.push_back(e);
            }

            if (!ext.blocked()) {
                BuildNetsResult built = build_nets(bindings, conns, components);
                if (built.rail_short) {
                    ReportEntry e;
                    e.schematic_index = ext.index;
                    e.region_id = -1;
                    e.reason = "RailShort";
                    region_bbox(schematic.ink_region, e.bbox);
                    ext.issues.push_back(e);
                } else {
                    Netlist nl;
                    nl.title = ann.image;
                    nl.components = std::move(components);
                    nl.nets = std::move(built.nets);
                    ext.netlist = std::move(nl);
                }
            }
        }

        std::sort(ext.issues.begin(), ext.issues.end(),
                  [](const ReportEntry& a, const ReportEntry& b) {
                      return std::tie(a.schematic_index, a.region_id, a.reason) <
                             std::tie(b.schematic_index, b.region_id, b.reason);
                  });
        out.schematics.push_back(std::move(ext));
    }
    return out;
}

std::string exceptions_report_json(const PageExtraction& page) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : page.all_issues()) {
        nlohmann::ordered_json j;
        j["schematic"] = e.schematic_index;
        j["region"] = e.region_id;
        j["reason"] = e.reason;
        j["pixels_bbox"] = {e.bbox[0], e.bbox[1], e.bbox[2], e.bbox[3]};
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

}  // namespace schex
