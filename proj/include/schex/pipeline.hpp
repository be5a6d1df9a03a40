#pragma once

#include <optional>
#include <string>
#include <vector>

#include "schex/netlist.hpp"
#include "schex/segment.hpp"

namespace schex {

struct RunConfig {
    int kernel = kDefaultKernel;
    int threshold = kDefaultThreshold;
    Connectivity connectivity = kDefaultConnectivity;
    bool overlay = false;
    int jobs = 1;
    std::string out_dir = ".";
};

void validate_run_config(const RunConfig& rc);

// One row of the exceptions report. SelfLoop is advisory (the schematic
// still emits); every other reason excludes the schematic from emission.
struct ReportEntry {
    int schematic_index = 0;  // 1-based
    int region_id = -1;       // -1 = not tied to one wire region
    std::string reason;
    int bbox[4] = {0, 0, 0, 0};  // y0, x0, y1, x1 inclusive-exclusive
    bool blocking = true;
};

struct SchematicExtraction {
    int index = 0;  // 1-based, smallest-(y0,x0) order
    Schematic schematic;
    ResolutionReport resolution;
    std::vector<ReportEntry> issues;
    std::optional<Netlist> netlist;  // absent when a blocking issue exists

    bool blocked() const {
        for (const auto& e : issues)
            if (e.blocking) return true;
        return false;
    }
};

struct PageExtraction {
    std::vector<SchematicExtraction> schematics;
    int stray_ink_pixels = 0;

    std::vector<ReportEntry> all_issues() const;
};

// Full pipeline for one page: binarize, split into schematics, trace wire
// regions, reduce to binary connections, assign terminals, build nets.
PageExtraction extract_page(const GrayImage& image, const AnnotationFile& ann,
                            const RunConfig& rc);

std::string exceptions_report_json(const PageExtraction& page);

}  // namespace schex
