#pragma once

#include <string>

#include "schex/pipeline.hpp"
#include "schex/synth.hpp"

namespace schex {

// CLI entry points. Exit-code contract: 0 success, 1 operational error,
// 2 completed with exceptions/failures. Human-readable output goes to
// stdout, diagnostics to stderr; written files are byte-deterministic.

int cmd_extract(const std::string& image_path, const std::string& annotations_path,
                const RunConfig& rc);

// Renders `count` instances seeded cfg.seed, cfg.seed+1, ...; writes the
// corpus manifest last. Unroutable seeds are listed under "failed".
int cmd_synth(const SynthConfig& cfg, int count, const std::string& out_dir, int jobs = 1);

// Re-extracts every manifest instance and compares against its golden
// netlist; an instance whose layout records omitted junction dots passes
// by being flagged instead.
int cmd_verify(const std::string& manifest_path, const RunConfig& rc,
               const std::string& report_path = "");

int cmd_stats(const std::string& netlist_dir, const std::string& json_path = "");

}  // namespace schex
