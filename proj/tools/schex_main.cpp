#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "schex/commands.hpp"
#include "schex/image_io.hpp"

namespace {

// Optional JSON config file for run settings; explicit flags win.
void apply_config_file(const std::string& path, schex::RunConfig& rc) {
    auto bytes = schex::read_file_bytes(path);
    nlohmann::json j = nlohmann::json::parse(std::string(bytes.begin(), bytes.end()));
    if (j.contains("kernel")) rc.kernel = j["kernel"].get<int>();
    if (j.contains("threshold")) rc.threshold = j["threshold"].get<int>();
    if (j.contains("jobs")) rc.jobs = j["jobs"].get<int>();
    if (j.contains("overlay")) rc.overlay = j["overlay"].get<bool>();
    if (j.contains("connectivity")) {
        int c = j["connectivity"].get<int>();
        if (c != 4 && c != 8) throw schex::ParseError("config: connectivity must be 4 or 8");
        rc.connectivity = c == 4 ? schex::Connectivity::Four : schex::Connectivity::Eight;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"schex - schematic image to SPICE netlist extraction"};
    app.require_subcommand(1);

    schex::RunConfig rc;
    std::string config_file;
    int connectivity = 8;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--kernel", rc.kernel, "intersection kernel size (odd)")
            ->capture_default_str();
        cmd->add_option("--threshold", rc.threshold, "binarization threshold")
            ->capture_default_str();
        cmd->add_option("--connectivity", connectivity, "ink connectivity (4 or 8)")
            ->capture_default_str();
        cmd->add_option("--jobs", rc.jobs, "worker threads")->capture_default_str();
        cmd->add_option("--config", config_file, "JSON config file (flags win)");
    };

    // extract
    auto* extract = app.add_subcommand("extract", "extract netlists from one page");
    std::string image_path, ann_path;
    extract->add_option("image", image_path, "page image (PNG or PGM)")->required();
    extract->add_option("annotations", ann_path, "component annotation JSON")->required();
    extract->add_option("--out", rc.out_dir, "output directory")->capture_default_str();
    extract->add_flag("--overlay", rc.overlay, "write a colored debug overlay PNG");
    add_run_flags(extract);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic schematic corpus");
    schex::SynthConfig scfg;
    int count = 10;
    std::string synth_out = "corpus";
    int jobs = 1;
    synth->add_option("--seed", scfg.seed, "first seed")->capture_default_str();
    synth->add_option("--count", count, "number of instances")->capture_default_str();
    synth->add_option("--min-components", scfg.count_min, "minimum component count")
        ->capture_default_str();
    synth->add_option("--max-components", scfg.count_max, "maximum component count")
        ->capture_default_str();
    synth->add_option("--crossing-prob", scfg.crossing_probability,
                      "probability a net may cross others")
        ->capture_default_str();
    synth->add_option("--omit-junction-prob", scfg.omit_junction_probability,
                      "probability a junction dot is omitted")
        ->capture_default_str();
    synth->add_option("--dangling-prob", scfg.dangling_probability,
                      "probability a leftover terminal dangles")
        ->capture_default_str();
    synth->add_option("--line-width", scfg.line_width, "wire width in pixels (1-3)")
        ->capture_default_str();
    synth->add_option("--pitch", scfg.grid_pitch, "routing grid pitch in pixels")
        ->capture_default_str();
    synth->add_option("--out", synth_out, "corpus directory")->capture_default_str();
    synth->add_option("--jobs", jobs, "worker threads")->capture_default_str();

    // verify
    auto* verify = app.add_subcommand("verify", "round-trip check a synthetic corpus");
    std::string manifest_path, report_path;
    verify->add_option("manifest", manifest_path, "corpus manifest JSON")->required();
    verify->add_option("--report", report_path, "write verification report JSON here");
    add_run_flags(verify);

    // stats
    auto* stats = app.add_subcommand("stats", "summarize a directory of netlists");
    std::string stats_dir, stats_json;
    stats->add_option("dir", stats_dir, "directory of .sp files")->required();
    stats->add_option("--out", stats_json, "write the JSON report here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_file.empty()) {
            schex::RunConfig from_file = rc;
            apply_config_file(config_file, from_file);
            // Re-apply explicit flags over file values.
            for (auto* cmd : {extract, verify}) {
                if (!cmd->parsed()) continue;
                if (!cmd->count("--kernel")) rc.kernel = from_file.kernel;
                if (!cmd->count("--threshold")) rc.threshold = from_file.threshold;
                if (!cmd->count("--jobs")) rc.jobs = from_file.jobs;
                if (!cmd->count("--connectivity")) connectivity =
                    from_file.connectivity == schex::Connectivity::Four ? 4 : 8;
            }
        }
        if (connectivity != 4 && connectivity != 8) {
            std::cerr << "connectivity must be 4 or 8\n";
            return 1;
        }
        rc.connectivity =
            connectivity == 4 ? schex::Connectivity::Four : schex::Connectivity::Eight;

        if (extract->parsed()) return schex::cmd_extract(image_path, ann_path, rc);
        if (synth->parsed()) return schex::cmd_synth(scfg, count, synth_out, jobs);
        if (verify->parsed()) return schex::cmd_verify(manifest_path, rc, report_path);
        if (stats->parsed()) return schex::cmd_stats(stats_dir, stats_json);
    } catch (const schex::Error& e) {
        std::cerr << "schex: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "schex: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
