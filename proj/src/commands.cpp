#include "schex/commands.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "schex/image_io.hpp"

namespace fs = std::filesystem;

namespace schex {

namespace {

std::string path_stem(const std::string& path) { return fs::path(path).stem().string(); }

std::string read_text(const std::string& path) {
    auto bytes = read_file_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

// Runs items 0..n-1 on up to `jobs` threads. Items must only touch their
// own slots and files; log output is replayed in index order afterwards.
void run_parallel(int n, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

const std::uint8_t kOverlayPalette[8][3] = {
    {198, 40, 40},  {21, 101, 192}, {46, 125, 50},  {230, 124, 0},
    {106, 27, 154}, {0, 131, 143},  {173, 20, 87},  {84, 110, 122},
};

void write_overlay(const std::string& path, const GrayImage& image, const AnnotationFile& ann,
                   const PageExtraction& page, int threshold) {
    RgbImage img;
    img.width = image.width;
    img.height = image.height;
    img.fill(255, 255, 255);
    BinaryRaster raster = binarize(image, threshold);
    for (int r = 0; r < raster.height(); ++r)
        for (int c = 0; c < raster.width(); ++c)
            if (raster.ink(r, c)) img.set(r, c, 205, 205, 205);
    for (std::size_t si = 0; si < page.schematics.size(); ++si) {
        const auto* col = kOverlayPalette[si % 8];
        for (const auto& p : page.schematics[si].schematic.ink_region)
            img.set(p.row, p.col, col[0], col[1], col[2]);
        for (const auto& b : page.schematics[si].schematic.boxes) {
            for (int x = b.x0; x < b.x1; ++x) {
                img.set(b.y0, x, col[0], col[1], col[2]);
                img.set(b.y1 - 1, x, col[0], col[1], col[2]);
            }
            for (int y = b.y0; y < b.y1; ++y) {
                img.set(y, b.x0, col[0], col[1], col[2]);
                img.set(y, b.x1 - 1, col[0], col[1], col[2]);
            }
        }
    }
    (void)ann;
    write_png_rgb(path, img);
}

std::string instance_prefix(std::uint64_t seed) { return "inst_" + std::to_string(seed); }

std::string layout_json(const SynthLayout& layout, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["placements"] = nlohmann::ordered_json::array();
    for (const auto& b : layout.placements) {
        nlohmann::ordered_json bj;
        bj["id"] = b.id;
        bj["category"] = category_name(b.category);
        bj["orientation"] = orientation_name(b.orientation);
        bj["x0"] = b.x0;
        bj["y0"] = b.y0;
        bj["x1"] = b.x1;
        bj["y1"] = b.y1;
        j["placements"].push_back(std::move(bj));
    }
    j["routes"] = nlohmann::ordered_json::array();
    for (const auto& rt : layout.routes) {
        nlohmann::ordered_json rj;
        rj["net"] = rt.net;
        rj["segments"] = nlohmann::ordered_json::array();
        for (const auto& s : rt.segments)
            rj["segments"].push_back({s.a.row, s.a.col, s.b.row, s.b.col});
        j["routes"].push_back(std::move(rj));
    }
    auto coords = [](const std::vector<PixelCoord>& v) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& p : v) arr.push_back({p.row, p.col});
        return arr;
    };
    j["crossing_points"] = coords(layout.crossing_points);
    j["junction_dots"] = coords(layout.junction_dots);
    j["omitted_junctions"] = coords(layout.omitted_junctions);
    j["dangling_nets"] = layout.dangling_nets;
    return j.dump(2) + "\n";
}

}  // namespace

int cmd_extract(const std::string& image_path, const std::string& annotations_path,
                const RunConfig& rc) {
    GrayImage image;
    AnnotationFile ann;
    PageExtraction page;
    try {
        validate_run_config(rc);
        image = load_image(image_path);
        ann = load_annotations(read_text(annotations_path));
        page = extract_page(image, ann, rc);
    } catch (const Error& e) {
        std::cerr << "extract: " << e.what() << "\n";
        return 1;
    }

    const std::string stem = path_stem(image_path);
    try {
        fs::create_directories(rc.out_dir);
        int emitted = 0;
        for (const auto& s : page.schematics) {
            if (!s.netlist) continue;
            std::string name = stem + "_s" + std::to_string(s.index) + ".sp";
            write_file_bytes((fs::path(rc.out_dir) / name).string(),
                             emit_spice(*s.netlist));
            ++emitted;
        }
        write_file_bytes((fs::path(rc.out_dir) / (stem + ".exceptions.json")).string(),
                         exceptions_report_json(page));
        if (rc.overlay)
            write_overlay((fs::path(rc.out_dir) / (stem + ".overlay.png")).string(), image, ann,
                          page, rc.threshold);

        if (page.stray_ink_pixels > 0)
            std::cerr << "extract: dropped " << page.stray_ink_pixels
                      << " stray ink pixels reachable from no component\n";
        auto issues = page.all_issues();
        std::cout << "extract: " << page.schematics.size() << " schematic(s), " << emitted
                  << " netlist(s), " << issues.size() << " exception(s)\n";
        return issues.empty() ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "extract: " << e.what() << "\n";
        return 1;
    }
}

int cmd_synth(const SynthConfig& cfg, int count, const std::string& out_dir, int jobs) {
    try {
        validate_config(cfg);
        if (count < 0) throw InvalidInput("synth: count must be >= 0");
        fs::create_directories(out_dir);
    } catch (const Error& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return 1;
    }

    struct Slot {
        bool failed = false;
        std::string error;
        std::uint64_t seed = 0;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(count));

    run_parallel(count, jobs, [&](int i) {
        Slot& slot = slots[static_cast<std::size_t>(i)];
        SynthConfig inst = cfg;
        inst.seed = cfg.seed + static_cast<std::uint64_t>(i);
        slot.seed = inst.seed;
        const std::string prefix = instance_prefix(inst.seed);
        try {
            Netlist netlist = sample_netlist(inst);
            netlist.title = prefix + ".pgm";
            RenderResult r = render(inst, netlist, prefix + ".pgm");
            write_pgm((fs::path(out_dir) / (prefix + ".pgm")).string(), r.image);
            write_file_bytes((fs::path(out_dir) / (prefix + ".json")).string(),
                             save_annotations(r.annotations));
            write_file_bytes((fs::path(out_dir) / (prefix + ".sp")).string(),
                             emit_spice(netlist));
            write_file_bytes((fs::path(out_dir) / (prefix + ".layout.json")).string(),
                             layout_json(r.layout, inst.seed));
        } catch (const RenderGiveUp& e) {
            slot.failed = true;
            slot.error = e.what();
        } catch (const Error& e) {
            slot.failed = true;
            slot.error = e.what();
        }
    });

    nlohmann::ordered_json manifest;
    manifest["instances"] = nlohmann::ordered_json::array();
    manifest["failed"] = nlohmann::ordered_json::array();
    int failed = 0;
    for (const auto& slot : slots) {
        const std::string prefix = instance_prefix(slot.seed);
        if (slot.failed) {
            manifest["failed"].push_back(slot.seed);
            ++failed;
            std::cerr << "synth: seed " << slot.seed << ": " << slot.error << "\n";
            continue;
        }
        nlohmann::ordered_json inst;
        inst["seed"] = slot.seed;
        inst["image"] = prefix + ".pgm";
        inst["annotations"] = prefix + ".json";
        inst["golden"] = prefix + ".sp";
        inst["layout"] = prefix + ".layout.json";
        manifest["instances"].push_back(std::move(inst));
    }
    try {
        write_file_bytes((fs::path(out_dir) / "manifest.json").string(),
                         manifest.dump(2) + "\n");
    } catch (const Error& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return 1;
    }
    std::cout << "synth: " << (count - failed) << "/" << count << " instances rendered into "
              << out_dir << "\n";
    return failed == 0 ? 0 : 2;
}

int cmd_verify(const std::string& manifest_path, const RunConfig& rc,
               const std::string& report_path) {
    nlohmann::json manifest;
    fs::path base;
    try {
        validate_run_config(rc);
        manifest = nlohmann::json::parse(read_text(manifest_path));
        base = fs::path(manifest_path).parent_path();
        if (!manifest.contains("instances") || !manifest["instances"].is_array())
            throw ParseError("manifest: missing \"instances\" array");
    } catch (const Error& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "verify: manifest: " << e.what() << "\n";
        return 1;
    }

    struct Slot {
        std::uint64_t seed = 0;
        bool pass = false;
        std::string detail;
    };
    const auto& instances = manifest["instances"];
    std::vector<Slot> slots(instances.size());

    run_parallel(static_cast<int>(instances.size()), rc.jobs, [&](int i) {
        Slot& slot = slots[static_cast<std::size_t>(i)];
        try {
            const auto& inst = instances[static_cast<std::size_t>(i)];
            slot.seed = inst.at("seed").get<std::uint64_t>();
            GrayImage image = load_image((base / inst.at("image").get<std::string>()).string());
            AnnotationFile ann = load_annotations(
                read_text((base / inst.at("annotations").get<std::string>()).string()));
            Netlist golden = parse_spice(
                read_text((base / inst.at("golden").get<std::string>()).string()));
            nlohmann::json layout = nlohmann::json::parse(
                read_text((base / inst.at("layout").get<std::string>()).string()));
            bool expect_flag = !layout.at("omitted_junctions").empty();

            PageExtraction page = extract_page(image, ann, rc);
            if (page.schematics.size() != 1) {
                slot.detail = "expected one schematic, found " +
                              std::to_string(page.schematics.size());
                return;
            }
            const auto& s = page.schematics[0];
            if (expect_flag) {
                if (s.blocked()) {
                    slot.pass = true;
                } else {
                    slot.detail = "omitted junction was not flagged";
                }
                return;
            }
            if (s.blocked()) {
                std::string reasons;
                for (const auto& e : s.issues) reasons += (reasons.empty() ? "" : ",") + e.reason;
                slot.detail = "unexpected exception: " + reasons;
                return;
            }
            if (!s.netlist) {
                slot.detail = "no netlist produced";
                return;
            }
            if (!graph_equal(*s.netlist, golden)) {
                slot.detail = "netlist differs from golden";
                return;
            }
            slot.pass = true;
        } catch (const Error& e) {
            slot.detail = e.what();
        } catch (const nlohmann::json::exception& e) {
            slot.detail = std::string("manifest entry: ") + e.what();
        }
    });

    int passed = 0;
    nlohmann::ordered_json report;
    report["instances"] = nlohmann::ordered_json::array();
    for (const auto& slot : slots) {
        bool ok = slot.pass;
        passed += ok ? 1 : 0;
        std::cout << "verify: seed " << slot.seed << ": " << (ok ? "pass" : "FAIL");
        if (!slot.detail.empty()) std::cout << " (" << slot.detail << ")";
        std::cout << "\n";
        nlohmann::ordered_json ij;
        ij["seed"] = slot.seed;
        ij["status"] = ok ? "pass" : "fail";
        ij["detail"] = slot.detail;
        report["instances"].push_back(std::move(ij));
    }
    const int total = static_cast<int>(slots.size());
    double accuracy = total == 0 ? 100.0 : 100.0 * passed / total;
    report["total"] = total;
    report["passed"] = passed;
    report["accuracy"] = accuracy;

    std::ostringstream acc;
    acc.setf(std::ios::fixed);
    acc.precision(1);
    acc << accuracy;
    std::cout << "verify: " << passed << "/" << total << " pass (" << acc.str() << "%)\n";
    if (!report_path.empty()) {
        try {
            write_file_bytes(report_path, report.dump(2) + "\n");
        } catch (const Error& e) {
            std::cerr << "verify: " << e.what() << "\n";
            return 1;
        }
    }
    return passed == total ? 0 : 2;
}

int cmd_stats(const std::string& netlist_dir, const std::string& json_path) {
    std::vector<std::string> sp_files, exc_files;
    try {
        for (const auto& entry : fs::directory_iterator(netlist_dir)) {
            if (!entry.is_regular_file()) continue;
            std::string name = entry.path().filename().string();
            if (name.size() > 3 && name.substr(name.size() - 3) == ".sp")
                sp_files.push_back(entry.path().string());
            else if (name.size() > 16 && name.substr(name.size() - 16) == ".exceptions.json")
                exc_files.push_back(entry.path().string());
        }
    } catch (const fs::filesystem_error& e) {
        std::cerr << "stats: " << e.what() << "\n";
        return 1;
    }
    std::sort(sp_files.begin(), sp_files.end());
    std::sort(exc_files.begin(), exc_files.end());

    // 3- and 4-terminal MOS devices are indistinguishable in the emitted
    // dialect, so counts use the merged labels.
    static const std::vector<std::pair<ComponentCategory, std::string>> kOrder = {
        {ComponentCategory::Nmos4, "nmos"},      {ComponentCategory::Pmos4, "pmos"},
        {ComponentCategory::Npn, "npn"},         {ComponentCategory::Pnp, "pnp"},
        {ComponentCategory::Resistor, "resistor"},
        {ComponentCategory::Capacitor, "capacitor"},
        {ComponentCategory::Inductor, "inductor"},
        {ComponentCategory::Diode, "diode"},     {ComponentCategory::Vsource, "vsource"},
        {ComponentCategory::Isource, "isource"},
    };
    std::map<std::string, int> comp_counts;
    for (const auto& [cat, label] : kOrder) comp_counts[label] = 0;
    std::map<int, int> net_dist;
    std::vector<std::string> invalid;
    int parsed = 0;

    for (const auto& path : sp_files) {
        try {
            Netlist n = parse_spice(read_text(path));
            ++parsed;
            for (const auto& c : n.components)
                for (const auto& [cat, label] : kOrder)
                    if (c.category == cat) comp_counts[label]++;
            net_dist[static_cast<int>(n.nets.size())]++;
        } catch (const Error&) {
            invalid.push_back(fs::path(path).filename().string());
        }
    }

    std::map<std::string, int> exception_counts;
    for (const auto& path : exc_files) {
        try {
            nlohmann::json arr = nlohmann::json::parse(read_text(path));
            for (const auto& e : arr) exception_counts[e.at("reason").get<std::string>()]++;
        } catch (...) {
            invalid.push_back(fs::path(path).filename().string());
        }
    }

    std::cout << "schematics: " << parsed << "\n";
    std::cout << "component counts:\n";
    for (const auto& [cat, label] : kOrder)
        std::cout << "  " << label << ": " << comp_counts[label] << "\n";
    std::cout << "net count distribution:\n";
    for (const auto& [nets, count] : net_dist)
        std::cout << "  " << nets << " nets: " << count << "\n";
    std::cout << "exceptions:\n";
    for (const auto& [reason, count] : exception_counts)
        std::cout << "  " << reason << ": " << count << "\n";
    if (!invalid.empty()) {
        std::cout << "invalid files:\n";
        for (const auto& f : invalid) std::cout << "  " << f << "\n";
    }

    nlohmann::ordered_json j;
    j["schematics"] = parsed;
    j["components"] = nlohmann::ordered_json::object();
    for (const auto& [cat, label] : kOrder) j["components"][label] = comp_counts[label];
    j["net_count_distribution"] = nlohmann::ordered_json::object();
    for (const auto& [nets, count] : net_dist)
        j["net_count_distribution"][std::to_string(nets)] = count;
    j["exceptions"] = nlohmann::ordered_json::object();
    for (const auto& [reason, count] : exception_counts) j["exceptions"][reason] = count;
    j["invalid"] = invalid;
    std::cout << j.dump(2) << "\n";
    if (!json_path.empty()) {
        try {
            write_file_bytes(json_path, j.dump(2) + "\n");
        } catch (const Error& e) {
            std::cerr << "stats: " << e.what() << "\n";
            return 1;
        }
    }
    return 0;
}

}  // namespace schex
