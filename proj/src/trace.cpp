#include "schex/trace.hpp"

#include <algorithm>
#include <map>

namespace schex {

namespace {

int manhattan(PixelCoord a, PixelCoord b) {
    return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

// Number of 8-connected clusters within a small pixel set.
int cluster_count(std::vector<PixelCoord> pts) {
    std::sort(pts.begin(), pts.end());
    int clusters = 0;
    std::vector<std::uint8_t> seen(pts.size(), 0);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (seen[i]) continue;
        ++clusters;
        seen[i] = 1;
        stack.push_back(i);
        while (!stack.empty()) {
            std::size_t cur = stack.back();
            stack.pop_back();
            for (std::size_t k = 0; k < pts.size(); ++k) {
                if (!seen[k] && std::abs(pts[cur].row - pts[k].row) <= 1 &&
                    std::abs(pts[cur].col - pts[k].col) <= 1) {
                    seen[k] = 1;
                    stack.push_back(k);
                }
            }
        }
    }
    return clusters;
}

}  // namespace

TraceResult find_groups(const BinaryRaster& r, const Schematic& s, Connectivity conn) {
    TraceResult out;
    if (s.ink_region.empty()) return out;

    const int w = r.width();
    auto idx = [w](PixelCoord p) { return static_cast<std::size_t>(p.row) * w + p.col; };
    std::vector<std::uint8_t> in_region(static_cast<std::size_t>(w) * r.height(), 0);
    for (const auto& p : s.ink_region) in_region[idx(p)] = 1;

    // Connected components of the schematic's wire ink. Scanning the
    // sorted region list makes ids follow the smallest-pixel order.
    std::vector<int> label(in_region.size(), -1);
    std::vector<PixelCoord> stack;
    std::vector<std::vector<PixelCoord>> region_pixels;
    for (const auto& seed : s.ink_region) {
        if (label[idx(seed)] != -1) continue;
        int id = static_cast<int>(region_pixels.size());
        region_pixels.emplace_back();
        label[idx(seed)] = id;
        stack.push_back(seed);
        while (!stack.empty()) {
            PixelCoord p = stack.back();
            stack.pop_back();
            region_pixels[static_cast<std::size_t>(id)].push_back(p);
            for (const auto& q : neighbors(r, p, conn)) {
                if (in_region[idx(q)] && label[idx(q)] == -1) {
                    label[idx(q)] = id;
                    stack.push_back(q);
                }
            }
        }
    }

    for (std::size_t reg = 0; reg < region_pixels.size(); ++reg) {
        ConnectionGroup g;
        g.region_id = static_cast<int>(reg);
        g.pixels = region_pixels[reg];
        std::sort(g.pixels.begin(), g.pixels.end());

        for (const auto& b : s.boxes) {
            std::vector<PixelCoord> contact_pixels;
            for (const auto& p : g.pixels)
                if (box_pixel_gap(b, p) == 1) contact_pixels.push_back(p);
            if (contact_pixels.empty()) continue;
            g.touched.push_back({b.id, contact_pixels.front()});  // pixels sorted
            if (cluster_count(contact_pixels) > 1)
                out.self_loops.push_back({g.region_id, b.id});
        }
        std::sort(g.touched.begin(), g.touched.end(),
                  [](const Contact& a, const Contact& b) {
                      return a.component_id < b.component_id;
                  });
        out.groups.push_back(std::move(g));
    }
    return out;
}

double contact_angle(const ConnectionGroup& g, const ComponentBox& component) {
    const Contact* contact = nullptr;
    for (const auto& t : g.touched)
        if (t.component_id == component.id) contact = &t;
    if (!contact) throw InvalidInput("contact_angle: component \"" + component.id +
                                     "\" does not touch the region");

    double sum_r = 0.0, sum_c = 0.0;
    int n = 0;
    for (const auto& p : g.pixels) {
        if (manhattan(p, contact->pixel) <= kContactWindowRadius) {
            sum_r += p.row + 0.5;
            sum_c += p.col + 0.5;
            ++n;
        }
    }
    return angle_from_delta(sum_c / n - component.center_x(),
                            sum_r / n - component.center_y());
}

}  // namespace schex
