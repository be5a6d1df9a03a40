#include "schex/segment.hpp"

#include <algorithm>
#include <numeric>

namespace schex {

namespace {

// Disjoint-set over box indices.
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

std::vector<PixelCoord> wire_pixels(const BinaryRaster& r,
                                    const std::vector<ComponentBox>& boxes) {
    std::vector<std::uint8_t> covered(static_cast<std::size_t>(r.width()) * r.height(), 0);
    for (const auto& b : boxes) {
        for (int row = b.y0; row < b.y1; ++row)
            for (int col = b.x0; col < b.x1; ++col)
                covered[static_cast<std::size_t>(row) * r.width() + col] = 1;
    }
    std::vector<PixelCoord> out;
    for (int row = 0; row < r.height(); ++row)
        for (int col = 0; col < r.width(); ++col)
            if (r.ink(row, col) && !covered[static_cast<std::size_t>(row) * r.width() + col])
                out.push_back({row, col});
    return out;
}

SegmentResult segment_page(const BinaryRaster& r, const std::vector<ComponentBox>& boxes,
                           const std::string& page_ref, Connectivity conn) {
    const int w = r.width();
    const std::vector<PixelCoord> wires = wire_pixels(r, boxes);

    // Label connected wire regions with an iterative fill; recursion is
    // unsafe on page-sized regions.
    std::vector<int> label(static_cast<std::size_t>(w) * r.height(), -1);
    auto idx = [w](PixelCoord p) { return static_cast<std::size_t>(p.row) * w + p.col; };
    std::vector<std::uint8_t> is_wire(label.size(), 0);
    for (const auto& p : wires) is_wire[idx(p)] = 1;

    int region_count = 0;
    std::vector<PixelCoord> stack;
    for (const auto& seed : wires) {
        if (label[idx(seed)] != -1) continue;
        int id = region_count++;
        label[idx(seed)] = id;
        stack.push_back(seed);
        while (!stack.empty()) {
            PixelCoord p = stack.back();
            stack.pop_back();
            for (const auto& q : neighbors(r, p, conn)) {
                if (is_wire[idx(q)] && label[idx(q)] == -1) {
                    label[idx(q)] = id;
                    stack.push_back(q);
                }
            }
        }
    }

    std::vector<std::vector<PixelCoord>> region_pixels(region_count);
    for (const auto& p : wires) region_pixels[static_cast<std::size_t>(label[idx(p)])].push_back(p);

    // A region belongs to a box's cluster when any of its pixels is
    // 8-adjacent to the box border (diagonal corner contact included).
    std::vector<std::vector<int>> region_boxes(region_count);
    UnionFind uf(boxes.size());
    for (int reg = 0; reg < region_count; ++reg) {
        const auto& pixels = region_pixels[static_cast<std::size_t>(reg)];
        int rmin = r.height(), rmax = -1, cmin = r.width(), cmax = -1;
        for (const auto& p : pixels) {
            rmin = std::min(rmin, p.row);
            rmax = std::max(rmax, p.row);
            cmin = std::min(cmin, p.col);
            cmax = std::max(cmax, p.col);
        }
        for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
            const auto& b = boxes[bi];
            if (b.x0 - 1 > cmax || b.x1 + 1 <= cmin || b.y0 - 1 > rmax || b.y1 + 1 <= rmin)
                continue;
            bool touches = false;
            for (const auto& p : pixels) {
                if (box_pixel_gap(b, p) == 1) {
                    touches = true;
                    break;
                }
            }
            if (touches) region_boxes[static_cast<std::size_t>(reg)].push_back(static_cast<int>(bi));
        }
        const auto& rb = region_boxes[static_cast<std::size_t>(reg)];
        for (std::size_t i = 1; i < rb.size(); ++i) uf.unite(rb[0], rb[i]);
    }

    SegmentResult out;
    if (boxes.empty()) {
        for (const auto& reg : region_pixels) out.stray_ink_pixels += static_cast<int>(reg.size());
        return out;
    }

    // Gather classes, then order them by the smallest (y0, x0) they contain.
    std::vector<std::vector<std::size_t>> members;
    std::vector<int> root_to_class(boxes.size(), -1);
    for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
        int root = uf.find(static_cast<int>(bi));
        if (root_to_class[static_cast<std::size_t>(root)] == -1) {
            root_to_class[static_cast<std::size_t>(root)] = static_cast<int>(members.size());
            members.emplace_back();
        }
        members[static_cast<std::size_t>(root_to_class[static_cast<std::size_t>(root)])]
            .push_back(bi);
    }
    std::vector<std::pair<std::pair<int, int>, std::size_t>> order;
    for (std::size_t ci = 0; ci < members.size(); ++ci) {
        std::pair<int, int> key{boxes[members[ci][0]].y0, boxes[members[ci][0]].x0};
        for (std::size_t bi : members[ci])
            key = std::min(key, std::pair<int, int>{boxes[bi].y0, boxes[bi].x0});
        order.push_back({key, ci});
    }
    std::sort(order.begin(), order.end());

    std::vector<int> class_of_root(boxes.size(), -1);
    std::vector<int> out_index(members.size(), -1);
    for (std::size_t rank = 0; rank < order.size(); ++rank)
        out_index[order[rank].second] = static_cast<int>(rank);

    out.schematics.resize(members.size());
    for (std::size_t ci = 0; ci < members.size(); ++ci) {
        Schematic& s = out.schematics[static_cast<std::size_t>(out_index[ci])];
        s.page_ref = page_ref;
        auto sorted_members = members[ci];
        std::sort(sorted_members.begin(), sorted_members.end());
        for (std::size_t bi : sorted_members) s.boxes.push_back(boxes[bi]);
    }
    for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
        int root = uf.find(static_cast<int>(bi));
        class_of_root[bi] =
            out_index[static_cast<std::size_t>(root_to_class[static_cast<std::size_t>(root)])];
    }

    for (int reg = 0; reg < region_count; ++reg) {
        const auto& rb = region_boxes[static_cast<std::size_t>(reg)];
        auto& pixels = region_pixels[static_cast<std::size_t>(reg)];
        if (rb.empty()) {
            out.stray_ink_pixels += static_cast<int>(pixels.size());
            continue;
        }
        Schematic& s = out.schematics[static_cast<std::size_t>(
            class_of_root[static_cast<std::size_t>(rb[0])])];
        s.ink_region.insert(s.ink_region.end(), pixels.begin(), pixels.end());
    }
    for (auto& s : out.schematics) std::sort(s.ink_region.begin(), s.ink_region.end());
    return out;
}

}  // namespace schex
