#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "schex/raster.hpp"
#include "schex/schema.hpp"

namespace schex::testutil {

// Raster from ASCII art: '#' = ink, anything else = background.
inline BinaryRaster raster_from(const std::vector<std::string>& rows) {
    int h = static_cast<int>(rows.size());
    int w = static_cast<int>(rows[0].size());
    std::vector<std::uint8_t> ink(static_cast<std::size_t>(w) * h, 0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] == '#')
                ink[static_cast<std::size_t>(r) * w + c] = 1;
    return BinaryRaster(w, h, std::move(ink));
}

inline GrayImage image_from(const std::vector<std::string>& rows) {
    GrayImage img;
    img.height = static_cast<int>(rows.size());
    img.width = static_cast<int>(rows[0].size());
    for (const auto& row : rows)
        for (char ch : row) img.samples.push_back(ch == '#' ? 0 : 255);
    return img;
}

inline ComponentBox box(const std::string& id, ComponentCategory cat, int x0, int y0, int x1,
                        int y1, Orientation o = Orientation::R0) {
    ComponentBox b;
    b.id = id;
    b.category = cat;
    b.orientation = o;
    b.x0 = x0;
    b.y0 = y0;
    b.x1 = x1;
    b.y1 = y1;
    return b;
}

// Blank canvas helpers for building wire patterns programmatically.
struct Canvas {
    int width, height;
    std::vector<std::uint8_t> ink;

    Canvas(int w, int h) : width(w), height(h), ink(static_cast<std::size_t>(w) * h, 0) {}

    void set(int row, int col) { ink[static_cast<std::size_t>(row) * width + col] = 1; }

    void hline(int row, int c0, int c1, int w = 1) {
        for (int dy = -(w / 2); dy <= (w - 1) / 2; ++dy)
            for (int c = std::min(c0, c1); c <= std::max(c0, c1); ++c) set(row + dy, c);
    }
    void vline(int col, int r0, int r1, int w = 1) {
        for (int dx = -(w / 2); dx <= (w - 1) / 2; ++dx)
            for (int r = std::min(r0, r1); r <= std::max(r0, r1); ++r) set(r, col + dx);
    }

    BinaryRaster raster() const { return BinaryRaster(width, height, ink); }
};

}  // namespace schex::testutil
