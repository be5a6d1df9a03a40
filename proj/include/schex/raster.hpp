#pragma once

#include <cstdint>
#include <vector>

#include "schex/common.hpp"

namespace schex {

// Single-channel 8-bit image, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> samples;
};

// Immutable 2D ink mask (1 = ink, 0 = background). All queries are pure,
// so one raster can be shared freely across worker threads.
class BinaryRaster {
public:
    BinaryRaster(int width, int height, std::vector<std::uint8_t> ink);

    int width() const { return width_; }
    int height() const { return height_; }

    bool in_bounds(PixelCoord p) const {
        return p.row >= 0 && p.row < height_ && p.col >= 0 && p.col < width_;
    }

    bool ink(int row, int col) const {
        return ink_[static_cast<std::size_t>(row) * width_ + col] != 0;
    }
    bool ink(PixelCoord p) const { return ink(p.row, p.col); }

    const std::vector<std::uint8_t>& data() const { return ink_; }

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> ink_;
};

// Ink iff sample < threshold; dimensions preserved.
BinaryRaster binarize(const GrayImage& image, int threshold = kDefaultThreshold);

// In-bounds neighbors of p in row-major order. Never contains p itself.
std::vector<PixelCoord> neighbors(const BinaryRaster& r, PixelCoord p,
                                  Connectivity conn = kDefaultConnectivity);

}  // namespace schex
