#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schex/raster.hpp"

namespace schex {

// 24-bit interleaved RGB buffer used for overlays.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // 3 bytes per pixel, row-major

    void fill(std::uint8_t r, std::uint8_t g, std::uint8_t b);
    void set(int row, int col, std::uint8_t r, std::uint8_t g, std::uint8_t b);
};

// Reads PNG (8-bit gray or 24-bit color) or binary PGM (P5), selected by
// file contents. Color is reduced to luminance with Rec. 601 weights.
GrayImage load_image(const std::string& path);

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes);

void write_pgm(const std::string& path, const GrayImage& image);
void write_png_rgb(const std::string& path, const RgbImage& image);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::string& bytes);

}  // namespace schex
