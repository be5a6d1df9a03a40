#include "schex/raster.hpp"

namespace schex {

BinaryRaster::BinaryRaster(int width, int height, std::vector<std::uint8_t> ink)
    : width_(width), height_(height), ink_(std::move(ink)) {
    if (width_ < 1 || height_ < 1)
        throw InvalidInput("raster dimensions must be at least 1x1");
    if (ink_.size() != static_cast<std::size_t>(width_) * height_)
        throw InvalidInput("raster data size does not match dimensions");
    for (auto& v : ink_) v = v ? 1 : 0;
}

BinaryRaster binarize(const GrayImage& image, int threshold) {
    if (image.width < 1 || image.height < 1 || image.samples.empty())
        throw InvalidInput("binarize: empty image");
    if (image.samples.size() != static_cast<std::size_t>(image.width) * image.height)
        throw InvalidInput("binarize: sample count does not match dimensions");
    if (threshold < 0 || threshold > 255)
        throw InvalidInput("binarize: threshold out of [0,255]");
    std::vector<std::uint8_t> ink(image.samples.size());
    for (std::size_t i = 0; i < ink.size(); ++i)
        ink[i] = image.samples[i] < threshold ? 1 : 0;
    return BinaryRaster(image.width, image.height, std::move(ink));
}

std::vector<PixelCoord> neighbors(const BinaryRaster& r, PixelCoord p, Connectivity conn) {
    if (!r.in_bounds(p)) throw InvalidInput("neighbors: pixel out of bounds");
    std::vector<PixelCoord> out;
    out.reserve(8);
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (conn == Connectivity::Four && dr != 0 && dc != 0) continue;
            PixelCoord q{p.row + dr, p.col + dc};
            if (r.in_bounds(q)) out.push_back(q);
        }
    }
    return out;
}

}  // namespace schex
