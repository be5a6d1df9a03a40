#include "schex/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>

namespace schex {

void RgbImage::fill(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i + 2 < pixels.size(); i += 3) {
        pixels[i] = r;
        pixels[i + 1] = g;
        pixels[i + 2] = b;
    }
}

void RgbImage::set(int row, int col, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    std::size_t i = (static_cast<std::size_t>(row) * width + col) * 3;
    pixels[i] = r;
    pixels[i + 1] = g;
    pixels[i + 2] = b;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open file: " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write file: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InvalidInput("short write: " + path);
}

namespace {

// Skips PGM whitespace and '#' comments, then parses one decimal token.
int pgm_token(const std::vector<std::uint8_t>& b, std::size_t& pos) {
    while (pos < b.size()) {
        if (std::isspace(b[pos])) {
            ++pos;
        } else if (b[pos] == '#') {
            while (pos < b.size() && b[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    if (pos >= b.size() || !std::isdigit(b[pos])) throw ParseError("PGM: expected integer");
    long v = 0;
    while (pos < b.size() && std::isdigit(b[pos])) {
        v = v * 10 + (b[pos] - '0');
        if (v > 1'000'000'000) throw ParseError("PGM: integer out of range");
        ++pos;
    }
    return static_cast<int>(v);
}

GrayImage decode_png(const std::vector<std::uint8_t>& bytes) {
    png_image img;
    std::memset(&img, 0, sizeof(img));
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
        throw ParseError(std::string("PNG: ") + img.message);

    bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
    img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
        std::string msg = img.message;
        png_image_free(&img);
        throw ParseError("PNG: " + msg);
    }

    GrayImage out;
    out.width = static_cast<int>(img.width);
    out.height = static_cast<int>(img.height);
    out.samples.resize(static_cast<std::size_t>(out.width) * out.height);
    if (color) {
        for (std::size_t i = 0; i < out.samples.size(); ++i) {
            // Rec. 601 luminance, rounded.
            double y = 0.299 * buf[i * 3] + 0.587 * buf[i * 3 + 1] + 0.114 * buf[i * 3 + 2];
            out.samples[i] = static_cast<std::uint8_t>(y + 0.5);
        }
    } else {
        out.samples.assign(buf.begin(), buf.end());
    }
    return out;
}

}  // namespace

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw ParseError("PGM: missing P5 magic");
    std::size_t pos = 2;
    GrayImage out;
    out.width = pgm_token(bytes, pos);
    out.height = pgm_token(bytes, pos);
    int maxval = pgm_token(bytes, pos);
    if (out.width < 1 || out.height < 1) throw ParseError("PGM: bad dimensions");
    if (maxval < 1 || maxval > 255) throw ParseError("PGM: only 8-bit maxval supported");
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw ParseError("PGM: bad header");
    ++pos;  // single whitespace byte before raster data
    std::size_t need = static_cast<std::size_t>(out.width) * out.height;
    if (bytes.size() - pos < need) throw ParseError("PGM: truncated pixel data");
    out.samples.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                       bytes.begin() + static_cast<std::ptrdiff_t>(pos + need));
    if (maxval != 255) {
        for (auto& s : out.samples)
            s = static_cast<std::uint8_t>(s * 255 / maxval);
    }
    return out;
}

GrayImage load_image(const std::string& path) {
    std::vector<std::uint8_t> bytes = read_file_bytes(path);
    if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' &&
        bytes[3] == 'G')
        return decode_png(bytes);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes);
    throw ParseError("unsupported image format (expected PNG or binary PGM): " + path);
}

void write_pgm(const std::string& path, const GrayImage& image) {
    std::string header = "P5\n" + std::to_string(image.width) + " " +
                         std::to_string(image.height) + "\n255\n";
    std::string out = header;
    out.append(reinterpret_cast<const char*>(image.samples.data()), image.samples.size());
    write_file_bytes(path, out);
}

void write_png_rgb(const std::string& path, const RgbImage& image) {
    png_image img;
    std::memset(&img, 0, sizeof(img));
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width);
    img.height = static_cast<png_uint_32>(image.height);
    img.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&img, path.c_str(), 0, image.pixels.data(), 0, nullptr))
        throw Error(std::string("PNG write: ") + img.message);
}

}  // namespace schex
