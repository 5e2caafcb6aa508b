#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "geosep/error.hpp"
#include "geosep/image.hpp"

namespace geosep {

namespace detail {

inline std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on " + path.string());
    return bytes;
}

struct PngMemoryReader {
    const unsigned char* data;
    std::size_t size;
    std::size_t offset;
};

extern "C" inline void png_memory_read(png_structp png, png_bytep out, png_size_t count) {
    auto* src = static_cast<PngMemoryReader*>(png_get_io_ptr(png));
    if (src->offset + count > src->size) png_error(png, "unexpected end of PNG data");
    std::memcpy(out, src->data + src->offset, count);
    src->offset += count;
}

extern "C" inline void png_quiet_warning(png_structp, png_const_charp) {}

struct PngLayout {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int channels = 0;  // 1 (gray) or 3 (rgb) after transforms
    int bit_depth = 0; // 8 or 16 after transforms
};

inline void configure_png_transforms(png_structp png, png_infop info) {
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);
}

// Both PNG helpers below keep only trivially destructible locals between
// setjmp and any libpng call, so a longjmp never skips a destructor.

inline bool png_read_layout(PngMemoryReader source, PngLayout& layout) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                             png_quiet_warning);
    if (png == nullptr) return false;
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_set_read_fn(png, &source, png_memory_read);
    png_read_info(png, info);
    configure_png_transforms(png, info);
    layout.width = png_get_image_width(png, info);
    layout.height = png_get_image_height(png, info);
    layout.channels = png_get_channels(png, info);
    layout.bit_depth = png_get_bit_depth(png, info);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

inline bool png_read_rows(PngMemoryReader source, unsigned char* pixels, std::size_t row_bytes,
                          png_bytep* rows, png_uint_32 height) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                             png_quiet_warning);
    if (png == nullptr) return false;
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_set_read_fn(png, &source, png_memory_read);
    png_read_info(png, info);
    configure_png_transforms(png, info);
    for (png_uint_32 r = 0; r < height; ++r) rows[r] = pixels + r * row_bytes;
    png_read_image(png, rows);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

inline bool png_write_rows(FILE* file, png_uint_32 width, png_uint_32 height, int color_type,
                           int bit_depth, png_bytep* rows) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                              png_quiet_warning);
    if (png == nullptr) return false;
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_init_io(png, file);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

inline RasterImage decode_png(const std::vector<unsigned char>& bytes, const std::string& name) {
    PngLayout layout;
    if (!png_read_layout({bytes.data(), bytes.size(), 0}, layout)) {
        throw CorruptFileError("corrupt PNG header in " + name);
    }
    if (layout.width == 0 || layout.height == 0) throw CorruptFileError("empty PNG " + name);
    if ((layout.channels != 1 && layout.channels != 3) ||
        (layout.bit_depth != 8 && layout.bit_depth != 16)) {
        throw UnsupportedFormatError("unsupported PNG layout in " + name);
    }
    const std::size_t bytes_per_sample = layout.bit_depth / 8;
    const std::size_t row_bytes = layout.width * layout.channels * bytes_per_sample;
    std::vector<unsigned char> pixels(row_bytes * layout.height);
    std::vector<png_bytep> rows(layout.height);
    if (!png_read_rows({bytes.data(), bytes.size(), 0}, pixels.data(), row_bytes, rows.data(),
                       layout.height)) {
        throw CorruptFileError("corrupt PNG data in " + name);
    }

    const double scale = layout.bit_depth == 16 ? 65535.0 : 255.0;
    auto sample = [&](std::size_t offset) {
        if (bytes_per_sample == 2) {
            return static_cast<double>((pixels[offset] << 8) | pixels[offset + 1]) / scale;
        }
        return static_cast<double>(pixels[offset]) / scale;
    };
    RasterImage img(layout.height, layout.width);
    for (std::size_t r = 0; r < layout.height; ++r) {
        for (std::size_t c = 0; c < layout.width; ++c) {
            const std::size_t base = r * row_bytes + c * layout.channels * bytes_per_sample;
            if (layout.channels == 1) {
                img(r, c) = sample(base);
            } else {
                img(r, c) = 0.299 * sample(base) + 0.587 * sample(base + bytes_per_sample) +
                            0.114 * sample(base + 2 * bytes_per_sample);
            }
        }
    }
    return img;
}

inline RasterImage decode_pgm(const std::vector<unsigned char>& bytes, const std::string& name) {
    std::size_t pos = 2;
    auto skip_space_and_comments = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&]() -> long {
        skip_space_and_comments();
        long value = 0;
        std::size_t digits = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            value = value * 10 + (bytes[pos] - '0');
            ++pos;
            if (++digits > 9) throw CorruptFileError("PGM header value overflow in " + name);
        }
        if (digits == 0) throw CorruptFileError("malformed PGM header in " + name);
        return value;
    };
    const long width = read_int();
    const long height = read_int();
    const long maxval = read_int();
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
        throw CorruptFileError("invalid PGM header values in " + name);
    }
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        throw CorruptFileError("malformed PGM header in " + name);
    }
    ++pos;
    const std::size_t bps = maxval > 255 ? 2 : 1;
    const std::size_t needed = static_cast<std::size_t>(width * height) * bps;
    if (bytes.size() - pos < needed) throw CorruptFileError("truncated PGM data in " + name);
    RasterImage img(static_cast<std::size_t>(height), static_cast<std::size_t>(width));
    for (std::size_t i = 0; i < img.size(); ++i) {
        const std::size_t at = pos + i * bps;
        const unsigned v = bps == 2 ? (bytes[at] << 8) | bytes[at + 1] : bytes[at];
        img.data()[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
    return img;
}

struct FileCloser {
    void operator()(FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};

inline void write_png(const std::filesystem::path& path, std::size_t width, std::size_t height,
                      int color_type, int bit_depth, std::vector<unsigned char>& pixels) {
    const std::size_t row_bytes = pixels.size() / height;
    std::vector<png_bytep> rows(height);
    for (std::size_t r = 0; r < height; ++r) rows[r] = pixels.data() + r * row_bytes;
    std::unique_ptr<FILE, FileCloser> file(std::fopen(path.string().c_str(), "wb"));
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    if (!png_write_rows(file.get(), static_cast<png_uint_32>(width),
                        static_cast<png_uint_32>(height), color_type, bit_depth, rows.data())) {
        throw IoError("PNG encoding failed for " + path.string());
    }
    if (std::fflush(file.get()) != 0) throw IoError("write failure on " + path.string());
}

} // namespace detail

/// Reads an 8/16-bit PNG (gray, gray+alpha, RGB, RGBA, palette) or a binary PGM (P5)
/// into [0, 1]. Color is reduced to luminance 0.299 R + 0.587 G + 0.114 B.
inline RasterImage load_image(const std::filesystem::path& path) {
    const auto bytes = detail::read_file_bytes(path);
    static constexpr unsigned char png_signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_signature, 8) == 0) {
        return detail::decode_png(bytes, path.string());
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
        return detail::decode_pgm(bytes, path.string());
    }
    throw UnsupportedFormatError("not a PNG or binary PGM file: " + path.string());
}

/// Writes a 16-bit grayscale PNG; values are clamped to [0, 1] first.
inline void save_image(const RasterImage& img, const std::filesystem::path& path) {
    require_nonempty(img.height(), img.width(), "save_image");
    if (!all_finite(img)) throw NumericError("save_image: image contains non-finite values");
    std::vector<unsigned char> pixels(img.size() * 2);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(img.data()[i], 0.0, 1.0);
        const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
        pixels[2 * i] = static_cast<unsigned char>(q >> 8);
        pixels[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
    }
    detail::write_png(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 16, pixels);
}

/// Writes interleaved 8-bit RGB pixels (row-major, 3 bytes per pixel).
inline void save_rgb_png(std::vector<unsigned char> rgb, std::size_t width, std::size_t height,
                         const std::filesystem::path& path) {
    if (rgb.size() != width * height * 3) throw DimensionError("save_rgb_png: buffer size mismatch");
    detail::write_png(path, width, height, PNG_COLOR_TYPE_RGB, 8, rgb);
}

} // namespace geosep
