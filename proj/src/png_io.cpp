// SPDX-License-Identifier: Apache-2.0
#include "artqr/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

namespace artqr {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp, png_const_charp msg) { throw IoError(std::string("libpng: ") + msg); }
void png_warning_fn(png_structp, png_const_charp) {}

}  // namespace

ColorImage read_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw IoError("cannot open " + path.string());
    png_byte sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw IoError(path.string() + " is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_read_struct(p, i, nullptr); }
    } guard{&png, &info};
    if (!info) throw IoError("png_create_info_struct failed");

    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    try {
        png_read_info(png, info);
        const png_uint_32 width = png_get_image_width(png, info);
        const png_uint_32 height = png_get_image_height(png, info);
        const int color_type = png_get_color_type(png, info);
        const int depth = png_get_bit_depth(png, info);
        if (depth == 16) png_set_strip_16(png);
        if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png);
        png_color_16 white{0, 255, 255, 255, 255};
        png_set_background(png, &white, PNG_BACKGROUND_GAMMA_SCREEN, 0, 1.0);
        png_read_update_info(png, info);
        const std::size_t rowbytes = png_get_rowbytes(png, info);
        if (rowbytes != 3u * width) throw IoError(path.string() + ": unsupported PNG layout");

        std::vector<png_byte> buffer(rowbytes * height);
        std::vector<png_bytep> rows(height);
        for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * rowbytes;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);

        ColorImage image(static_cast<int>(width), static_cast<int>(height));
        for (std::size_t i = 0; i < image.size(); ++i)
            image.pixels()[i] = Rgb{buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
        return image;
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_png(const std::filesystem::path& path, const ColorImage& image) {
    if (image.empty()) throw IoError("refusing to write an empty image to " + path.string());
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw IoError("cannot create " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_write_struct(p, i); }
    } guard{&png, &info};
    if (!info) throw IoError("png_create_info_struct failed");

    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_byte> row(3u * static_cast<std::size_t>(image.width()));
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const Rgb p = image.at(x, y);
            row[3u * static_cast<std::size_t>(x)] = p.r;
            row[3u * static_cast<std::size_t>(x) + 1] = p.g;
            row[3u * static_cast<std::size_t>(x) + 2] = p.b;
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    if (std::fflush(file.get()) != 0) throw IoError("short write to " + path.string());
}

}  // namespace artqr
