// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "artqr/errors.hpp"

namespace artqr {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major pixel raster.
template <typename Pixel>
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, Pixel fill = Pixel{})
        : width_(width), height_(height),
          pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
        if (width < 0 || height < 0) throw DimensionMismatch("negative raster dimensions");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    Pixel& at(int x, int y) { return pixels_[index(x, y)]; }
    const Pixel& at(int x, int y) const { return pixels_[index(x, y)]; }

    std::vector<Pixel>& pixels() noexcept { return pixels_; }
    const std::vector<Pixel>& pixels() const noexcept { return pixels_; }

    bool same_shape(const Raster& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }
    template <typename Other>
    bool same_shape(const Raster<Other>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<Pixel> pixels_;
};

/// 8-bit RGB image.
using ColorImage = Raster<Rgb>;

/// Real-valued grayscale image in [0, 255]; values are not rounded.
using GrayImage = Raster<double>;

template <typename A, typename B>
void require_same_shape(const Raster<A>& a, const Raster<B>& b, const char* what) {
    if (a.width() != b.width() || a.height() != b.height())
        throw DimensionMismatch(std::string(what) + ": raster dimensions differ");
}

/// Bilinear resample to an arbitrary size (pixel-center aligned).
ColorImage resize_bilinear(const ColorImage& src, int width, int height);

/// Copy of `src` cropped to the given rectangle.
ColorImage crop(const ColorImage& src, int x0, int y0, int width, int height);

/// Adds a solid border of `pad` pixels on every side.
ColorImage pad(const ColorImage& src, int pad, Rgb fill);

/// Renders a gray raster as an achromatic color image (rounded, clamped).
ColorImage gray_to_color(const GrayImage& gray);

inline std::uint8_t clamp_u8(double v) noexcept {
    if (!(v > 0.0)) return 0;
    if (v >= 255.0) return 255;
    return static_cast<std::uint8_t>(v + 0.5);
}

}  // namespace artqr
