// SPDX-License-Identifier: Apache-2.0
#include "artqr/image.hpp"

#include <algorithm>
#include <cmath>

namespace artqr {

ColorImage resize_bilinear(const ColorImage& src, int width, int height) {
    if (src.empty() || width <= 0 || height <= 0)
        throw DimensionMismatch("resize_bilinear: empty source or target");
    ColorImage out(width, height);
    const double sx = static_cast<double>(src.width()) / width;
    const double sy = static_cast<double>(src.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height() - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, src.height() - 1);
        const double wy = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width() - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, src.width() - 1);
            const double wx = fx - x0;
            auto mix = [&](auto channel) {
                const double top = (1 - wx) * channel(src.at(x0, y0)) + wx * channel(src.at(x1, y0));
                const double bot = (1 - wx) * channel(src.at(x0, y1)) + wx * channel(src.at(x1, y1));
                return clamp_u8((1 - wy) * top + wy * bot);
            };
            out.at(x, y) = Rgb{mix([](Rgb p) { return double(p.r); }),
                               mix([](Rgb p) { return double(p.g); }),
                               mix([](Rgb p) { return double(p.b); })};
        }
    }
    return out;
}

ColorImage crop(const ColorImage& src, int x0, int y0, int width, int height) {
    if (x0 < 0 || y0 < 0 || width < 0 || height < 0 || x0 + width > src.width() ||
        y0 + height > src.height())
        throw DimensionMismatch("crop: rectangle outside the image");
    ColorImage out(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) out.at(x, y) = src.at(x0 + x, y0 + y);
    return out;
}

ColorImage pad(const ColorImage& src, int pad, Rgb fill) {
    ColorImage out(src.width() + 2 * pad, src.height() + 2 * pad, fill);
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x) out.at(x + pad, y + pad) = src.at(x, y);
    return out;
}

ColorImage gray_to_color(const GrayImage& gray) {
    ColorImage out(gray.width(), gray.height());
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const auto v = clamp_u8(gray.pixels()[i]);
        out.pixels()[i] = Rgb{v, v, v};
    }
    return out;
}

}  // namespace artqr
