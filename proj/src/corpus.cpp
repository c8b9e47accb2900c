// SPDX-License-Identifier: Apache-2.0
#include "artqr/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace artqr {
namespace {

struct Color {
    double r, g, b;
};

Color mix(Color a, Color b, double t) {
    return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform in [0, 1) from a seed and two lattice coordinates.
double hash01(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
    const std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(ix) * 0x632BE59BD9B4E019ULL ^
                                                         static_cast<std::uint64_t>(iy) * 0x85157AF5ULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(std::uint64_t seed, double x, double y) {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iy = static_cast<std::int64_t>(fy);
    const double tx = smooth(x - fx);
    const double ty = smooth(y - fy);
    const double a = hash01(seed, ix, iy);
    const double b = hash01(seed, ix + 1, iy);
    const double c = hash01(seed, ix, iy + 1);
    const double d = hash01(seed, ix + 1, iy + 1);
    return (a + (b - a) * tx) * (1 - ty) + (c + (d - c) * tx) * ty;
}

double fbm(std::uint64_t seed, double x, double y, int octaves) {
    double sum = 0.0, amp = 0.5, norm = 0.0;
    for (int o = 0; o < octaves; ++o) {
        sum += amp * value_noise(seed + static_cast<std::uint64_t>(o), x, y);
        norm += amp;
        amp *= 0.5;
        x *= 2.0;
        y *= 2.0;
    }
    return sum / norm;
}

class Palette {
public:
    explicit Palette(std::uint64_t seed) : seed_(seed) {}
    Color color(int i) const {
        return {40 + 215 * hash01(seed_, i, 0), 40 + 215 * hash01(seed_, i, 1), 40 + 215 * hash01(seed_, i, 2)};
    }
    double uniform(int i) const { return hash01(seed_, i, 7); }

private:
    std::uint64_t seed_;
};

using Painter = Color (*)(const Palette&, std::uint64_t, double, double);

Color radial_gradient(const Palette& p, std::uint64_t, double u, double v) {
    const double cx = 0.2 + 0.6 * p.uniform(0);
    const double cy = 0.2 + 0.6 * p.uniform(1);
    const double d = std::min(1.0, std::hypot(u - cx, v - cy) / 0.9);
    return d < 0.5 ? mix(p.color(0), p.color(1), d * 2) : mix(p.color(1), p.color(2), d * 2 - 1);
}

Color landscape(const Palette& p, std::uint64_t seed, double u, double v) {
    const double horizon = 0.35 + 0.25 * fbm(seed, u * 3, 0.5, 4);
    if (v < horizon) return mix(p.color(0), Color{235, 240, 250}, v / horizon);
    const double h = fbm(seed + 11, u * 6, v * 6, 5);
    return mix(p.color(1), p.color(2), h);
}

Color plasma(const Palette& p, std::uint64_t, double u, double v) {
    const double k = 6 + 6 * p.uniform(0);
    const double s = std::sin(u * k) + std::sin(v * k * 0.8) + std::sin((u + v) * k * 0.6) +
                     std::sin(std::hypot(u - 0.5, v - 0.5) * k * 1.5);
    const double t = (s + 4) / 8;
    return t < 0.5 ? mix(p.color(0), p.color(1), t * 2) : mix(p.color(1), p.color(2), t * 2 - 1);
}

Color soft_circles(const Palette& p, std::uint64_t seed, double u, double v) {
    Color c = mix(p.color(0), p.color(1), v);
    for (int i = 0; i < 7; ++i) {
        const double cx = hash01(seed, i, 100);
        const double cy = hash01(seed, i, 101);
        const double r = 0.08 + 0.15 * hash01(seed, i, 102);
        const double d = std::hypot(u - cx, v - cy) / r;
        if (d < 1.2) c = mix(c, p.color(3 + i % 3), std::clamp((1.2 - d) / 0.4, 0.0, 1.0) * 0.85);
    }
    return c;
}

Color stripes(const Palette& p, std::uint64_t seed, double u, double v) {
    const double angle = p.uniform(0) * std::numbers::pi;
    const double t = u * std::cos(angle) + v * std::sin(angle) + 0.05 * fbm(seed, u * 8, v * 8, 3);
    const double band = 0.5 + 0.5 * std::sin(t * 2 * std::numbers::pi * (3 + 4 * p.uniform(1)));
    return mix(p.color(0), p.color(1), band);
}

Color sunset(const Palette& p, std::uint64_t seed, double u, double v) {
    const Color sky = v < 0.5 ? mix(Color{250, 200, 120}, p.color(0), v * 2) : mix(p.color(0), Color{40, 30, 70}, v * 2 - 1);
    const double sun = std::hypot(u - 0.5, v - 0.62);
    Color c = sun < 0.12 ? mix(Color{255, 240, 190}, sky, sun / 0.12) : sky;
    const double ridge = 0.7 + 0.1 * fbm(seed, u * 5, 1.0, 4);
    if (v > ridge) c = mix(Color{30, 25, 40}, p.color(1), 0.3 * fbm(seed + 3, u * 20, v * 20, 2));
    return c;
}

Color blurred_checker(const Palette& p, std::uint64_t, double u, double v) {
    const double n = 4 + std::floor(5 * p.uniform(0));
    const double s = std::sin(u * n * std::numbers::pi) * std::sin(v * n * std::numbers::pi);
    return mix(p.color(0), p.color(1), 0.5 + 0.5 * std::tanh(s * 3));
}

Color voronoi(const Palette& p, std::uint64_t seed, double u, double v) {
    double best = 1e9, second = 1e9;
    int owner = 0;
    for (int i = 0; i < 16; ++i) {
        const double d = std::hypot(u - hash01(seed, i, 200), v - hash01(seed, i, 201));
        if (d < best) {
            second = best;
            best = d;
            owner = i;
        } else if (d < second) {
            second = d;
        }
    }
    if (second - best < 0.008) return {25, 25, 30};
    return p.color(owner % 6);
}

Color shapes(const Palette& p, std::uint64_t seed, double u, double v) {
    Color c = mix(p.color(0), p.color(5), 0.3 * fbm(seed, u * 4, v * 4, 3));
    for (int i = 0; i < 6; ++i) {
        const double cx = hash01(seed, i, 300);
        const double cy = hash01(seed, i, 301);
        const double s = 0.06 + 0.14 * hash01(seed, i, 302);
        const bool inside = (i % 2 == 0) ? std::max(std::abs(u - cx), std::abs(v - cy)) < s
                                         : std::abs(u - cx) + std::abs(v - cy) < s * 1.3;
        if (inside) c = p.color(1 + i % 4);
    }
    return c;
}

Color marble(const Palette& p, std::uint64_t seed, double u, double v) {
    const double t = 0.5 + 0.5 * std::sin((u + 2.5 * fbm(seed, u * 3, v * 3, 5)) * 10);
    return mix(p.color(0), Color{245, 242, 235}, t);
}

struct Entry {
    const char* family;
    Painter paint;
};

constexpr std::array<Entry, 10> kFamilies{{
    {"radial", radial_gradient},
    {"landscape", landscape},
    {"plasma", plasma},
    {"circles", soft_circles},
    {"stripes", stripes},
    {"sunset", sunset},
    {"checker", blurred_checker},
    {"voronoi", voronoi},
    {"shapes", shapes},
    {"marble", marble},
}};

void check_index(int index) {
    if (index < 0 || index >= kCorpusCount) throw std::out_of_range("corpus index out of range");
}

}  // namespace

ColorImage corpus_image(int index, int size) {
    check_index(index);
    if (size <= 0) throw std::invalid_argument("corpus image size must be positive");
    const Entry& entry = kFamilies[static_cast<std::size_t>(index) % kFamilies.size()];
    const std::uint64_t seed = splitmix64(0xA57ECu + static_cast<std::uint64_t>(index));
    const Palette palette(seed);
    const auto n = static_cast<std::size_t>(size) * static_cast<std::size_t>(size);

    // Dead-leaves occlusion: opaque discs with a scale-invariant size law
    // (density ~ r^-3) laid front to back, colors drawn i.i.d. from a palette
    // sampled off the family backdrop. The model reproduces the edge and
    // texture statistics of natural photographs.
    std::vector<Color> leaf_colors;
    for (int i = 0; i < 8; ++i)
        leaf_colors.push_back(entry.paint(palette, seed, hash01(seed, i, 500), hash01(seed, i, 501)));
    const double rmin = 3.0 * size / 512.0;
    const double rmax = 120.0 * size / 512.0;
    std::vector<Color> canvas(n);
    std::vector<std::uint8_t> covered(n, 0);
    std::size_t remaining = n;
    for (std::int64_t leaf = 0; leaf < 8000 && remaining > 0; ++leaf) {
        const double u = hash01(seed, leaf, 400);
        const double r = 1.0 / std::sqrt(1.0 / (rmin * rmin) - u * (1.0 / (rmin * rmin) - 1.0 / (rmax * rmax)));
        const double cx = -r + (size + 2 * r) * hash01(seed, leaf, 401);
        const double cy = -r + (size + 2 * r) * hash01(seed, leaf, 402);
        const double shade = 0.75 + 0.4 * hash01(seed, leaf, 403);
        const Color& base = leaf_colors[static_cast<std::size_t>(hash01(seed, leaf, 404) * leaf_colors.size())];
        const Color c{base.r * shade, base.g * shade, base.b * shade};
        const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
        const int x1 = std::min(size - 1, static_cast<int>(std::ceil(cx + r)));
        const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
        const int y1 = std::min(size - 1, static_cast<int>(std::ceil(cy + r)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * size + static_cast<std::size_t>(x);
                if (covered[i] || (x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r) continue;
                covered[i] = 1;
                canvas[i] = c;
                --remaining;
            }
    }
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * size + static_cast<std::size_t>(x);
            if (!covered[i]) canvas[i] = entry.paint(palette, seed, (x + 0.5) / size, (y + 0.5) / size);
        }

    // slight optical blur (3x3 binomial) plus sensor grain
    ColorImage img(size, size);
    constexpr double kTap[3] = {0.25, 0.5, 0.25};
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            Color acc{0, 0, 0};
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int sx = std::clamp(x + dx, 0, size - 1);
                    const int sy = std::clamp(y + dy, 0, size - 1);
                    const Color& c = canvas[static_cast<std::size_t>(sy) * size + static_cast<std::size_t>(sx)];
                    const double w = kTap[dx + 1] * kTap[dy + 1];
                    acc = {acc.r + w * c.r, acc.g + w * c.g, acc.b + w * c.b};
                }
            const double u1 = std::max(hash01(seed + 1, x, y), 1e-12);
            const double grain = 3.0 * std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * hash01(seed + 2, x, y));
            img.at(x, y) = Rgb{clamp_u8(acc.r + grain), clamp_u8(acc.g + grain), clamp_u8(acc.b + grain)};
        }
    return img;
}

std::string corpus_name(int index) {
    check_index(index);
    std::string name = std::to_string(index);
    if (name.size() < 2) name.insert(0, "0");
    return name + "-" + kFamilies[static_cast<std::size_t>(index) % kFamilies.size()].family;
}

}  // namespace artqr
