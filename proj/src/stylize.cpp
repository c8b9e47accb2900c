// SPDX-License-Identifier: Apache-2.0
#include "artqr/stylize.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "artqr/png_io.hpp"

extern char** environ;

namespace artqr {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

// Bayer 8x8 ordered-dither matrix.
constexpr std::array<std::array<int, 8>, 8> kBayer = {{
    {{0, 32, 8, 40, 2, 34, 10, 42}},
    {{48, 16, 56, 24, 50, 18, 58, 26}},
    {{12, 44, 4, 36, 14, 46, 6, 38}},
    {{60, 28, 52, 20, 62, 30, 54, 22}},
    {{3, 35, 11, 43, 1, 33, 9, 41}},
    {{51, 19, 59, 27, 49, 17, 57, 25}},
    {{15, 47, 7, 39, 13, 45, 5, 37}},
    {{63, 31, 55, 23, 61, 29, 53, 21}},
}};

template <typename F>
ColorImage per_channel(const ColorImage& in, F&& fn) {
    ColorImage out(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            const Rgb p = in.at(x, y);
            out.at(x, y) = Rgb{fn(p.r, x, y), fn(p.g, x, y), fn(p.b, x, y)};
        }
    }
    return out;
}

int int_param(const StylizerSpec& spec, const std::string& key, double fallback, int lo, int hi) {
    const double v = spec.param(key, fallback);
    if (v != std::floor(v) || v < lo || v > hi)
        throw StylizerFailure(spec.name + ": parameter " + key + " must be an integer in [" + std::to_string(lo) +
                              ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

}  // namespace

StylizerSpec StylizerSpec::parse(std::string_view text) {
    StylizerSpec spec;
    const auto colon = text.find(':');
    spec.name = trim(text.substr(0, colon));
    if (spec.name.empty()) throw std::invalid_argument("stylizer name is empty");
    if (colon == std::string_view::npos) return spec;
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("stylizer parameter '" + std::string(item) + "' lacks '='");
        const std::string key = trim(item.substr(0, eq));
        const std::string value = trim(item.substr(eq + 1));
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (key.empty() || used != value.size() || value.empty())
            throw std::invalid_argument("malformed stylizer parameter '" + std::string(item) + "'");
        spec.params[key] = v;
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return spec;
}

std::string StylizerSpec::describe() const {
    std::ostringstream os;
    os << name;
    char sep = ':';
    for (const auto& [k, v] : params) {
        os << sep << k << '=' << v;
        sep = ',';
    }
    return os.str();
}

double StylizerSpec::param(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

const std::vector<BuiltinStylizer>& builtin_stylizers() {
    static const std::vector<BuiltinStylizer> list = {
        {"identity", "returns the input unchanged", {}},
        {"posterize", "quantizes each channel to `levels` evenly spaced values", {{"levels", 4}}},
        {"soften", "separable Gaussian blur with standard deviation `sigma` pixels", {{"sigma", 2}}},
        {"hue-rotate", "rotates HSV hue by `degrees`, keeping saturation and value", {{"degrees", 120}}},
        {"halftone", "8x8 Bayer ordered dither to `levels` values per channel", {{"levels", 2}}},
    };
    return list;
}

ColorImage posterize(const ColorImage& input, int levels) {
    if (levels < 2 || levels > 256) throw StylizerFailure("posterize: levels must be in [2, 256]");
    const double step = 255.0 / (levels - 1);
    return per_channel(input, [step](std::uint8_t v, int, int) {
        return clamp_u8(std::round(v / step) * step);
    });
}

ColorImage gaussian_soften(const ColorImage& input, double sigma_px) {
    if (!(sigma_px >= 0.0) || sigma_px > 50.0) throw StylizerFailure("soften: sigma must be in [0, 50]");
    if (sigma_px == 0.0) return input;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma_px));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double total = 0;
    for (int i = -radius; i <= radius; ++i) {
        taps[static_cast<std::size_t>(i + radius)] = std::exp(-(i * i) / (2 * sigma_px * sigma_px));
        total += taps[static_cast<std::size_t>(i + radius)];
    }
    for (double& t : taps) t /= total;

    const int w = input.width();
    const int h = input.height();
    std::vector<std::array<double, 3>> tmp(input.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::array<double, 3> acc{};
            for (int i = -radius; i <= radius; ++i) {
                const Rgb p = input.at(std::clamp(x + i, 0, w - 1), y);
                const double t = taps[static_cast<std::size_t>(i + radius)];
                acc[0] += t * p.r;
                acc[1] += t * p.g;
                acc[2] += t * p.b;
            }
            tmp[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = acc;
        }
    }
    ColorImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::array<double, 3> acc{};
            for (int i = -radius; i <= radius; ++i) {
                const auto& p = tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * static_cast<std::size_t>(w) +
                                    static_cast<std::size_t>(x)];
                const double t = taps[static_cast<std::size_t>(i + radius)];
                for (int c = 0; c < 3; ++c) acc[static_cast<std::size_t>(c)] += t * p[static_cast<std::size_t>(c)];
            }
            out.at(x, y) = Rgb{clamp_u8(acc[0]), clamp_u8(acc[1]), clamp_u8(acc[2])};
        }
    }
    return out;
}

ColorImage hue_rotate(const ColorImage& input, double degrees) {
    ColorImage out(input.width(), input.height());
    for (std::size_t i = 0; i < input.size(); ++i) {
        const Rgb p = input.pixels()[i];
        const double r = p.r / 255.0;
        const double g = p.g / 255.0;
        const double b = p.b / 255.0;
        const double v = std::max({r, g, b});
        const double c = v - std::min({r, g, b});
        if (c == 0.0) {
            out.pixels()[i] = p;
            continue;
        }
        double hue;
        if (v == r)
            hue = 60.0 * std::fmod((g - b) / c, 6.0);
        else if (v == g)
            hue = 60.0 * ((b - r) / c + 2.0);
        else
            hue = 60.0 * ((r - g) / c + 4.0);
        hue = std::fmod(hue + degrees, 360.0);
        if (hue < 0) hue += 360.0;
        const double hp = hue / 60.0;
        const double xv = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
        double r1 = 0, g1 = 0, b1 = 0;
        switch (static_cast<int>(hp) % 6) {
            case 0: r1 = c; g1 = xv; break;
            case 1: r1 = xv; g1 = c; break;
            case 2: g1 = c; b1 = xv; break;
            case 3: g1 = xv; b1 = c; break;
            case 4: r1 = xv; b1 = c; break;
            default: r1 = c; b1 = xv; break;
        }
        const double mshift = v - c;
        out.pixels()[i] = Rgb{clamp_u8((r1 + mshift) * 255.0), clamp_u8((g1 + mshift) * 255.0),
                              clamp_u8((b1 + mshift) * 255.0)};
    }
    return out;
}

ColorImage ordered_dither(const ColorImage& input, int levels) {
    if (levels < 2 || levels > 256) throw StylizerFailure("halftone: levels must be in [2, 256]");
    const double step = 255.0 / (levels - 1);
    return per_channel(input, [step](std::uint8_t v, int x, int y) {
        const double bias = (kBayer[static_cast<std::size_t>(y % 8)][static_cast<std::size_t>(x % 8)] + 0.5) / 64.0;
        return clamp_u8(std::floor(v / step + bias) * step);
    });
}

StylizeResult apply_stylizer(const ColorImage& input, const StylizerSpec& spec) {
    const auto& list = builtin_stylizers();
    const auto it = std::find_if(list.begin(), list.end(), [&](const BuiltinStylizer& s) { return s.name == spec.name; });
    if (it == list.end()) throw StylizerFailure("unknown stylizer '" + spec.name + "'");
    for (const auto& [key, value] : spec.params)
        if (!it->defaults.contains(key))
            throw StylizerFailure(spec.name + ": unknown parameter '" + key + "'");

    StylizerSpec full = spec;
    for (const auto& [key, value] : it->defaults) full.params.try_emplace(key, value);

    StylizeResult result;
    if (spec.name == "identity")
        result.image = input;
    else if (spec.name == "posterize")
        result.image = posterize(input, int_param(full, "levels", 4, 2, 256));
    else if (spec.name == "soften")
        result.image = gaussian_soften(input, full.param("sigma", 2));
    else if (spec.name == "hue-rotate")
        result.image = hue_rotate(input, full.param("degrees", 120));
    else
        result.image = ordered_dither(input, int_param(full, "levels", 2, 2, 256));
    result.provenance = "builtin:" + full.describe();
    return result;
}

StylizeResult apply_external_stylizer(const ColorImage& input, const std::string& command) {
    namespace fs = std::filesystem;
    std::string pattern = (fs::temp_directory_path() / "artqr-stylize-XXXXXX").string();
    if (!::mkdtemp(pattern.data())) throw StylizerFailure("cannot create a temporary directory");
    const fs::path dir(pattern);
    struct Cleanup {
        fs::path dir;
        ~Cleanup() {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    } cleanup{dir};

    const fs::path in = dir / "input.png";
    const fs::path out = dir / "output.png";
    write_png(in, input);

    const std::string script = command + " \"$1\" \"$2\"";
    const std::string in_s = in.string();
    const std::string out_s = out.string();
    std::vector<char*> argv = {const_cast<char*>("/bin/sh"), const_cast<char*>("-c"),
                               const_cast<char*>(script.c_str()), const_cast<char*>("artqr-stylizer"),
                               const_cast<char*>(in_s.c_str()), const_cast<char*>(out_s.c_str()), nullptr};
    pid_t pid = 0;
    if (posix_spawn(&pid, "/bin/sh", nullptr, nullptr, argv.data(), environ) != 0)
        throw StylizerFailure("cannot launch external stylizer");
    int status = 0;
    if (waitpid(pid, &status, 0) < 0) throw StylizerFailure("waitpid failed for external stylizer");
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        throw StylizerFailure("external stylizer '" + command + "' exited with status " +
                              std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));

    StylizeResult result;
    try {
        result.image = read_png(out);
    } catch (const IoError& e) {
        throw StylizerFailure(std::string("external stylizer output unreadable: ") + e.what());
    }
    if (!result.image.same_shape(input))
        throw StylizerFailure("external stylizer changed dimensions from " + std::to_string(input.width()) + "x" +
                              std::to_string(input.height()) + " to " + std::to_string(result.image.width()) + "x" +
                              std::to_string(result.image.height()));
    result.provenance = "external:" + command;
    return result;
}

}  // namespace artqr
