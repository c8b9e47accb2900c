// SPDX-License-Identifier: Apache-2.0
#include "artqr/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "artqr/errors.hpp"

namespace artqr {
namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;

std::array<double, kWindow> window_weights() {
    std::array<double, kWindow> w{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kWindow / 2;
        w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
        sum += w[static_cast<std::size_t>(i)];
    }
    for (double& v : w) v /= sum;
    return w;
}

// 'valid' separable Gaussian filter of a w x h plane.
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h) {
    static const auto g = window_weights();
    const int ow = w - kWindow + 1;
    const int oh = h - kWindow + 1;
    std::vector<double> rows(static_cast<std::size_t>(ow) * static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < kWindow; ++i)
                s += g[static_cast<std::size_t>(i)] * in[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x + i)];
            rows[static_cast<std::size_t>(y) * ow + static_cast<std::size_t>(x)] = s;
        }
    std::vector<double> out(static_cast<std::size_t>(ow) * static_cast<std::size_t>(oh));
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < kWindow; ++i)
                s += g[static_cast<std::size_t>(i)] * rows[static_cast<std::size_t>(y + i) * ow + static_cast<std::size_t>(x)];
            out[static_cast<std::size_t>(y) * ow + static_cast<std::size_t>(x)] = s;
        }
    return out;
}

struct Planes {
    int width = 0;
    int height = 0;
    std::vector<std::array<double, 3>> px;

    Planes(int w, int h) : width(w), height(h), px(static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {}
    explicit Planes(const ColorImage& img) : Planes(img.width(), img.height()) {
        for (std::size_t i = 0; i < px.size(); ++i) {
            const Rgb p = img.pixels()[i];
            px[i] = {double(p.r), double(p.g), double(p.b)};
        }
    }
    std::array<double, 3>& at(int x, int y) { return px[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)]; }
    const std::array<double, 3>& at(int x, int y) const {
        return px[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)];
    }

    // Bilinear sample with edge clamping.
    std::array<double, 3> sample(double x, double y) const {
        x = std::clamp(x, 0.0, width - 1.0);
        y = std::clamp(y, 0.0, height - 1.0);
        const int x0 = std::min(static_cast<int>(x), width - 1);
        const int y0 = std::min(static_cast<int>(y), height - 1);
        const int x1 = std::min(x0 + 1, width - 1);
        const int y1 = std::min(y0 + 1, height - 1);
        const double fx = x - x0;
        const double fy = y - y0;
        std::array<double, 3> out{};
        for (std::size_t c = 0; c < 3; ++c) {
            const double top = at(x0, y0)[c] * (1 - fx) + at(x1, y0)[c] * fx;
            const double bottom = at(x0, y1)[c] * (1 - fx) + at(x1, y1)[c] * fx;
            out[c] = top * (1 - fy) + bottom * fy;
        }
        return out;
    }
};

Planes shear(const Planes& in, double degrees) {
    Planes out(in.width, in.height);
    const double t = std::tan(degrees * std::numbers::pi / 180.0);
    const double cy = (in.height - 1) / 2.0;
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) out.at(x, y) = in.sample(x - t * (y - cy), y);
    return out;
}

Planes resize_round_trip(const Planes& in, double scale, double jx, double jy) {
    const int sw = std::max(1, static_cast<int>(std::lround(in.width * scale)));
    const int sh = std::max(1, static_cast<int>(std::lround(in.height * scale)));
    const double kx = static_cast<double>(in.width) / sw;
    const double ky = static_cast<double>(in.height) / sh;
    Planes small(sw, sh);
    for (int v = 0; v < sh; ++v)
        for (int u = 0; u < sw; ++u) small.at(u, v) = in.sample((u + 0.5) * kx - 0.5 + jx, (v + 0.5) * ky - 0.5 + jy);
    Planes out(in.width, in.height);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) out.at(x, y) = small.sample((x + 0.5) / kx - 0.5, (y + 0.5) / ky - 0.5);
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

double ssim(const GrayImage& a, const GrayImage& b) {
    require_same_shape(a, b, "ssim");
    if (a.width() < kWindow || a.height() < kWindow) throw DimensionMismatch("ssim: images smaller than the window");
    const int w = a.width();
    const int h = a.height();
    const std::size_t n = a.size();
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = a.pixels()[i];
        const double y = b.pixels()[i];
        xx[i] = x * x;
        yy[i] = y * y;
        xy[i] = x * y;
    }
    const auto mx = filter_valid(a.pixels(), w, h);
    const auto my = filter_valid(b.pixels(), w, h);
    const auto ex2 = filter_valid(xx, w, h);
    const auto ey2 = filter_valid(yy, w, h);
    const auto exy = filter_valid(xy, w, h);
    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    double total = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = ex2[i] - mx[i] * mx[i];
        const double vy = ey2[i] - my[i] * my[i];
        const double cov = exy[i] - mx[i] * my[i];
        total += ((2 * mx[i] * my[i] + c1) * (2 * cov + c2)) /
                 ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    return total / static_cast<double>(mx.size());
}

std::size_t error_module_count(const ColorImage& image, const QrMatrix& scheduled, const ModuleGrid& grid) {
    const GrayImage gray = to_gray(image);
    const SampledGrid samples = sample(gray, binarize_field(gray), grid);
    std::size_t errors = 0;
    for (int row = 0; row < grid.modules; ++row)
        for (int col = 0; col < grid.modules; ++col) {
            if (scheduled.role(row, col) != ModuleRole::DataEc) continue;
            const bool light = samples.bits[static_cast<std::size_t>(row) * grid.modules + static_cast<std::size_t>(col)];
            if (light == scheduled.dark(row, col)) ++errors;
        }
    return errors;
}

DistortionSpec DistortionSpec::parse(std::string_view text) {
    DistortionSpec spec;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const std::string item = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        pos = comma == std::string_view::npos ? text.size() + 1 : comma + 1;
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("distortion item '" + item + "' lacks '='");
        const std::string key = trim(std::string_view(item).substr(0, eq));
        const std::string raw = trim(std::string_view(item).substr(eq + 1));
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(raw, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != raw.size() || raw.empty()) throw std::invalid_argument("distortion value '" + raw + "' is not a number");
        if (key == "brightness")
            spec.brightness_shift = value;
        else if (key == "gamma")
            spec.gamma = value;
        else if (key == "scale")
            spec.scale_factor = value;
        else if (key == "tilt")
            spec.tilt_degrees = value;
        else if (key == "noise")
            spec.noise_sigma = value;
        else
            throw std::invalid_argument("unknown distortion '" + key + "'");
    }
    spec.validate();
    return spec;
}

std::string DistortionSpec::describe() const {
    std::ostringstream out;
    out << "brightness=" << brightness_shift << ",gamma=" << gamma << ",scale=" << scale_factor
        << ",tilt=" << tilt_degrees << ",noise=" << noise_sigma;
    return out.str();
}

bool DistortionSpec::identity() const noexcept {
    return brightness_shift == 0.0 && gamma == 1.0 && scale_factor == 1.0 && tilt_degrees == 0.0 && noise_sigma == 0.0;
}

void DistortionSpec::validate() const {
    if (!(std::abs(brightness_shift) <= 255.0)) throw std::invalid_argument("brightness must lie in [-255, 255]");
    if (!(gamma >= 0.1 && gamma <= 10.0)) throw std::invalid_argument("gamma must lie in [0.1, 10]");
    if (!(scale_factor >= 0.05 && scale_factor <= 4.0)) throw std::invalid_argument("scale must lie in [0.05, 4]");
    if (!(std::abs(tilt_degrees) <= 10.0)) throw std::invalid_argument("tilt must lie in [-10, 10] degrees");
    if (!(noise_sigma >= 0.0 && noise_sigma <= 128.0)) throw std::invalid_argument("noise must lie in [0, 128]");
}

ColorImage apply_distortion(const ColorImage& image, const DistortionSpec& spec, std::mt19937_64& rng) {
    spec.validate();
    Planes p(image);
    if (spec.tilt_degrees != 0.0) p = shear(p, spec.tilt_degrees);
    if (spec.scale_factor != 1.0) {
        std::uniform_real_distribution<double> jitter(-0.5, 0.5);
        const double jx = jitter(rng);
        const double jy = jitter(rng);
        p = resize_round_trip(p, spec.scale_factor, jx, jy);
    }
    std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
    ColorImage out(image.width(), image.height());
    for (std::size_t i = 0; i < p.px.size(); ++i) {
        const double n = spec.noise_sigma > 0.0 ? noise(rng) : 0.0;
        std::array<std::uint8_t, 3> c{};
        for (std::size_t k = 0; k < 3; ++k) {
            double v = std::clamp(p.px[i][k], 0.0, 255.0);
            if (spec.gamma != 1.0) v = 255.0 * std::pow(v / 255.0, spec.gamma);
            c[k] = clamp_u8(v + spec.brightness_shift + n);
        }
        out.pixels()[i] = Rgb{c[0], c[1], c[2]};
    }
    return out;
}

TrialSummary decode_rate_trial(const ColorImage& image, const ModuleGrid& grid, int mask, const Bytes& expected,
                               const DistortionSpec& spec, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("decode_rate_trial: trials must be at least 1");
    TrialSummary summary;
    summary.trials = trials;
    for (std::size_t i = 0; i < trials; ++i) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(i)};
        std::mt19937_64 rng(seq);
        const DecodeReport report = try_decode(apply_distortion(image, spec, rng), grid, mask);
        TrialOutcome outcome;
        if (!report.ok()) {
            outcome.message = report.message;
        } else if (report.result.payload != expected) {
            outcome.message = "decoded payload differs from the expected message";
        } else {
            outcome.ok = true;
            outcome.corrections = report.result.corrections;
            ++summary.successes;
        }
        summary.outcomes.push_back(std::move(outcome));
    }
    return summary;
}

}  // namespace artqr
