// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "artqr/decoder_model.hpp"
#include "artqr/geometry.hpp"
#include "artqr/image.hpp"
#include "artqr/qr_code.hpp"

namespace artqr {

/// Mean SSIM over all fully contained 11x11 Gaussian windows (sigma 1.5,
/// K1 = 0.01, K2 = 0.03, L = 255). Throws DimensionMismatch.
double ssim(const GrayImage& a, const GrayImage& b);

/// Data/EC modules whose sampled bit differs from the scheduled one.
std::size_t error_module_count(const ColorImage& image, const QrMatrix& scheduled, const ModuleGrid& grid);

struct DistortionSpec {
    double brightness_shift = 0.0;  // added to every channel
    double gamma = 1.0;             // v -> 255 (v/255)^gamma
    double scale_factor = 1.0;      // bilinear down/up round trip
    double tilt_degrees = 0.0;      // horizontal shear angle, |tilt| <= 10
    double noise_sigma = 0.0;       // additive Gaussian, same draw on all channels

    /// "brightness=40,gamma=1.2,scale=0.6,tilt=3,noise=2"; empty text is the
    /// identity. Throws std::invalid_argument on unknown keys or unsafe values.
    static DistortionSpec parse(std::string_view text);
    std::string describe() const;
    bool identity() const noexcept;
    void validate() const;
};

/// Applies shear, resize round trip, gamma, brightness and noise in that
/// order, then quantizes. The resize step samples the reduced image with a
/// random subpixel offset drawn from `rng`.
ColorImage apply_distortion(const ColorImage& image, const DistortionSpec& spec, std::mt19937_64& rng);

struct TrialOutcome {
    bool ok = false;
    std::size_t corrections = 0;
    std::string message;
};

struct TrialSummary {
    std::size_t trials = 0;
    std::size_t successes = 0;
    std::vector<TrialOutcome> outcomes;
    double rate() const noexcept { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

/// Trial i uses a generator seeded from (seed, i); a trial succeeds when
/// decode_check returns `expected`.
TrialSummary decode_rate_trial(const ColorImage& image, const ModuleGrid& grid, int mask, const Bytes& expected,
                               const DistortionSpec& spec, std::size_t trials, std::uint64_t seed);

}  // namespace artqr
