// SPDX-License-Identifier: Apache-2.0
#pragma once

// Model of a center-sampling QR reader: luma conversion, mean-block
// thresholding, the closed-interval thresholding function, and a full
// decode down to RS verification.

#include <cstdint>
#include <string>
#include <vector>

#include "artqr/geometry.hpp"
#include "artqr/image.hpp"
#include "artqr/qr_code.hpp"

namespace artqr {

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

inline double luma(Rgb p) noexcept { return kLumaR * p.r + kLumaG * p.g + kLumaB * p.b; }

GrayImage to_gray(const ColorImage& image);

/// Per-pixel thresholds from 8x8 block means averaged over the 5x5 block
/// neighborhood (window clamped to stay inside the image).
struct ThresholdField {
    int block_size = 8;
    int blocks_x = 0;
    int blocks_y = 0;
    std::vector<double> block_means;  // blocks_y rows of blocks_x
    std::vector<double> block_thresholds;

    int width = 0;
    int height = 0;

    double at(int x, int y) const noexcept {
        return block_thresholds[static_cast<std::size_t>(y / block_size) * static_cast<std::size_t>(blocks_x) +
                                static_cast<std::size_t>(x / block_size)];
    }
    /// Materialized per-pixel raster.
    GrayImage thresholds() const;
};

/// Throws DimensionMismatch for images smaller than one block.
ThresholdField binarize_field(const GrayImage& gray, int block_size = 8);

/// 1 (light) iff gray lies in [threshold, 255].
inline bool psi(double gray, double threshold) noexcept { return gray >= threshold; }

struct SampledGrid {
    int modules = 0;
    std::vector<double> grays;
    std::vector<double> thresholds;
    std::vector<std::uint8_t> bits;  // 1 = light
};

/// Reads each module's center pixel. Throws DimensionMismatch.
SampledGrid sample(const GrayImage& gray, const ThresholdField& field, const ModuleGrid& grid);

/// Symbol with dark = !light for every module of the sampled grid.
QrMatrix matrix_from_samples(const SampledGrid& samples);

struct DecodeResult {
    Bytes payload;
    std::size_t corrections = 0;
    FormatInfo format;
};

/// to_gray -> binarize_field -> sample -> read_matrix -> RS decode.
/// Throws FormatInfoError (including a format word naming a different mask
/// than `mask_index`) or UncorrectableError.
DecodeResult decode_check(const ColorImage& image, const ModuleGrid& grid, int mask_index);

enum class DecodeFailure { None, Format, ReedSolomon };

struct DecodeReport {
    DecodeFailure failure = DecodeFailure::None;
    std::string message;
    DecodeResult result;

    bool ok() const noexcept { return failure == DecodeFailure::None; }
};

/// Non-throwing decode_check.
DecodeReport try_decode(const ColorImage& image, const ModuleGrid& grid, int mask_index);

}  // namespace artqr
