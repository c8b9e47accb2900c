// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "artqr/decoder_model.hpp"
#include "artqr/geometry.hpp"
#include "artqr/image.hpp"
#include "artqr/qr_code.hpp"

namespace artqr {

struct RobustnessParams {
    double delta = 0.1;  // margin fraction
    double eta = 0.8;    // robust iff score >= eta
    int spot_radius = 3;
    int max_iterations = 20;

    /// Throws std::invalid_argument when a field is out of range for `grid`.
    void validate(const ModuleGrid& grid) const;
};

/// t + delta (255 - t) for a light ideal, t - delta t for a dark one.
inline double margin_threshold(double t, bool ideal, double delta) noexcept {
    return ideal ? t + delta * (255.0 - t) : t - delta * t;
}

/// True iff thresholding against the margin-shifted threshold gives `ideal`.
inline bool pixel_robust(double gray, double t, bool ideal, double delta) noexcept {
    return psi(gray, margin_threshold(t, ideal, delta)) == ideal;
}

/// Per-pixel ideal thresholding result: inside module k's spot it is the
/// scheduled bit of k, elsewhere the pixel's current binarization.
struct IdealBitField {
    Raster<std::uint8_t> ideal;    // 1 = light
    Raster<std::uint8_t> in_spot;  // 1 where the scheduled bit applies
};

/// `radii` holds one spot radius per module (row-major m*m).
IdealBitField make_ideal_field(const GrayImage& gray, const ThresholdField& field, const QrMatrix& scheduled,
                               const ModuleGrid& grid, const std::vector<int>& radii);

struct RobustnessReport {
    int modules = 0;
    std::vector<double> scores;                 // R per module, row-major
    std::vector<std::size_t> non_robust;        // {k : R_k < eta}, ascending
    std::vector<std::size_t> center_violations; // center pixel fails its margin
    std::vector<std::size_t> registry;          // cumulative corrected modules
    std::vector<std::size_t> omega_sizes;       // flagged count per correction round
    std::size_t iterations = 0;                 // correction rounds performed
};

RobustnessReport evaluate(const GrayImage& gray, const ThresholdField& field, const IdealBitField& ideal,
                          const GaussianModuleKernel& kernel, const ModuleGrid& grid, const RobustnessParams& params);

/// Convenience wrapper: binarize `gray`, build the ideal field with uniform
/// spot radius params.spot_radius, evaluate.
RobustnessReport evaluate_image(const GrayImage& gray, const QrMatrix& scheduled, const ModuleGrid& grid,
                                const GaussianModuleKernel& kernel, const RobustnessParams& params);

/// Every pixel of each registered module's spot takes the mean color of the
/// surrounding ring (r+0.5)^2 <= d^2 < (r+1.5)^2 sampled from `qb`.
ColorImage preprocess_spots(const ColorImage& qb, const std::vector<std::size_t>& registry, const ModuleGrid& grid,
                            const std::vector<int>& radii);
ColorImage preprocess_spots(const ColorImage& qb, const std::vector<std::size_t>& registry, const ModuleGrid& grid,
                            int spot_radius);

/// Scales each qb0 pixel by target_gray / gray(qb0); falls back to an
/// achromatic pixel when gray(qb0) is zero or rounding/clipping would move
/// the gray by more than 1.
ColorImage colorize(const GrayImage& qc_gray, const ColorImage& qb0);

struct CorrectionResult {
    GrayImage qc_gray;
    ColorImage qb0;
    ColorImage qc;           // colorize(qc_gray, qb0)
    std::vector<int> radii;  // final spot radius per module
    RobustnessReport report; // evaluation of qc at exit
};

/// Iterative correction: evaluate, force the spots of flagged modules past
/// their margin threshold, recompute thresholds, repeat until every module
/// is robust in both the corrected gray image and its colorized rendering.
/// Throws NonConvergence after params.max_iterations rounds.
CorrectionResult correct(const ColorImage& qb, const QrMatrix& scheduled, const ModuleGrid& grid,
                         const GaussianModuleKernel& kernel, const RobustnessParams& params);

}  // namespace artqr
