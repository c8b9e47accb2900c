// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "artqr/geometry.hpp"
#include "artqr/image.hpp"
#include "artqr/qr_code.hpp"

namespace artqr {

/// Per-module scheduling targets and priorities derived from a blended
/// image's global gray values.
struct PriorityPlan {
    int modules = 0;
    /// 1 = light (gray rounds to 255), 0 = dark; row-major m*m.
    std::vector<std::uint8_t> targets;
    /// Normalized weight in [0, 1]; 1 = gray at an extreme, 0 = mid gray.
    std::vector<double> priorities;
    /// Gaussian-weighted module gray.
    std::vector<double> weighted_gray;
    /// Function-pattern modules; computed priorities are unused for these.
    std::vector<std::uint8_t> fixed;

    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(modules) +
               static_cast<std::size_t>(col);
    }
};

/// targets b = round(g/255) and priority 1 - |g - 255 b| / 127.5 where g is
/// the kernel-weighted module gray. Throws DimensionMismatch.
PriorityPlan compute_plan(const GrayImage& gray, const GaussianModuleKernel& kernel, const QrMatrix& layout);

struct ScheduleResult {
    QrMatrix matrix;
    CodewordFrame frame;
    std::size_t basis_rank = 0;
    std::size_t pivots_consumed = 0;
};

/// Gauss-Jordan scheduling of the frame's free bits: data/EC modules are
/// visited in descending priority (row-major on ties); each one that still
/// owns an independent basis row is forced to its target.
ScheduleResult schedule(const CodewordFrame& frame, const PriorityPlan& plan, int mask);

/// Data/EC modules whose rendered shade equals the plan target.
std::size_t count_target_matches(const QrMatrix& matrix, const PriorityPlan& plan);

/// Blends the image with the symbol: data modules become hard discs of
/// `spot_radius`, function modules are drawn as solid squares, everything
/// else keeps the image pixels. Throws DimensionMismatch.
ColorImage compose_qa(const ColorImage& image, const QrMatrix& matrix, const ModuleGrid& grid, int spot_radius);

/// Solid-square rendering of a symbol at grid scale (no image blending).
ColorImage render_plain(const QrMatrix& matrix, const ModuleGrid& grid);

}  // namespace artqr
