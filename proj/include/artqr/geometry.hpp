// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace artqr {

/// Placement of an m x m module grid on a raster.
struct ModuleGrid {
    int module_px = 13;  // a, odd
    int modules = 37;    // m
    int origin_x = 0;
    int origin_y = 0;

    ModuleGrid() = default;
    /// Throws std::invalid_argument when module_px is even or not positive.
    ModuleGrid(int module_px, int modules, int origin_x = 0, int origin_y = 0);

    int half() const noexcept { return (module_px - 1) / 2; }
    int extent() const noexcept { return module_px * modules; }
    int center_x(int col) const noexcept { return origin_x + col * module_px + half(); }
    int center_y(int row) const noexcept { return origin_y + row * module_px + half(); }
    std::size_t module_count() const noexcept {
        return static_cast<std::size_t>(modules) * static_cast<std::size_t>(modules);
    }

    friend bool operator==(const ModuleGrid&, const ModuleGrid&) = default;
};

/// Normalized a x a Gaussian weight over one module, sigma = (a-1)/6.
class GaussianModuleKernel {
public:
    explicit GaussianModuleKernel(int module_px);

    int module_px() const noexcept { return a_; }
    double sigma() const noexcept { return sigma_; }
    /// Weight at offset (dx, dy) from the module center, |dx|,|dy| <= (a-1)/2.
    double at(int dx, int dy) const noexcept {
        const int h = (a_ - 1) / 2;
        return weights_[static_cast<std::size_t>((dy + h) * a_ + (dx + h))];
    }
    std::span<const double> weights() const noexcept { return weights_; }

private:
    int a_;
    double sigma_;
    std::vector<double> weights_;
};

/// Offsets (dx, dy) with dx^2 + dy^2 <= radius^2, row-major.
std::vector<std::pair<int, int>> disc_offsets(int radius);

/// Offsets with (r+0.5)^2 <= dx^2 + dy^2 < (r+1.5)^2.
std::vector<std::pair<int, int>> ring_offsets(int radius);

}  // namespace artqr
