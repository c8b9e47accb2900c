// SPDX-License-Identifier: Apache-2.0
#include "artqr/geometry.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace artqr {

ModuleGrid::ModuleGrid(int module_px_, int modules_, int origin_x_, int origin_y_)
    : module_px(module_px_), modules(modules_), origin_x(origin_x_), origin_y(origin_y_) {
    if (module_px <= 0 || module_px % 2 == 0)
        throw std::invalid_argument("module size must be a positive odd pixel count");
    if (modules <= 0) throw std::invalid_argument("module count must be positive");
}

GaussianModuleKernel::GaussianModuleKernel(int module_px) : a_(module_px) {
    if (module_px <= 0 || module_px % 2 == 0)
        throw std::invalid_argument("Gaussian kernel side must be a positive odd pixel count");
    sigma_ = (a_ - 1) / 6.0;
    const int h = (a_ - 1) / 2;
    weights_.resize(static_cast<std::size_t>(a_) * static_cast<std::size_t>(a_));
    if (a_ == 1) {
        weights_[0] = 1.0;
        return;
    }
    const double two_s2 = 2.0 * sigma_ * sigma_;
    for (int dy = -h; dy <= h; ++dy)
        for (int dx = -h; dx <= h; ++dx)
            weights_[static_cast<std::size_t>((dy + h) * a_ + (dx + h))] =
                std::exp(-(dx * dx + dy * dy) / two_s2) / (M_PI * two_s2);
    // the continuous density does not sum to exactly 1 on the lattice
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    for (double& w : weights_) w /= total;
}

std::vector<std::pair<int, int>> disc_offsets(int radius) {
    std::vector<std::pair<int, int>> out;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) out.emplace_back(dx, dy);
    return out;
}

std::vector<std::pair<int, int>> ring_offsets(int radius) {
    std::vector<std::pair<int, int>> out;
    const double inner = (radius + 0.5) * (radius + 0.5);
    const double outer = (radius + 1.5) * (radius + 1.5);
    const int reach = radius + 2;
    for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
            const double d2 = dx * dx + dy * dy;
            if (d2 >= inner && d2 < outer) out.emplace_back(dx, dy);
        }
    }
    return out;
}

}  // namespace artqr
