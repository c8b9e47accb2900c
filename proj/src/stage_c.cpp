// SPDX-License-Identifier: Apache-2.0
#include "artqr/stage_c.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "artqr/errors.hpp"

namespace artqr {
namespace {

// Forced spot grays are placed this far beyond the margin threshold so that
// 8-bit rounding in colorize cannot pull them back inside it.
constexpr double kForceCushion = 2.0;

// Gray given to non-spot pixels of a dark module whose neighborhood is pure
// black, so that its threshold becomes positive.
constexpr double kDarkFloor = 8.0;

std::size_t module_index(const ModuleGrid& grid, int row, int col) {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(grid.modules) + static_cast<std::size_t>(col);
}

// Disc offsets of the given radius clipped to the module square.
std::vector<std::pair<int, int>> spot_offsets(int radius, int half) {
    std::vector<std::pair<int, int>> out;
    for (auto [dx, dy] : disc_offsets(radius))
        if (std::abs(dx) <= half && std::abs(dy) <= half) out.emplace_back(dx, dy);
    return out;
}

class SpotCache {
public:
    explicit SpotCache(int half) : half_(half) {}
    const std::vector<std::pair<int, int>>& get(int radius) {
        if (static_cast<std::size_t>(radius) >= cache_.size()) cache_.resize(static_cast<std::size_t>(radius) + 1);
        auto& slot = cache_[static_cast<std::size_t>(radius)];
        if (slot.empty()) slot = spot_offsets(radius, half_);
        return slot;
    }

private:
    int half_;
    std::vector<std::vector<std::pair<int, int>>> cache_;
};

int max_spot_radius(const ModuleGrid& grid) {
    // smallest disc that covers the whole module square
    return static_cast<int>(std::ceil(grid.half() * std::sqrt(2.0)));
}

void check_radii(const ModuleGrid& grid, const std::vector<int>& radii) {
    if (radii.size() != grid.module_count()) throw DimensionMismatch("spot radius map must hold m*m entries");
}

}  // namespace

void RobustnessParams::validate(const ModuleGrid& grid) const {
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
    if (spot_radius < 0 || 2 * spot_radius > grid.module_px)
        throw std::invalid_argument("spot radius must lie in [0, a/2]");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
}

IdealBitField make_ideal_field(const GrayImage& gray, const ThresholdField& field, const QrMatrix& scheduled,
                               const ModuleGrid& grid, const std::vector<int>& radii) {
    check_radii(grid, radii);
    if (scheduled.size() != grid.modules) throw DimensionMismatch("ideal field: symbol and grid sizes differ");
    IdealBitField f{Raster<std::uint8_t>(gray.width(), gray.height()), Raster<std::uint8_t>(gray.width(), gray.height())};
    for (int y = 0; y < gray.height(); ++y)
        for (int x = 0; x < gray.width(); ++x) f.ideal.at(x, y) = psi(gray.at(x, y), field.at(x, y)) ? 1 : 0;
    SpotCache spots(grid.half());
    for (int row = 0; row < grid.modules; ++row) {
        for (int col = 0; col < grid.modules; ++col) {
            const std::uint8_t light = scheduled.dark(row, col) ? 0 : 1;
            const int cx = grid.center_x(col);
            const int cy = grid.center_y(row);
            for (auto [dx, dy] : spots.get(radii[module_index(grid, row, col)])) {
                f.ideal.at(cx + dx, cy + dy) = light;
                f.in_spot.at(cx + dx, cy + dy) = 1;
            }
        }
    }
    return f;
}

RobustnessReport evaluate(const GrayImage& gray, const ThresholdField& field, const IdealBitField& ideal,
                          const GaussianModuleKernel& kernel, const ModuleGrid& grid, const RobustnessParams& params) {
    require_same_shape(gray, ideal.ideal, "evaluate");
    if (kernel.module_px() != grid.module_px) throw DimensionMismatch("evaluate: kernel and grid module sizes differ");
    RobustnessReport report;
    report.modules = grid.modules;
    report.scores.resize(grid.module_count());
    const int h = grid.half();
    for (int row = 0; row < grid.modules; ++row) {
        for (int col = 0; col < grid.modules; ++col) {
            const int cx = grid.center_x(col);
            const int cy = grid.center_y(row);
            double score = 0.0;
            for (int dy = -h; dy <= h; ++dy) {
                for (int dx = -h; dx <= h; ++dx) {
                    const int x = cx + dx;
                    const int y = cy + dy;
                    if (pixel_robust(gray.at(x, y), field.at(x, y), ideal.ideal.at(x, y) != 0, params.delta))
                        score += kernel.at(dx, dy);
                }
            }
            const std::size_t k = module_index(grid, row, col);
            report.scores[k] = score;
            if (score < params.eta) report.non_robust.push_back(k);
            if (!pixel_robust(gray.at(cx, cy), field.at(cx, cy), ideal.ideal.at(cx, cy) != 0, params.delta))
                report.center_violations.push_back(k);
        }
    }
    return report;
}

RobustnessReport evaluate_image(const GrayImage& gray, const QrMatrix& scheduled, const ModuleGrid& grid,
                                const GaussianModuleKernel& kernel, const RobustnessParams& params) {
    const ThresholdField field = binarize_field(gray);
    const std::vector<int> radii(grid.module_count(), params.spot_radius);
    return evaluate(gray, field, make_ideal_field(gray, field, scheduled, grid, radii), kernel, grid, params);
}

ColorImage preprocess_spots(const ColorImage& qb, const std::vector<std::size_t>& registry, const ModuleGrid& grid,
                            const std::vector<int>& radii) {
    check_radii(grid, radii);
    ColorImage out = qb;
    SpotCache spots(grid.half());
    for (std::size_t k : registry) {
        if (k >= grid.module_count()) throw std::out_of_range("preprocess_spots: module index out of range");
        const int row = static_cast<int>(k) / grid.modules;
        const int col = static_cast<int>(k) % grid.modules;
        const int cx = grid.center_x(col);
        const int cy = grid.center_y(row);
        const int radius = radii[k];
        double sr = 0, sg = 0, sb = 0;
        int count = 0;
        for (auto [dx, dy] : ring_offsets(radius)) {
            const int x = cx + dx;
            const int y = cy + dy;
            if (x < 0 || y < 0 || x >= qb.width() || y >= qb.height()) continue;
            const Rgb p = qb.at(x, y);
            sr += p.r;
            sg += p.g;
            sb += p.b;
            ++count;
        }
        if (count == 0) continue;
        const Rgb fill{clamp_u8(sr / count), clamp_u8(sg / count), clamp_u8(sb / count)};
        for (auto [dx, dy] : spots.get(radius)) out.at(cx + dx, cy + dy) = fill;
    }
    return out;
}

ColorImage preprocess_spots(const ColorImage& qb, const std::vector<std::size_t>& registry, const ModuleGrid& grid,
                            int spot_radius) {
    return preprocess_spots(qb, registry, grid, std::vector<int>(grid.module_count(), spot_radius));
}

ColorImage colorize(const GrayImage& qc_gray, const ColorImage& qb0) {
    require_same_shape(qc_gray, qb0, "colorize");
    ColorImage out(qb0.width(), qb0.height());
    for (std::size_t i = 0; i < qb0.size(); ++i) {
        const double target = std::clamp(qc_gray.pixels()[i], 0.0, 255.0);
        const Rgb ref = qb0.pixels()[i];
        const double ref_gray = luma(ref);
        const std::uint8_t flat = clamp_u8(target);
        if (ref_gray <= 0.0) {
            out.pixels()[i] = Rgb{flat, flat, flat};
            continue;
        }
        const double theta = target / ref_gray;
        const Rgb scaled{clamp_u8(theta * ref.r), clamp_u8(theta * ref.g), clamp_u8(theta * ref.b)};
        out.pixels()[i] = std::abs(luma(scaled) - target) > 1.0 ? Rgb{flat, flat, flat} : scaled;
    }
    return out;
}

CorrectionResult correct(const ColorImage& qb, const QrMatrix& scheduled, const ModuleGrid& grid,
                         const GaussianModuleKernel& kernel, const RobustnessParams& params) {
    params.validate(grid);
    if (scheduled.size() != grid.modules) throw DimensionMismatch("correct: symbol and grid sizes differ");
    if (qb.width() < grid.origin_x + grid.extent() || qb.height() < grid.origin_y + grid.extent())
        throw DimensionMismatch("correct: image does not cover the module grid");

    const std::size_t n = grid.module_count();
    const int radius_cap = max_spot_radius(grid);
    CorrectionResult result;
    result.qc_gray = to_gray(qb);
    result.qb0 = qb;
    result.radii.assign(n, params.spot_radius);
    std::vector<bool> registered(n, false);
    std::vector<std::size_t> registry;
    std::vector<std::size_t> omega_sizes;
    SpotCache spots(grid.half());

    auto spot_clear = [&](std::size_t k, const GrayImage& gray, const ThresholdField& field) {
        const int row = static_cast<int>(k) / grid.modules;
        const int col = static_cast<int>(k) % grid.modules;
        const bool light = !scheduled.dark(row, col);
        for (auto [dx, dy] : spots.get(result.radii[k])) {
            const int x = grid.center_x(col) + dx;
            const int y = grid.center_y(row) + dy;
            if (!pixel_robust(gray.at(x, y), field.at(x, y), light, params.delta)) return false;
        }
        return true;
    };

    for (int round = 0;; ++round) {
        result.qc = colorize(result.qc_gray, result.qb0);
        const GrayImage out_gray = to_gray(result.qc);
        const ThresholdField gray_field = binarize_field(result.qc_gray);
        const ThresholdField out_field = binarize_field(out_gray);
        const RobustnessReport gray_report =
            evaluate(result.qc_gray, gray_field,
                     make_ideal_field(result.qc_gray, gray_field, scheduled, grid, result.radii), kernel, grid, params);
        RobustnessReport out_report = evaluate(
            out_gray, out_field, make_ideal_field(out_gray, out_field, scheduled, grid, result.radii), kernel, grid, params);

        std::vector<std::size_t> flagged;
        for (const RobustnessReport* r : {&gray_report, static_cast<const RobustnessReport*>(&out_report)}) {
            flagged.insert(flagged.end(), r->non_robust.begin(), r->non_robust.end());
            flagged.insert(flagged.end(), r->center_violations.begin(), r->center_violations.end());
        }
        std::sort(flagged.begin(), flagged.end());
        flagged.erase(std::unique(flagged.begin(), flagged.end()), flagged.end());

        if (flagged.empty()) {
            std::sort(registry.begin(), registry.end());
            out_report.registry = registry;
            out_report.omega_sizes = omega_sizes;
            out_report.iterations = static_cast<std::size_t>(round);
            result.report = std::move(out_report);
            return result;
        }
        if (round == params.max_iterations)
            throw NonConvergence(std::to_string(flagged.size()) + " modules still non-robust after " +
                                 std::to_string(params.max_iterations) + " correction rounds");
        omega_sizes.push_back(flagged.size());

        for (std::size_t k : flagged) {
            if (!registered[k]) {
                registered[k] = true;
                registry.push_back(k);
            } else if (result.radii[k] < radius_cap && spot_clear(k, result.qc_gray, gray_field) &&
                       spot_clear(k, out_gray, out_field)) {
                // the spot alone carries too little Gaussian mass; widen it
                ++result.radii[k];
            }
        }

        // Re-force every registered spot against the current thresholds.
        for (std::size_t k : registry) {
            const int row = static_cast<int>(k) / grid.modules;
            const int col = static_cast<int>(k) % grid.modules;
            const bool light = !scheduled.dark(row, col);
            bool starved = false;
            for (auto [dx, dy] : spots.get(result.radii[k])) {
                const int x = grid.center_x(col) + dx;
                const int y = grid.center_y(row) + dy;
                double& g = result.qc_gray.at(x, y);
                const double t = gray_field.at(x, y);
                const double target = margin_threshold(t, light, params.delta);
                if (light) {
                    g = std::max(g, std::min(255.0, target + kForceCushion));
                } else {
                    g = std::min(g, std::max(0.0, target - kForceCushion));
                    starved = starved || t <= 0.0;
                }
            }
            if (starved) {
                // A zero threshold reads even pure black as light; lift the
                // rest of the module so its neighborhood mean becomes positive.
                const int h = grid.half();
                const int r2 = result.radii[k] * result.radii[k];
                for (int dy = -h; dy <= h; ++dy)
                    for (int dx = -h; dx <= h; ++dx)
                        if (dx * dx + dy * dy > r2) {
                            double& g = result.qc_gray.at(grid.center_x(col) + dx, grid.center_y(row) + dy);
                            g = std::max(g, kDarkFloor);
                        }
            }
        }
        result.qb0 = preprocess_spots(qb, registry, grid, result.radii);
    }
}

}  // namespace artqr
