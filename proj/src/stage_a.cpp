// SPDX-License-Identifier: Apache-2.0
#include "artqr/stage_a.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "artqr/errors.hpp"

namespace artqr {
namespace {

/// Dense GF(2) vector.
class BitRow {
public:
    explicit BitRow(std::size_t bits) : words_((bits + 63) / 64, 0) {}

    bool test(std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1u; }
    void flip(std::size_t i) noexcept { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }
    BitRow& operator^=(const BitRow& other) noexcept {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
        return *this;
    }

private:
    std::vector<std::uint64_t> words_;
};

constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kWhite{255, 255, 255};

}  // namespace

PriorityPlan compute_plan(const GrayImage& gray, const GaussianModuleKernel& kernel, const QrMatrix& layout) {
    const int m = layout.size();
    const int a = kernel.module_px();
    if (gray.width() != m * a || gray.height() != m * a)
        throw DimensionMismatch("compute_plan: image must be (m*a)^2 = " + std::to_string(m * a) + " px square");
    const int h = (a - 1) / 2;
    PriorityPlan plan;
    plan.modules = m;
    const auto n = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
    plan.targets.resize(n);
    plan.priorities.resize(n);
    plan.weighted_gray.resize(n);
    plan.fixed.resize(n);
    for (int row = 0; row < m; ++row) {
        for (int col = 0; col < m; ++col) {
            const int cx = col * a + h;
            const int cy = row * a + h;
            double g = 0.0;
            for (int dy = -h; dy <= h; ++dy)
                for (int dx = -h; dx <= h; ++dx) g += gray.at(cx + dx, cy + dy) * kernel.at(dx, dy);
            const std::size_t k = plan.index(row, col);
            const std::uint8_t b = std::round(g / 255.0) >= 1.0 ? 1 : 0;
            plan.weighted_gray[k] = g;
            plan.targets[k] = b;
            plan.priorities[k] = std::clamp(1.0 - std::abs(g - 255.0 * b) / 127.5, 0.0, 1.0);
            plan.fixed[k] = is_function(layout.role(row, col)) ? 1 : 0;
        }
    }
    return plan;
}

ScheduleResult schedule(const CodewordFrame& frame, const PriorityPlan& plan, int mask) {
    const BlockLayout& bl = frame.layout;
    QrMatrix layout = QrMatrix::layout(bl.version, bl.level, mask);
    const int m = layout.size();
    if (plan.modules != m) throw DimensionMismatch("schedule: plan and symbol sizes differ");

    // One basis row per free bit: its effect on the whole data||ec stream.
    const std::size_t total_bits = frame.total_bits();
    const std::size_t data_bits = 8 * frame.data.size();
    std::vector<BitRow> rows;
    rows.reserve(frame.free_bit_positions.size());
    for (std::size_t f : frame.free_bit_positions) {
        BitRow row(total_bits);
        row.flip(f);
        std::size_t block = 0;
        while (block + 1 < bl.block_count() && bl.data_offset(block + 1) * 8 <= f) ++block;
        Bytes unit(bl.data_len(block), 0);
        const std::size_t local = f - 8 * bl.data_offset(block);
        unit[local / 8] = static_cast<std::uint8_t>(0x80u >> (local % 8));
        const Bytes parity = rs_encode(unit, bl.ec_per_block);
        const std::size_t ec_base = data_bits + 8 * block * bl.ec_per_block;
        for (std::size_t i = 0; i < 8 * parity.size(); ++i)
            if ((parity[i / 8] >> (7 - i % 8)) & 1u) row.flip(ec_base + i);
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> order(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&plan](std::size_t x, std::size_t y) {
        return plan.priorities[x] > plan.priorities[y];
    });

    ScheduleResult result;
    result.basis_rank = rows.size();
    result.frame = frame;
    std::vector<bool> used(rows.size(), false);
    BitRow current(total_bits);
    for (std::size_t i = 0; i < total_bits; ++i)
        if (frame.bit(i)) current.flip(i);

    for (std::size_t k : order) {
        const int row = static_cast<int>(k) / m;
        const int col = static_cast<int>(k) % m;
        const ModuleRole role = layout.role(row, col);
        if (role != ModuleRole::DataEc) continue;
        const bool want_dark = plan.targets[k] == 0;
        const std::size_t p = layout.bit_position(row, col).flat();
        std::size_t pivot = rows.size();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!used[r] && rows[r].test(p)) {
                pivot = r;
                break;
            }
        }
        if (pivot == rows.size()) continue;
        used[pivot] = true;
        ++result.pivots_consumed;
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (!used[r] && rows[r].test(p)) rows[r] ^= rows[pivot];
        const bool want_bit = want_dark != mask_bit(mask, row, col);
        if (current.test(p) != want_bit) current ^= rows[pivot];
    }

    for (std::size_t i = 0; i < total_bits; ++i)
        if (current.test(i) != result.frame.bit(i)) result.frame.flip_bit(i);
    result.matrix = build_matrix(result.frame, mask);
    return result;
}

std::size_t count_target_matches(const QrMatrix& matrix, const PriorityPlan& plan) {
    std::size_t matches = 0;
    for (int row = 0; row < matrix.size(); ++row)
        for (int col = 0; col < matrix.size(); ++col)
            if (matrix.role(row, col) == ModuleRole::DataEc &&
                matrix.dark(row, col) == (plan.targets[plan.index(row, col)] == 0))
                ++matches;
    return matches;
}

ColorImage compose_qa(const ColorImage& image, const QrMatrix& matrix, const ModuleGrid& grid, int spot_radius) {
    if (grid.modules != matrix.size())
        throw DimensionMismatch("compose_qa: grid and symbol sizes differ");
    if (image.width() < grid.origin_x + grid.extent() || image.height() < grid.origin_y + grid.extent())
        throw DimensionMismatch("compose_qa: image does not cover the module grid");
    if (spot_radius < 0 || 2 * spot_radius > grid.module_px)
        throw std::invalid_argument("compose_qa: spot radius must be in [0, a/2]");
    ColorImage out = image;
    const auto disc = disc_offsets(spot_radius);
    const int h = grid.half();
    for (int row = 0; row < grid.modules; ++row) {
        for (int col = 0; col < grid.modules; ++col) {
            const Rgb shade = matrix.dark(row, col) ? kBlack : kWhite;
            const int cx = grid.center_x(col);
            const int cy = grid.center_y(row);
            if (is_function(matrix.role(row, col))) {
                for (int dy = -h; dy <= h; ++dy)
                    for (int dx = -h; dx <= h; ++dx) out.at(cx + dx, cy + dy) = shade;
            } else {
                for (auto [dx, dy] : disc) out.at(cx + dx, cy + dy) = shade;
            }
        }
    }
    return out;
}

ColorImage render_plain(const QrMatrix& matrix, const ModuleGrid& grid) {
    ColorImage out(grid.origin_x + grid.extent(), grid.origin_y + grid.extent(), kWhite);
    const int h = grid.half();
    for (int row = 0; row < grid.modules; ++row)
        for (int col = 0; col < grid.modules; ++col)
            if (matrix.dark(row, col))
                for (int dy = -h; dy <= h; ++dy)
                    for (int dx = -h; dx <= h; ++dx) out.at(grid.center_x(col) + dx, grid.center_y(row) + dy) = kBlack;
    return out;
}

}  // namespace artqr
