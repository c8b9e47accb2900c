// SPDX-License-Identifier: Apache-2.0
#include "artqr/decoder_model.hpp"

#include <algorithm>

#include "artqr/errors.hpp"

namespace artqr {
namespace {

// Inclusive block range of the 5-wide window around block `b`.
std::pair<int, int> window(int b, int count) {
    if (count < 5) return {0, count - 1};
    const int c = std::clamp(b, 2, count - 3);
    return {c - 2, c + 2};
}

}  // namespace

GrayImage to_gray(const ColorImage& image) {
    GrayImage out(image.width(), image.height());
    for (std::size_t i = 0; i < image.size(); ++i) out.pixels()[i] = luma(image.pixels()[i]);
    return out;
}

GrayImage ThresholdField::thresholds() const {
    GrayImage out(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) out.at(x, y) = at(x, y);
    return out;
}

ThresholdField binarize_field(const GrayImage& gray, int block_size) {
    if (block_size <= 0) throw DimensionMismatch("binarize_field: block size must be positive");
    if (gray.width() < block_size || gray.height() < block_size)
        throw DimensionMismatch("binarize_field: image smaller than one block");
    ThresholdField f;
    f.block_size = block_size;
    f.width = gray.width();
    f.height = gray.height();
    f.blocks_x = (gray.width() + block_size - 1) / block_size;
    f.blocks_y = (gray.height() + block_size - 1) / block_size;
    const auto nblocks = static_cast<std::size_t>(f.blocks_x) * static_cast<std::size_t>(f.blocks_y);
    std::vector<double> sums(nblocks, 0.0);
    std::vector<int> counts(nblocks, 0);
    for (int y = 0; y < gray.height(); ++y) {
        const std::size_t brow = static_cast<std::size_t>(y / block_size) * static_cast<std::size_t>(f.blocks_x);
        for (int x = 0; x < gray.width(); ++x) {
            const std::size_t b = brow + static_cast<std::size_t>(x / block_size);
            sums[b] += gray.at(x, y);
            ++counts[b];
        }
    }
    f.block_means.resize(nblocks);
    for (std::size_t b = 0; b < nblocks; ++b) f.block_means[b] = sums[b] / counts[b];

    f.block_thresholds.resize(nblocks);
    for (int by = 0; by < f.blocks_y; ++by) {
        const auto [y0, y1] = window(by, f.blocks_y);
        for (int bx = 0; bx < f.blocks_x; ++bx) {
            const auto [x0, x1] = window(bx, f.blocks_x);
            double total = 0.0;
            for (int yy = y0; yy <= y1; ++yy)
                for (int xx = x0; xx <= x1; ++xx)
                    total += f.block_means[static_cast<std::size_t>(yy) * static_cast<std::size_t>(f.blocks_x) +
                                           static_cast<std::size_t>(xx)];
            f.block_thresholds[static_cast<std::size_t>(by) * static_cast<std::size_t>(f.blocks_x) +
                               static_cast<std::size_t>(bx)] = total / ((y1 - y0 + 1) * (x1 - x0 + 1));
        }
    }
    return f;
}

SampledGrid sample(const GrayImage& gray, const ThresholdField& field, const ModuleGrid& grid) {
    if (gray.width() != field.width || gray.height() != field.height)
        throw DimensionMismatch("sample: threshold field does not match the image");
    if (grid.origin_x < 0 || grid.origin_y < 0 || grid.origin_x + grid.extent() > gray.width() ||
        grid.origin_y + grid.extent() > gray.height())
        throw DimensionMismatch("sample: module grid does not fit the image");
    SampledGrid s;
    s.modules = grid.modules;
    s.grays.resize(grid.module_count());
    s.thresholds.resize(grid.module_count());
    s.bits.resize(grid.module_count());
    for (int row = 0; row < grid.modules; ++row) {
        for (int col = 0; col < grid.modules; ++col) {
            const std::size_t k = static_cast<std::size_t>(row) * static_cast<std::size_t>(grid.modules) +
                                  static_cast<std::size_t>(col);
            const int x = grid.center_x(col);
            const int y = grid.center_y(row);
            s.grays[k] = gray.at(x, y);
            s.thresholds[k] = field.at(x, y);
            s.bits[k] = psi(s.grays[k], s.thresholds[k]) ? 1 : 0;
        }
    }
    return s;
}

QrMatrix matrix_from_samples(const SampledGrid& samples) {
    const int version = (samples.modules - 17) / 4;
    if (symbol_size(version) != samples.modules)
        throw DimensionMismatch("sampled grid size is not a QR symbol size");
    QrMatrix m = QrMatrix::layout(version, EcLevel::L, 0);
    std::vector<std::uint8_t> dark(samples.bits.size());
    for (std::size_t i = 0; i < dark.size(); ++i) dark[i] = samples.bits[i] ? 0 : 1;
    m.assign_bits(dark);
    return m;
}

DecodeResult decode_check(const ColorImage& image, const ModuleGrid& grid, int mask_index) {
    const GrayImage gray = to_gray(image);
    const ThresholdField field = binarize_field(gray);
    const SampledGrid samples = sample(gray, field, grid);
    const QrMatrix matrix = matrix_from_samples(samples);
    DecodeResult result;
    const CodewordFrame frame = read_matrix(matrix, result.format);
    if (result.format.mask != mask_index)
        throw FormatInfoError("format information names mask " + std::to_string(result.format.mask) +
                              ", expected " + std::to_string(mask_index));
    const FrameDecode decoded = decode_frame(frame);
    result.payload = decoded.payload;
    result.corrections = decoded.corrected;
    return result;
}

DecodeReport try_decode(const ColorImage& image, const ModuleGrid& grid, int mask_index) {
    DecodeReport report;
    try {
        report.result = decode_check(image, grid, mask_index);
    } catch (const FormatInfoError& e) {
        report.failure = DecodeFailure::Format;
        report.message = e.what();
    } catch (const UncorrectableError& e) {
        report.failure = DecodeFailure::ReedSolomon;
        report.message = e.what();
    }
    return report;
}

}  // namespace artqr
