// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "artqr/image.hpp"

namespace artqr {

// Deterministic synthetic test images (gradients, noise landscapes, plasma,
// geometric cartoons) standing in for a photo corpus.
inline constexpr int kCorpusCount = 20;

/// Image `index` in [0, kCorpusCount), `size` x `size`. Throws
/// std::out_of_range for a bad index.
ColorImage corpus_image(int index, int size = 512);

/// Stable file stem, e.g. "07-plasma".
std::string corpus_name(int index);

}  // namespace artqr
