// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "artqr/image.hpp"

namespace artqr {

/// Reads any PNG (gray, palette, alpha, 16-bit) as 8-bit RGB. Alpha is
/// composited over white. Throws IoError on unreadable or truncated files.
ColorImage read_png(const std::filesystem::path& path);

/// Writes 8-bit RGB. Throws IoError.
void write_png(const std::filesystem::path& path, const ColorImage& image);

}  // namespace artqr
