// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "artqr/image.hpp"

namespace artqr {

/// A named transform plus numeric parameters, written "name" or
/// "name:key=value,key=value".
struct StylizerSpec {
    std::string name;
    std::map<std::string, double> params;

    /// Throws std::invalid_argument on malformed text.
    static StylizerSpec parse(std::string_view text);
    /// Canonical text form used in provenance records.
    std::string describe() const;
    double param(const std::string& key, double fallback) const;
};

struct BuiltinStylizer {
    std::string name;
    std::string summary;
    std::map<std::string, double> defaults;
};

/// identity, posterize, soften, hue-rotate, halftone.
const std::vector<BuiltinStylizer>& builtin_stylizers();

struct StylizeResult {
    ColorImage image;
    std::string provenance;
};

/// Runs a built-in stylizer. Throws StylizerFailure for unknown names or
/// invalid parameters.
StylizeResult apply_stylizer(const ColorImage& input, const StylizerSpec& spec);

/// Runs `command in.png out.png` through /bin/sh with the two paths
/// appended as positional arguments. Throws StylizerFailure on nonzero exit,
/// unreadable output or changed dimensions.
StylizeResult apply_external_stylizer(const ColorImage& input, const std::string& command);

// Individual transforms, exposed for tests.
ColorImage posterize(const ColorImage& input, int levels);
ColorImage gaussian_soften(const ColorImage& input, double sigma_px);
ColorImage hue_rotate(const ColorImage& input, double degrees);
ColorImage ordered_dither(const ColorImage& input, int levels);

}  // namespace artqr
