// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "artqr/geometry.hpp"
#include "artqr/qr_code.hpp"
#include "artqr/reed_solomon.hpp"
#include "artqr/stage_c.hpp"

namespace artqr {

inline constexpr int kSidecarFormatVersion = 1;

/// Ground truth that travels next to every generated PNG: symbol geometry,
/// the scheduled module bits, a payload digest and run parameters.
struct SidecarMeta {
    int version = 5;
    EcLevel level = EcLevel::L;
    int mask = 0;
    ModuleGrid grid;     // origin includes the quiet zone
    int quiet_zone = 4;  // modules of white border around the core
    std::vector<std::uint8_t> dark_bits;  // row-major m*m, 1 = dark
    std::string payload_sha256;           // lowercase hex
    RobustnessParams params;
    std::vector<std::string> provenance;  // one line per pipeline stage

    /// Scheduled symbol rebuilt from the layout and dark_bits.
    QrMatrix scheduled() const;
    /// Throws std::invalid_argument when fields contradict each other.
    void validate() const;
};

std::string sidecar_to_text(const SidecarMeta& meta);
/// Throws std::invalid_argument on malformed or unsupported documents.
SidecarMeta sidecar_from_text(std::string_view text);

/// Throws IoError on I/O failure, std::invalid_argument on bad content.
void write_sidecar(const std::string& path, const SidecarMeta& meta);
SidecarMeta read_sidecar(const std::string& path);

std::string sha256_hex(std::span<const std::uint8_t> data);

/// UTC ISO-8601 time, taken from SOURCE_DATE_EPOCH when that is set.
std::string timestamp_now();

}  // namespace artqr
