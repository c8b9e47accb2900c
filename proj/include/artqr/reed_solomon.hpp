// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace artqr {

using Bytes = std::vector<std::uint8_t>;

/// Generator polynomial prod_{i<ec_len} (x - a^i), highest degree first,
/// leading coefficient (always 1) omitted.
Bytes rs_generator(std::size_t ec_len);

/// Parity bytes for `data` (QR convention: first byte is the highest-degree
/// coefficient, generator roots a^0 .. a^(ec_len-1)).
Bytes rs_encode(std::span<const std::uint8_t> data, std::size_t ec_len);

/// S_i = r(a^i) for i < ec_len.
Bytes rs_syndromes(std::span<const std::uint8_t> frame, std::size_t ec_len);

struct RsDecoded {
    Bytes payload;
    std::size_t corrected = 0;
};

/// Berlekamp-Massey + Chien + Forney. Throws UncorrectableError when the
/// locator is inconsistent or the corrected frame still has nonzero syndromes.
RsDecoded rs_decode(std::span<const std::uint8_t> frame, std::size_t ec_len);

}  // namespace artqr
