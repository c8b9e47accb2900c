// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "artqr/reed_solomon.hpp"

namespace artqr {

enum class EcLevel { L, M, Q, H };

std::string_view to_string(EcLevel level);
EcLevel parse_ec_level(std::string_view text);

/// Two-bit format-info encoding of the level (L=01, M=00, Q=11, H=10).
unsigned ec_level_format_bits(EcLevel level);

inline constexpr int kMinVersion = 1;
inline constexpr int kMaxVersion = 10;

constexpr int symbol_size(int version) { return 17 + 4 * version; }

/// RS block structure of one version/level. Group-1 blocks come first and
/// are one data codeword shorter than group-2 blocks.
struct BlockLayout {
    int version = 5;
    EcLevel level = EcLevel::L;
    std::size_t ec_per_block = 0;
    std::size_t group1_blocks = 0;
    std::size_t group1_data = 0;
    std::size_t group2_blocks = 0;

    std::size_t block_count() const noexcept { return group1_blocks + group2_blocks; }
    std::size_t data_len(std::size_t block) const noexcept {
        return block < group1_blocks ? group1_data : group1_data + 1;
    }
    std::size_t data_offset(std::size_t block) const noexcept;
    std::size_t total_data() const noexcept {
        return group1_blocks * group1_data + group2_blocks * (group1_data + 1);
    }
    std::size_t total_ec() const noexcept { return block_count() * ec_per_block; }
    std::size_t total_codewords() const noexcept { return total_data() + total_ec(); }

    /// Interleaved transmission order; each entry is an index into the
    /// logical (data of all blocks, then ec of all blocks) sequence.
    std::vector<std::size_t> interleave_order() const;
};

/// Throws std::invalid_argument for versions outside [kMinVersion, kMaxVersion].
BlockLayout block_layout(int version, EcLevel level);

/// Width in bits of the byte-mode character count indicator.
int byte_count_bits(int version);

/// Largest byte-mode payload that fits the version/level.
std::size_t byte_capacity(int version, EcLevel level);

/// Data and parity codewords of one symbol, kept in logical block order:
/// data = block0 data ‖ block1 data ‖ ..., ec = block0 ec ‖ block1 ec ‖ ...
struct CodewordFrame {
    BlockLayout layout;
    Bytes data;
    Bytes ec;
    /// Bit indices into `data` (MSB-first within each byte) that follow the
    /// terminator and may take any value without changing the payload.
    std::vector<std::size_t> free_bit_positions;

    std::size_t total_bits() const noexcept { return 8 * (data.size() + ec.size()); }
    /// Bit of the logical data‖ec stream.
    bool bit(std::size_t index) const noexcept;
    void flip_bit(std::size_t index) noexcept;

    /// Recomputes every block's parity from `data`.
    void recompute_ec();
    /// True when every block has all-zero syndromes.
    bool syndromes_zero() const;

    friend bool operator==(const CodewordFrame& a, const CodewordFrame& b) {
        return a.data == b.data && a.ec == b.ec;
    }
};

/// Byte-mode segment + terminator; the rest of the data region is filled
/// with 0xEC/0x11 pad codewords and listed as free bits.
CodewordFrame encode_message(std::span<const std::uint8_t> payload, int version, EcLevel level);
CodewordFrame encode_message(std::string_view text, int version, EcLevel level);

/// Parses a byte-mode data region back into its payload.
Bytes parse_payload(const CodewordFrame& frame);

struct FrameDecode {
    Bytes payload;
    std::size_t corrected = 0;
};

/// Per-block RS correction followed by payload parsing.
FrameDecode decode_frame(const CodewordFrame& frame);

enum class ModuleRole : std::uint8_t {
    Finder,
    Separator,
    Timing,
    Alignment,
    Format,
    Version,
    DarkModule,
    DataEc,
    Remainder,
};

inline bool is_function(ModuleRole role) noexcept {
    return role != ModuleRole::DataEc && role != ModuleRole::Remainder;
}

struct BitPosition {
    std::uint32_t codeword = 0;  // index into data‖ec (logical order)
    std::uint8_t bit = 0;        // 0 = most significant

    std::size_t flat() const noexcept { return 8u * codeword + bit; }
    friend bool operator==(const BitPosition&, const BitPosition&) = default;
};

/// Module grid of a symbol. Bits use the ISO convention: true = dark.
class QrMatrix {
public:
    QrMatrix() = default;

    int version() const noexcept { return version_; }
    int size() const noexcept { return size_; }
    EcLevel level() const noexcept { return level_; }
    int mask_index() const noexcept { return mask_; }

    bool dark(int row, int col) const { return bits_[idx(row, col)] != 0; }
    void set_dark(int row, int col, bool value) { bits_[idx(row, col)] = value ? 1 : 0; }
    ModuleRole role(int row, int col) const { return roles_[idx(row, col)]; }
    /// Defined only for DataEc modules.
    BitPosition bit_position(int row, int col) const { return bit_map_[idx(row, col)]; }

    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
    const std::vector<ModuleRole>& roles() const noexcept { return roles_; }

    /// Empty symbol of the given version with function patterns drawn and
    /// format/version info for (level, mask).
    static QrMatrix layout(int version, EcLevel level, int mask);

    /// Replaces every module bit from a row-major dark-bit vector (m*m).
    void assign_bits(std::span<const std::uint8_t> dark_bits);

    friend bool operator==(const QrMatrix&, const QrMatrix&) = default;

private:
    std::size_t idx(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(size_) +
               static_cast<std::size_t>(col);
    }
    void set_function(int row, int col, bool is_dark, ModuleRole role);
    void draw_finder(int row, int col);
    void draw_alignment(int row, int col);
    void draw_format(unsigned bits15);
    void draw_version();
    void map_codewords();

    int version_ = 0;
    int size_ = 0;
    EcLevel level_ = EcLevel::L;
    int mask_ = 0;
    std::vector<std::uint8_t> bits_;
    std::vector<ModuleRole> roles_;
    std::vector<BitPosition> bit_map_;
};

/// Mask predicate (row, col) for ISO mask index 0..7.
bool mask_bit(int mask, int row, int col);

/// Alignment pattern center coordinates for a version.
std::vector<int> alignment_centers(int version);

/// 15-bit format word (BCH(15,5) + 0x5412 mask).
unsigned format_bits(EcLevel level, int mask);
/// 18-bit version word (BCH(18,6)); versions >= 7.
unsigned version_bits(int version);

struct FormatInfo {
    EcLevel level = EcLevel::L;
    int mask = 0;
    int distance = 0;  // Hamming distance to the nearest valid word
};

/// Nearest valid format word within distance 3, or nullopt.
std::optional<FormatInfo> decode_format_word(unsigned raw15);

/// Places the frame in ISO zig-zag order with the mask applied.
QrMatrix build_matrix(const CodewordFrame& frame, int mask);

/// Inverse of build_matrix. Reads both format copies; throws FormatInfoError
/// when neither is within BCH correction distance.
CodewordFrame read_matrix(const QrMatrix& matrix);
/// As above; also reports the format word that was used.
CodewordFrame read_matrix(const QrMatrix& matrix, FormatInfo& format);

}  // namespace artqr
