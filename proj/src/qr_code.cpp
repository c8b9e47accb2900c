// SPDX-License-Identifier: Apache-2.0
#include "artqr/qr_code.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>

#include "artqr/errors.hpp"

namespace artqr {
namespace {

struct BlockSpec {
    std::uint8_t ec_per_block;
    std::uint8_t group1_blocks;
    std::uint8_t group1_data;
    std::uint8_t group2_blocks;
};

// ISO/IEC 18004 Table 9, versions 1..10, levels in L, M, Q, H order.
constexpr std::array<std::array<BlockSpec, 4>, 10> kBlocks = {{
    {{{7, 1, 19, 0}, {10, 1, 16, 0}, {13, 1, 13, 0}, {17, 1, 9, 0}}},
    {{{10, 1, 34, 0}, {16, 1, 28, 0}, {22, 1, 22, 0}, {28, 1, 16, 0}}},
    {{{15, 1, 55, 0}, {26, 1, 44, 0}, {18, 2, 17, 0}, {22, 2, 13, 0}}},
    {{{20, 1, 80, 0}, {18, 2, 32, 0}, {26, 2, 24, 0}, {16, 4, 9, 0}}},
    {{{26, 1, 108, 0}, {24, 2, 43, 0}, {18, 2, 15, 2}, {22, 2, 11, 2}}},
    {{{18, 2, 68, 0}, {16, 4, 27, 0}, {24, 4, 19, 0}, {28, 4, 15, 0}}},
    {{{20, 2, 78, 0}, {18, 4, 31, 0}, {18, 2, 14, 4}, {26, 4, 13, 1}}},
    {{{24, 2, 97, 0}, {22, 2, 38, 2}, {22, 4, 18, 2}, {26, 4, 14, 2}}},
    {{{30, 2, 116, 0}, {22, 3, 36, 2}, {20, 4, 16, 4}, {24, 4, 12, 4}}},
    {{{18, 2, 68, 2}, {26, 4, 43, 1}, {24, 6, 19, 2}, {28, 6, 15, 2}}},
}};

void check_version(int version) {
    if (version < kMinVersion || version > kMaxVersion)
        throw std::invalid_argument("QR version " + std::to_string(version) +
                                    " outside supported range 1..10");
}

void check_mask(int mask) {
    if (mask < 0 || mask > 7) throw std::invalid_argument("mask index must be 0..7");
}

class BitWriter {
public:
    explicit BitWriter(std::size_t capacity_bits) : bytes_((capacity_bits + 7) / 8, 0) {}

    void put(unsigned value, int width) {
        for (int i = width - 1; i >= 0; --i) {
            if ((value >> i) & 1u) bytes_[pos_ / 8] |= static_cast<std::uint8_t>(0x80u >> (pos_ % 8));
            ++pos_;
        }
    }
    std::size_t position() const noexcept { return pos_; }
    Bytes take() { return std::move(bytes_); }

private:
    Bytes bytes_;
    std::size_t pos_ = 0;
};

bool get_bit(const Bytes& bytes, std::size_t index) {
    return (bytes[index / 8] >> (7 - index % 8)) & 1u;
}

unsigned read_bits(const Bytes& bytes, std::size_t& pos, int width) {
    unsigned v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | (get_bit(bytes, pos++) ? 1u : 0u);
    return v;
}

unsigned bch_remainder(unsigned value, unsigned generator, int gen_degree) {
    const int top = std::bit_width(value) - 1;
    for (int i = top; i >= gen_degree; --i)
        if ((value >> i) & 1u) value ^= generator << (i - gen_degree);
    return value;
}

}  // namespace

std::string_view to_string(EcLevel level) {
    switch (level) {
        case EcLevel::L: return "L";
        case EcLevel::M: return "M";
        case EcLevel::Q: return "Q";
        case EcLevel::H: return "H";
    }
    return "?";
}

EcLevel parse_ec_level(std::string_view text) {
    if (text == "L" || text == "l") return EcLevel::L;
    if (text == "M" || text == "m") return EcLevel::M;
    if (text == "Q" || text == "q") return EcLevel::Q;
    if (text == "H" || text == "h") return EcLevel::H;
    throw std::invalid_argument("unknown error-correction level '" + std::string(text) + "'");
}

unsigned ec_level_format_bits(EcLevel level) {
    switch (level) {
        case EcLevel::L: return 1;
        case EcLevel::M: return 0;
        case EcLevel::Q: return 3;
        case EcLevel::H: return 2;
    }
    return 0;
}

std::size_t BlockLayout::data_offset(std::size_t block) const noexcept {
    if (block <= group1_blocks) return block * group1_data;
    return group1_blocks * group1_data + (block - group1_blocks) * (group1_data + 1);
}

std::vector<std::size_t> BlockLayout::interleave_order() const {
    std::vector<std::size_t> order;
    order.reserve(total_codewords());
    const std::size_t longest = group2_blocks > 0 ? group1_data + 1 : group1_data;
    for (std::size_t i = 0; i < longest; ++i)
        for (std::size_t b = 0; b < block_count(); ++b)
            if (i < data_len(b)) order.push_back(data_offset(b) + i);
    const std::size_t data_total = total_data();
    for (std::size_t i = 0; i < ec_per_block; ++i)
        for (std::size_t b = 0; b < block_count(); ++b)
            order.push_back(data_total + b * ec_per_block + i);
    return order;
}

BlockLayout block_layout(int version, EcLevel level) {
    check_version(version);
    const BlockSpec& s =
        kBlocks[static_cast<std::size_t>(version - 1)][static_cast<std::size_t>(level)];
    return BlockLayout{version, level, s.ec_per_block, s.group1_blocks, s.group1_data, s.group2_blocks};
}

int byte_count_bits(int version) { return version <= 9 ? 8 : 16; }

std::size_t byte_capacity(int version, EcLevel level) {
    const BlockLayout bl = block_layout(version, level);
    const std::size_t bits = 8 * bl.total_data();
    const std::size_t header = 4 + static_cast<std::size_t>(byte_count_bits(version));
    return bits < header ? 0 : (bits - header) / 8;
}

bool CodewordFrame::bit(std::size_t index) const noexcept {
    const std::size_t byte = index / 8;
    const std::uint8_t v = byte < data.size() ? data[byte] : ec[byte - data.size()];
    return (v >> (7 - index % 8)) & 1u;
}

void CodewordFrame::flip_bit(std::size_t index) noexcept {
    const std::size_t byte = index / 8;
    const auto m = static_cast<std::uint8_t>(0x80u >> (index % 8));
    if (byte < data.size())
        data[byte] ^= m;
    else
        ec[byte - data.size()] ^= m;
}

void CodewordFrame::recompute_ec() {
    ec.assign(layout.total_ec(), 0);
    for (std::size_t b = 0; b < layout.block_count(); ++b) {
        const auto block = std::span(data).subspan(layout.data_offset(b), layout.data_len(b));
        const Bytes parity = rs_encode(block, layout.ec_per_block);
        std::copy(parity.begin(), parity.end(),
                  ec.begin() + static_cast<std::ptrdiff_t>(b * layout.ec_per_block));
    }
}

bool CodewordFrame::syndromes_zero() const {
    for (std::size_t b = 0; b < layout.block_count(); ++b) {
        Bytes block(data.begin() + static_cast<std::ptrdiff_t>(layout.data_offset(b)),
                    data.begin() + static_cast<std::ptrdiff_t>(layout.data_offset(b) + layout.data_len(b)));
        block.insert(block.end(), ec.begin() + static_cast<std::ptrdiff_t>(b * layout.ec_per_block),
                     ec.begin() + static_cast<std::ptrdiff_t>((b + 1) * layout.ec_per_block));
        const Bytes s = rs_syndromes(block, layout.ec_per_block);
        if (!std::all_of(s.begin(), s.end(), [](std::uint8_t v) { return v == 0; })) return false;
    }
    return true;
}

CodewordFrame encode_message(std::span<const std::uint8_t> payload, int version, EcLevel level) {
    CodewordFrame frame;
    frame.layout = block_layout(version, level);
    const std::size_t capacity_bits = 8 * frame.layout.total_data();
    const int count_bits = byte_count_bits(version);
    if (payload.size() > byte_capacity(version, level) || payload.size() >= (1u << count_bits))
        throw CapacityExceeded("payload of " + std::to_string(payload.size()) +
                               " bytes exceeds the byte-mode capacity of version " +
                               std::to_string(version) + "-" + std::string(to_string(level)));

    BitWriter w(capacity_bits);
    w.put(0b0100, 4);
    w.put(static_cast<unsigned>(payload.size()), count_bits);
    for (std::uint8_t b : payload) w.put(b, 8);
    const std::size_t terminator = std::min<std::size_t>(4, capacity_bits - w.position());
    w.put(0, static_cast<int>(terminator));
    const std::size_t first_free = w.position();
    // zero fill to the byte boundary, then alternating pad codewords
    const std::size_t aligned = (first_free + 7) / 8 * 8;
    w.put(0, static_cast<int>(aligned - first_free));
    for (bool ec = true; w.position() < capacity_bits; ec = !ec) w.put(ec ? 0xEC : 0x11, 8);

    frame.data = w.take();
    for (std::size_t i = first_free; i < capacity_bits; ++i) frame.free_bit_positions.push_back(i);
    frame.recompute_ec();
    return frame;
}

CodewordFrame encode_message(std::string_view text, int version, EcLevel level) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(text.data());
    return encode_message(std::span(p, text.size()), version, level);
}

Bytes parse_payload(const CodewordFrame& frame) {
    const std::size_t total = 8 * frame.data.size();
    std::size_t pos = 0;
    if (total < 4) throw UncorrectableError("data region too short");
    const unsigned mode = read_bits(frame.data, pos, 4);
    if (mode != 0b0100) throw UncorrectableError("unsupported segment mode " + std::to_string(mode));
    const int count_bits = byte_count_bits(frame.layout.version);
    if (pos + static_cast<std::size_t>(count_bits) > total) throw UncorrectableError("truncated header");
    const std::size_t count = read_bits(frame.data, pos, count_bits);
    if (pos + 8 * count > total) throw UncorrectableError("byte count exceeds data region");
    Bytes out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(static_cast<std::uint8_t>(read_bits(frame.data, pos, 8)));
    return out;
}

FrameDecode decode_frame(const CodewordFrame& frame) {
    const BlockLayout& bl = frame.layout;
    CodewordFrame fixed = frame;
    std::size_t corrected = 0;
    for (std::size_t b = 0; b < bl.block_count(); ++b) {
        const auto off = static_cast<std::ptrdiff_t>(bl.data_offset(b));
        const auto len = static_cast<std::ptrdiff_t>(bl.data_len(b));
        const auto ec_off = static_cast<std::ptrdiff_t>(b * bl.ec_per_block);
        Bytes block(frame.data.begin() + off, frame.data.begin() + off + len);
        block.insert(block.end(), frame.ec.begin() + ec_off,
                     frame.ec.begin() + ec_off + static_cast<std::ptrdiff_t>(bl.ec_per_block));
        RsDecoded d = rs_decode(block, bl.ec_per_block);
        corrected += d.corrected;
        std::copy(d.payload.begin(), d.payload.end(), fixed.data.begin() + off);
    }
    return {parse_payload(fixed), corrected};
}

// ---------------------------------------------------------------------------

bool mask_bit(int mask, int row, int col) {
    const int x = col;
    const int y = row;
    switch (mask) {
        case 0: return (x + y) % 2 == 0;
        case 1: return y % 2 == 0;
        case 2: return x % 3 == 0;
        case 3: return (x + y) % 3 == 0;
        case 4: return (x / 3 + y / 2) % 2 == 0;
        case 5: return x * y % 2 + x * y % 3 == 0;
        case 6: return (x * y % 2 + x * y % 3) % 2 == 0;
        case 7: return ((x + y) % 2 + x * y % 3) % 2 == 0;
        default: throw std::invalid_argument("mask index must be 0..7");
    }
}

std::vector<int> alignment_centers(int version) {
    check_version(version);
    if (version == 1) return {};
    const int count = version / 7 + 2;
    const int step = (version * 4 + count * 2 + 1) / (count * 2 - 2) * 2;
    std::vector<int> result;
    for (int i = 0, pos = version * 4 + 10; i < count - 1; ++i, pos -= step)
        result.insert(result.begin(), pos);
    result.insert(result.begin(), 6);
    return result;
}

unsigned format_bits(EcLevel level, int mask) {
    check_mask(mask);
    const unsigned data = (ec_level_format_bits(level) << 3) | static_cast<unsigned>(mask);
    return ((data << 10) | bch_remainder(data << 10, 0x537, 10)) ^ 0x5412;
}

unsigned version_bits(int version) {
    const auto v = static_cast<unsigned>(version);
    return (v << 12) | bch_remainder(v << 12, 0x1F25, 12);
}

std::optional<FormatInfo> decode_format_word(unsigned raw15) {
    std::optional<FormatInfo> best;
    for (EcLevel level : {EcLevel::L, EcLevel::M, EcLevel::Q, EcLevel::H}) {
        for (int mask = 0; mask < 8; ++mask) {
            const int d = std::popcount(raw15 ^ format_bits(level, mask));
            if (d <= 3 && (!best || d < best->distance)) best = FormatInfo{level, mask, d};
        }
    }
    return best;
}

void QrMatrix::set_function(int row, int col, bool is_dark, ModuleRole role) {
    bits_[idx(row, col)] = is_dark ? 1 : 0;
    roles_[idx(row, col)] = role;
}

void QrMatrix::draw_finder(int row, int col) {
    for (int dy = -4; dy <= 4; ++dy) {
        for (int dx = -4; dx <= 4; ++dx) {
            const int r = row + dy;
            const int c = col + dx;
            if (r < 0 || r >= size_ || c < 0 || c >= size_) continue;
            const int dist = std::max(std::abs(dx), std::abs(dy));
            if (dist == 4)
                set_function(r, c, false, ModuleRole::Separator);
            else
                set_function(r, c, dist != 2, ModuleRole::Finder);
        }
    }
}

void QrMatrix::draw_alignment(int row, int col) {
    for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx)
            set_function(row + dy, col + dx, std::max(std::abs(dx), std::abs(dy)) != 1,
                         ModuleRole::Alignment);
}

void QrMatrix::draw_format(unsigned bits) {
    auto bit = [bits](int i) { return ((bits >> i) & 1u) != 0; };
    // first copy around the top-left finder; (x, y) = (col, row)
    for (int i = 0; i <= 5; ++i) set_function(i, 8, bit(i), ModuleRole::Format);
    set_function(7, 8, bit(6), ModuleRole::Format);
    set_function(8, 8, bit(7), ModuleRole::Format);
    set_function(8, 7, bit(8), ModuleRole::Format);
    for (int i = 9; i < 15; ++i) set_function(8, 14 - i, bit(i), ModuleRole::Format);
    // second copy split between top-right and bottom-left
    for (int i = 0; i < 8; ++i) set_function(8, size_ - 1 - i, bit(i), ModuleRole::Format);
    for (int i = 8; i < 15; ++i) set_function(size_ - 15 + i, 8, bit(i), ModuleRole::Format);
    set_function(size_ - 8, 8, true, ModuleRole::DarkModule);
}

void QrMatrix::draw_version() {
    if (version_ < 7) return;
    const unsigned bits = version_bits(version_);
    for (int i = 0; i < 18; ++i) {
        const bool b = ((bits >> i) & 1u) != 0;
        const int a = size_ - 11 + i % 3;
        const int c = i / 3;
        set_function(c, a, b, ModuleRole::Version);
        set_function(a, c, b, ModuleRole::Version);
    }
}

void QrMatrix::map_codewords() {
    const BlockLayout bl = block_layout(version_, level_);
    const std::vector<std::size_t> order = bl.interleave_order();
    const std::size_t total_bits = 8 * order.size();
    std::size_t i = 0;
    for (int right = size_ - 1; right >= 1; right -= 2) {
        if (right == 6) right = 5;
        for (int vert = 0; vert < size_; ++vert) {
            for (int j = 0; j < 2; ++j) {
                const int col = right - j;
                const bool upward = ((right + 1) & 2) == 0;
                const int row = upward ? size_ - 1 - vert : vert;
                const std::size_t k = idx(row, col);
                if (roles_[k] != ModuleRole::DataEc) continue;
                if (i < total_bits) {
                    bit_map_[k] = BitPosition{static_cast<std::uint32_t>(order[i / 8]),
                                              static_cast<std::uint8_t>(i % 8)};
                    ++i;
                } else {
                    roles_[k] = ModuleRole::Remainder;
                }
            }
        }
    }
    if (i != total_bits) throw std::logic_error("codeword capacity does not match the module layout");
}

QrMatrix QrMatrix::layout(int version, EcLevel level, int mask) {
    check_version(version);
    check_mask(mask);
    QrMatrix m;
    m.version_ = version;
    m.size_ = symbol_size(version);
    m.level_ = level;
    m.mask_ = mask;
    const auto n = static_cast<std::size_t>(m.size_) * static_cast<std::size_t>(m.size_);
    m.bits_.assign(n, 0);
    m.roles_.assign(n, ModuleRole::DataEc);
    m.bit_map_.assign(n, BitPosition{});

    for (int i = 0; i < m.size_; ++i) {
        m.set_function(6, i, i % 2 == 0, ModuleRole::Timing);
        m.set_function(i, 6, i % 2 == 0, ModuleRole::Timing);
    }
    m.draw_finder(3, 3);
    m.draw_finder(3, m.size_ - 4);
    m.draw_finder(m.size_ - 4, 3);
    const std::vector<int> centers = alignment_centers(version);
    const int count = static_cast<int>(centers.size());
    for (int i = 0; i < count; ++i) {
        for (int j = 0; j < count; ++j) {
            const bool corner = (i == 0 && j == 0) || (i == 0 && j == count - 1) ||
                                (i == count - 1 && j == 0);
            if (!corner) m.draw_alignment(centers[static_cast<std::size_t>(i)],
                                          centers[static_cast<std::size_t>(j)]);
        }
    }
    m.draw_format(format_bits(level, mask));
    m.draw_version();
    m.map_codewords();
    return m;
}

void QrMatrix::assign_bits(std::span<const std::uint8_t> dark_bits) {
    if (dark_bits.size() != bits_.size()) throw DimensionMismatch("assign_bits: expected m*m bits");
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] = dark_bits[i] ? 1 : 0;
}

QrMatrix build_matrix(const CodewordFrame& frame, int mask) {
    QrMatrix m = QrMatrix::layout(frame.layout.version, frame.layout.level, mask);
    for (int row = 0; row < m.size(); ++row) {
        for (int col = 0; col < m.size(); ++col) {
            const ModuleRole role = m.role(row, col);
            if (role == ModuleRole::DataEc)
                m.set_dark(row, col, frame.bit(m.bit_position(row, col).flat()) != mask_bit(mask, row, col));
            else if (role == ModuleRole::Remainder)
                m.set_dark(row, col, mask_bit(mask, row, col));
        }
    }
    return m;
}

CodewordFrame read_matrix(const QrMatrix& matrix) {
    FormatInfo ignored;
    return read_matrix(matrix, ignored);
}

CodewordFrame read_matrix(const QrMatrix& matrix, FormatInfo& format) {
    const int n = matrix.size();
    unsigned copy1 = 0;
    unsigned copy2 = 0;
    auto put = [&matrix](unsigned& word, int i, int row, int col) {
        if (matrix.dark(row, col)) word |= 1u << i;
    };
    for (int i = 0; i <= 5; ++i) put(copy1, i, i, 8);
    put(copy1, 6, 7, 8);
    put(copy1, 7, 8, 8);
    put(copy1, 8, 8, 7);
    for (int i = 9; i < 15; ++i) put(copy1, i, 8, 14 - i);
    for (int i = 0; i < 8; ++i) put(copy2, i, 8, n - 1 - i);
    for (int i = 8; i < 15; ++i) put(copy2, i, n - 15 + i, 8);

    std::optional<FormatInfo> info = decode_format_word(copy1);
    const std::optional<FormatInfo> second = decode_format_word(copy2);
    if (!info || (second && second->distance < info->distance)) info = second;
    if (!info) throw FormatInfoError("neither format-information copy is within BCH distance 3");
    format = *info;

    const QrMatrix layout = QrMatrix::layout(matrix.version(), info->level, info->mask);
    CodewordFrame frame;
    frame.layout = block_layout(matrix.version(), info->level);
    frame.data.assign(frame.layout.total_data(), 0);
    frame.ec.assign(frame.layout.total_ec(), 0);
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            if (layout.role(row, col) != ModuleRole::DataEc) continue;
            const bool value = matrix.dark(row, col) != mask_bit(info->mask, row, col);
            const std::size_t flat = layout.bit_position(row, col).flat();
            if (value != frame.bit(flat)) frame.flip_bit(flat);
        }
    }
    // Recover the free region when the header parses.
    try {
        const Bytes payload = parse_payload(frame);
        const std::size_t used = 4 + static_cast<std::size_t>(byte_count_bits(matrix.version())) + 8 * payload.size();
        const std::size_t capacity = 8 * frame.data.size();
        for (std::size_t i = std::min(capacity, used + 4); i < capacity; ++i)
            frame.free_bit_positions.push_back(i);
    } catch (const Error&) {
    }
    return frame;
}

}  // namespace artqr
