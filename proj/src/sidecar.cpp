// SPDX-License-Identifier: Apache-2.0
#include "artqr/sidecar.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "artqr/errors.hpp"

namespace artqr {
namespace {

constexpr char kHex[] = "0123456789abcdef";

std::string pack_bits(const std::vector<std::uint8_t>& bits) {
    std::string out;
    out.reserve((bits.size() + 3) / 4);
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        unsigned nibble = 0;
        for (std::size_t j = 0; j < 4; ++j) nibble = (nibble << 1) | ((i + j < bits.size() && bits[i + j]) ? 1U : 0U);
        out.push_back(kHex[nibble]);
    }
    return out;
}

std::vector<std::uint8_t> unpack_bits(std::string_view hex, std::size_t count) {
    if (hex.size() != (count + 3) / 4) throw std::invalid_argument("sidecar bits: wrong length for the symbol size");
    std::vector<std::uint8_t> bits(count);
    for (std::size_t i = 0; i < hex.size(); ++i) {
        const char c = hex[i];
        unsigned v;
        if (c >= '0' && c <= '9')
            v = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f')
            v = static_cast<unsigned>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F')
            v = static_cast<unsigned>(c - 'A' + 10);
        else
            throw std::invalid_argument("sidecar bits: not a hex digit");
        for (std::size_t j = 0; j < 4; ++j) {
            const std::size_t k = i * 4 + j;
            const bool set = (v >> (3 - j)) & 1U;
            if (k < count)
                bits[k] = set ? 1 : 0;
            else if (set)
                throw std::invalid_argument("sidecar bits: padding bits must be zero");
        }
    }
    return bits;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    if constexpr (std::is_floating_point_v<T>) {
        std::size_t used = 0;
        try {
            out = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || value.empty()) throw std::invalid_argument("sidecar " + key + ": not a number");
    } else {
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc() || ptr != value.data() + value.size())
            throw std::invalid_argument("sidecar " + key + ": not an integer");
    }
    return out;
}

std::string format_double(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

}  // namespace

QrMatrix SidecarMeta::scheduled() const {
    validate();
    QrMatrix m = QrMatrix::layout(version, level, mask);
    m.assign_bits(dark_bits);
    return m;
}

void SidecarMeta::validate() const {
    if (version < kMinVersion || version > kMaxVersion) throw std::invalid_argument("sidecar: unsupported version");
    if (mask < 0 || mask > 7) throw std::invalid_argument("sidecar: mask must lie in [0, 7]");
    if (grid.modules != symbol_size(version)) throw std::invalid_argument("sidecar: module count does not match version");
    if (quiet_zone < 0) throw std::invalid_argument("sidecar: negative quiet zone");
    if (grid.origin_x != quiet_zone * grid.module_px || grid.origin_y != quiet_zone * grid.module_px)
        throw std::invalid_argument("sidecar: origin does not match the quiet zone");
    if (dark_bits.size() != grid.module_count()) throw std::invalid_argument("sidecar: bit matrix must hold m*m bits");
    if (payload_sha256.size() != 64) throw std::invalid_argument("sidecar: payload digest must be 64 hex digits");
}

std::string sidecar_to_text(const SidecarMeta& meta) {
    meta.validate();
    std::ostringstream out;
    out << "format_version=" << kSidecarFormatVersion << '\n'
        << "version=" << meta.version << '\n'
        << "ec_level=" << to_string(meta.level) << '\n'
        << "mask=" << meta.mask << '\n'
        << "modules=" << meta.grid.modules << '\n'
        << "module_px=" << meta.grid.module_px << '\n'
        << "origin_x=" << meta.grid.origin_x << '\n'
        << "origin_y=" << meta.grid.origin_y << '\n'
        << "quiet_zone=" << meta.quiet_zone << '\n'
        << "bits=" << pack_bits(meta.dark_bits) << '\n'
        << "payload_sha256=" << meta.payload_sha256 << '\n'
        << "delta=" << format_double(meta.params.delta) << '\n'
        << "eta=" << format_double(meta.params.eta) << '\n'
        << "spot_radius=" << meta.params.spot_radius << '\n';
    for (const auto& line : meta.provenance) {
        if (line.find('\n') != std::string::npos) throw std::invalid_argument("sidecar: provenance must be one line");
        out << "provenance=" << line << '\n';
    }
    return out.str();
}

SidecarMeta sidecar_from_text(std::string_view text) {
    std::map<std::string, std::string> fields;
    SidecarMeta meta;
    std::istringstream in{std::string(text)};
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("sidecar: line without '=': " + line);
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (first) {
            if (key != "format_version") throw std::invalid_argument("sidecar: first field must be format_version");
            if (parse_number<int>(key, value) != kSidecarFormatVersion)
                throw std::invalid_argument("sidecar: unsupported format_version " + value);
            first = false;
            continue;
        }
        if (key == "provenance") {
            meta.provenance.push_back(value);
        } else if (!fields.emplace(key, value).second) {
            throw std::invalid_argument("sidecar: duplicate field " + key);
        }
    }
    if (first) throw std::invalid_argument("sidecar: empty document");
    auto take = [&](const std::string& key) {
        const auto it = fields.find(key);
        if (it == fields.end()) throw std::invalid_argument("sidecar: missing field " + key);
        std::string v = it->second;
        fields.erase(it);
        return v;
    };
    meta.version = parse_number<int>("version", take("version"));
    meta.level = parse_ec_level(take("ec_level"));
    meta.mask = parse_number<int>("mask", take("mask"));
    const int modules = parse_number<int>("modules", take("modules"));
    const int module_px = parse_number<int>("module_px", take("module_px"));
    const int ox = parse_number<int>("origin_x", take("origin_x"));
    const int oy = parse_number<int>("origin_y", take("origin_y"));
    meta.grid = ModuleGrid(module_px, modules, ox, oy);
    meta.quiet_zone = parse_number<int>("quiet_zone", take("quiet_zone"));
    if (modules <= 0) throw std::invalid_argument("sidecar: modules must be positive");
    meta.dark_bits = unpack_bits(take("bits"), meta.grid.module_count());
    meta.payload_sha256 = take("payload_sha256");
    meta.params.delta = parse_number<double>("delta", take("delta"));
    meta.params.eta = parse_number<double>("eta", take("eta"));
    meta.params.spot_radius = parse_number<int>("spot_radius", take("spot_radius"));
    if (!fields.empty()) throw std::invalid_argument("sidecar: unknown field " + fields.begin()->first);
    meta.validate();
    meta.params.validate(meta.grid);
    return meta;
}

void write_sidecar(const std::string& path, const SidecarMeta& meta) {
    const std::string text = sidecar_to_text(meta);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out.flush()) throw IoError("failed writing " + path);
}

SidecarMeta read_sidecar(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open sidecar " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return sidecar_from_text(buf.str());
}

std::string sha256_hex(std::span<const std::uint8_t> data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 computation failed");
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 15]);
    }
    return out;
}

std::string timestamp_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), v);
        if (ec == std::errc() && *ptr == '\0') t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace artqr
