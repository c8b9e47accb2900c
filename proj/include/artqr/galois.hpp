// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace artqr {

/// GF(2^8) arithmetic over the QR primitive polynomial x^8+x^4+x^3+x^2+1.
class GaloisField256 {
public:
    static constexpr unsigned kPrimitive = 0x11D;

    static const GaloisField256& instance();

    std::uint8_t exp(int power) const noexcept {
        power %= 255;
        if (power < 0) power += 255;
        return exp_[static_cast<std::size_t>(power)];
    }
    /// Undefined for zero.
    int log(std::uint8_t value) const noexcept { return log_[value]; }

    std::uint8_t mul(std::uint8_t a, std::uint8_t b) const noexcept {
        if (a == 0 || b == 0) return 0;
        return exp_[static_cast<std::size_t>(log_[a] + log_[b])];
    }
    std::uint8_t div(std::uint8_t a, std::uint8_t b) const noexcept {
        // b != 0 is a precondition
        if (a == 0) return 0;
        return exp_[static_cast<std::size_t>(log_[a] + 255 - log_[b])];
    }
    std::uint8_t inv(std::uint8_t a) const noexcept { return exp_[static_cast<std::size_t>(255 - log_[a])]; }

    const std::array<std::uint8_t, 512>& exp_table() const noexcept { return exp_; }
    const std::array<int, 256>& log_table() const noexcept { return log_; }

private:
    GaloisField256();

    // Doubled so that log[a] + log[b] indexes without a modulo.
    std::array<std::uint8_t, 512> exp_{};
    std::array<int, 256> log_{};
};

}  // namespace artqr
