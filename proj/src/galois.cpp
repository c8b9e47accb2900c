// SPDX-License-Identifier: Apache-2.0
#include "artqr/galois.hpp"

namespace artqr {

GaloisField256::GaloisField256() {
    unsigned x = 1;
    for (int i = 0; i < 255; ++i) {
        exp_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x);
        log_[x] = i;
        x <<= 1;
        if (x & 0x100) x ^= kPrimitive;
    }
    for (int i = 255; i < 512; ++i)
        exp_[static_cast<std::size_t>(i)] = exp_[static_cast<std::size_t>(i - 255)];
    log_[0] = 0;
}

const GaloisField256& GaloisField256::instance() {
    static const GaloisField256 field;
    return field;
}

}  // namespace artqr
