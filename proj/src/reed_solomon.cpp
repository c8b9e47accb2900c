// SPDX-License-Identifier: Apache-2.0
#include "artqr/reed_solomon.hpp"

#include <algorithm>

#include "artqr/errors.hpp"
#include "artqr/galois.hpp"

namespace artqr {
namespace {

const GaloisField256& gf() { return GaloisField256::instance(); }

// Polynomials below are stored lowest degree first.
std::uint8_t eval_ascending(const Bytes& poly, std::uint8_t x) {
    std::uint8_t acc = 0;
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = gf().mul(acc, x) ^ *it;
    return acc;
}

}  // namespace

Bytes rs_generator(std::size_t ec_len) {
    // result holds coefficients of degrees ec_len-1 .. 0 of a monic polynomial
    Bytes result(ec_len, 0);
    if (ec_len == 0) return result;
    result.back() = 1;
    std::uint8_t root = 1;
    for (std::size_t i = 0; i < ec_len; ++i) {
        for (std::size_t j = 0; j < ec_len; ++j) {
            result[j] = gf().mul(result[j], root);
            if (j + 1 < ec_len) result[j] ^= result[j + 1];
        }
        root = gf().mul(root, 0x02);
    }
    return result;
}

Bytes rs_encode(std::span<const std::uint8_t> data, std::size_t ec_len) {
    const Bytes gen = rs_generator(ec_len);
    Bytes rem(ec_len, 0);
    for (std::uint8_t b : data) {
        const std::uint8_t factor = b ^ rem.front();
        std::rotate(rem.begin(), rem.begin() + 1, rem.end());
        rem.back() = 0;
        for (std::size_t i = 0; i < ec_len; ++i) rem[i] ^= gf().mul(gen[i], factor);
    }
    return rem;
}

Bytes rs_syndromes(std::span<const std::uint8_t> frame, std::size_t ec_len) {
    Bytes synd(ec_len, 0);
    for (std::size_t i = 0; i < ec_len; ++i) {
        const std::uint8_t x = gf().exp(static_cast<int>(i));
        std::uint8_t acc = 0;
        for (std::uint8_t c : frame) acc = gf().mul(acc, x) ^ c;
        synd[i] = acc;
    }
    return synd;
}

RsDecoded rs_decode(std::span<const std::uint8_t> frame, std::size_t ec_len) {
    if (frame.size() < ec_len || frame.size() > 255)
        throw UncorrectableError("rs_decode: frame length out of range");
    const std::size_t n = frame.size();
    const std::size_t data_len = n - ec_len;
    Bytes work(frame.begin(), frame.end());

    const Bytes synd = rs_syndromes(work, ec_len);
    if (std::all_of(synd.begin(), synd.end(), [](std::uint8_t s) { return s == 0; }))
        return {Bytes(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(data_len)), 0};

    // Berlekamp-Massey: error locator Lambda(x), ascending coefficients.
    Bytes lambda{1};
    Bytes prev{1};
    std::size_t order = 0;
    std::size_t shift = 1;
    std::uint8_t prev_disc = 1;
    for (std::size_t k = 0; k < ec_len; ++k) {
        std::uint8_t disc = synd[k];
        for (std::size_t i = 1; i <= order && i < lambda.size(); ++i)
            disc ^= gf().mul(lambda[i], synd[k - i]);
        if (disc == 0) {
            ++shift;
            continue;
        }
        const std::uint8_t coef = gf().div(disc, prev_disc);
        Bytes next = lambda;
        if (next.size() < prev.size() + shift) next.resize(prev.size() + shift, 0);
        for (std::size_t i = 0; i < prev.size(); ++i) next[i + shift] ^= gf().mul(coef, prev[i]);
        if (2 * order <= k) {
            prev = lambda;
            order = k + 1 - order;
            prev_disc = disc;
            shift = 1;
        } else {
            ++shift;
        }
        lambda = std::move(next);
    }
    while (lambda.size() > 1 && lambda.back() == 0) lambda.pop_back();
    const std::size_t degree = lambda.size() - 1;
    if (degree != order || 2 * degree > ec_len)
        throw UncorrectableError("rs_decode: too many errors for the locator");

    // Chien search: byte j carries power (n-1-j), locator X = a^(n-1-j).
    std::vector<std::size_t> positions;
    for (std::size_t j = 0; j < n; ++j) {
        const int power = static_cast<int>(n - 1 - j);
        if (eval_ascending(lambda, gf().exp(-power)) == 0) positions.push_back(j);
    }
    if (positions.size() != degree)
        throw UncorrectableError("rs_decode: locator roots do not match its degree");

    // Forney with first consecutive root a^0: e = X * Omega(X^-1) / Lambda'(X^-1).
    Bytes omega(ec_len, 0);
    for (std::size_t i = 0; i < ec_len; ++i)
        for (std::size_t j = 0; j < lambda.size() && i + j < ec_len; ++j)
            omega[i + j] ^= gf().mul(synd[i], lambda[j]);
    Bytes lambda_prime;
    for (std::size_t i = 1; i < lambda.size(); ++i)
        lambda_prime.push_back((i % 2 == 1) ? lambda[i] : 0);
    for (std::size_t j : positions) {
        const int power = static_cast<int>(n - 1 - j);
        const std::uint8_t x = gf().exp(power);
        const std::uint8_t x_inv = gf().exp(-power);
        const std::uint8_t denom = eval_ascending(lambda_prime, x_inv);
        if (denom == 0) throw UncorrectableError("rs_decode: degenerate locator derivative");
        work[j] ^= gf().mul(x, gf().div(eval_ascending(omega, x_inv), denom));
    }

    const Bytes check = rs_syndromes(work, ec_len);
    if (!std::all_of(check.begin(), check.end(), [](std::uint8_t s) { return s == 0; }))
        throw UncorrectableError("rs_decode: residual syndromes after correction");
    return {Bytes(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(data_len)), degree};
}

}  // namespace artqr
