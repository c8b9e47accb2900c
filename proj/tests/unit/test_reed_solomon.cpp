// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <random>

#include "artqr/errors.hpp"
#include "artqr/galois.hpp"
#include "artqr/qr_code.hpp"
#include "artqr/reed_solomon.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace artqr;

namespace {

// Reference GF(256) arithmetic: shift-and-add multiply reduced by x^8+x^4+x^3+x^2+1.
std::uint8_t slow_mul(std::uint8_t a, std::uint8_t b) {
    unsigned acc = 0, x = a;
    for (int i = 0; i < 8; ++i) {
        if (b & (1u << i)) acc ^= x << i;
    }
    for (int bit = 15; bit >= 8; --bit)
        if (acc & (1u << bit)) acc ^= 0x11Du << (bit - 8);
    return static_cast<std::uint8_t>(acc);
}

std::uint8_t slow_pow(std::uint8_t a, int e) {
    std::uint8_t r = 1;
    for (int i = 0; i < e; ++i) r = slow_mul(r, a);
    return r;
}

// Syndrome j of a codeword whose first byte is the highest-degree coefficient.
std::vector<std::uint8_t> slow_syndromes(const Bytes& word, std::size_t ec_len) {
    std::vector<std::uint8_t> s(ec_len, 0);
    for (std::size_t j = 0; j < ec_len; ++j) {
        const std::uint8_t x = slow_pow(2, static_cast<int>(j));
        std::uint8_t acc = 0;
        for (std::uint8_t c : word) acc = static_cast<std::uint8_t>(slow_mul(acc, x) ^ c);
        s[j] = acc;
    }
    return s;
}

// Syndrome contribution of error value e at position pos of an n-symbol word.
std::uint8_t error_syndrome(std::size_t n, std::size_t pos, std::uint8_t e, std::size_t j) {
    const int degree = static_cast<int>(n - 1 - pos);
    return slow_mul(e, slow_pow(slow_pow(2, static_cast<int>(j)), degree));
}

struct ErrorPattern {
    std::vector<std::size_t> positions;
    std::vector<std::uint8_t> values;
};

// Every error pattern of weight <= 2 whose syndromes match; brute force.
std::vector<ErrorPattern> patterns_up_to_two(const std::vector<std::uint8_t>& synd, std::size_t n) {
    std::vector<ErrorPattern> found;
    const std::size_t r = synd.size();
    if (std::all_of(synd.begin(), synd.end(), [](auto v) { return v == 0; })) return {ErrorPattern{}};
    for (std::size_t p = 0; p < n; ++p)
        for (int e = 1; e < 256; ++e) {
            bool ok = true;
            for (std::size_t j = 0; j < r && ok; ++j) ok = error_syndrome(n, p, static_cast<std::uint8_t>(e), j) == synd[j];
            if (ok) found.push_back({{p}, {static_cast<std::uint8_t>(e)}});
        }
    for (std::size_t p1 = 0; p1 < n; ++p1)
        for (std::size_t p2 = p1 + 1; p2 < n; ++p2)
            for (int e1 = 1; e1 < 256; ++e1) {
                // S_0 = e1 + e2 fixes e2
                const auto e2 = static_cast<std::uint8_t>(synd[0] ^ e1);
                if (e2 == 0) continue;
                bool ok = true;
                for (std::size_t j = 1; j < r && ok; ++j)
                    ok = (error_syndrome(n, p1, static_cast<std::uint8_t>(e1), j) ^ error_syndrome(n, p2, e2, j)) == synd[j];
                if (ok) found.push_back({{p1, p2}, {static_cast<std::uint8_t>(e1), e2}});
            }
    return found;
}

std::size_t hamming(const Bytes& a, const Bytes& b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

Bytes codeword(const Bytes& data, std::size_t ec_len) {
    Bytes word = data;
    const Bytes ec = rs_encode(data, ec_len);
    word.insert(word.end(), ec.begin(), ec.end());
    return word;
}

void inject(Bytes& word, std::size_t count, std::mt19937_64& rng) {
    std::vector<std::size_t> pos(word.size());
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
    std::shuffle(pos.begin(), pos.end(), rng);
    std::uniform_int_distribution<int> d(1, 255);
    for (std::size_t i = 0; i < count; ++i) word[pos[i]] ^= static_cast<std::uint8_t>(d(rng));
}

}  // namespace

TEST_SUITE("galois") {
    TEST_CASE("table multiply agrees with shift-and-add multiply on all pairs") {
        const auto& f = GaloisField256::instance();
        for (int a = 0; a < 256; ++a)
            for (int b = 0; b < 256; ++b)
                REQUIRE(f.mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)) ==
                        slow_mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)));
    }

    TEST_CASE("alpha = 2 generates the multiplicative group") {
        const auto& f = GaloisField256::instance();
        std::vector<bool> seen(256, false);
        for (int i = 0; i < 255; ++i) {
            const auto v = f.exp(i);
            CHECK_FALSE(seen[v]);
            seen[v] = true;
            CHECK(f.log(v) == i);
        }
        CHECK(f.exp(255) == 1);
        CHECK(f.exp(-1) == f.exp(254));
    }

    TEST_CASE("inverse and division") {
        const auto& f = GaloisField256::instance();
        for (int a = 1; a < 256; ++a) {
            const auto x = static_cast<std::uint8_t>(a);
            CHECK(f.mul(x, f.inv(x)) == 1);
            for (int b = 1; b < 256; b += 17) CHECK(f.mul(f.div(x, static_cast<std::uint8_t>(b)), static_cast<std::uint8_t>(b)) == x);
        }
        CHECK(f.div(0, 7) == 0);
    }
}

TEST_SUITE("reed_solomon") {
    TEST_CASE("generator vanishes at alpha^0 .. alpha^(n-1)") {
        for (std::size_t n : {2u, 7u, 10u, 26u, 30u}) {
            const Bytes g = rs_generator(n);
            REQUIRE(g.size() == n);
            // full monic polynomial, highest degree first
            Bytes full{1};
            full.insert(full.end(), g.begin(), g.end());
            for (std::size_t i = 0; i < n; ++i) {
                const std::uint8_t x = slow_pow(2, static_cast<int>(i));
                std::uint8_t acc = 0;
                for (auto c : full) acc = static_cast<std::uint8_t>(slow_mul(acc, x) ^ c);
                CHECK(acc == 0);
            }
        }
    }

    TEST_CASE("known answer: 1-M HELLO WORLD parity codewords") {
        const Bytes data{32, 91, 11, 120, 209, 114, 220, 77, 67, 64, 236, 17, 236, 17, 236, 17};
        const Bytes expected{196, 35, 39, 119, 235, 215, 231, 226, 93, 23};
        CHECK(rs_encode(data, 10) == expected);
    }

    TEST_CASE("encoded words have zero syndromes (reference evaluation)") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 50; ++trial) {
            const Bytes word = codeword(testing::random_bytes(rng, 1 + trial % 40), 2 + trial % 20);
            const auto s = slow_syndromes(word, 2 + trial % 20);
            CHECK(std::all_of(s.begin(), s.end(), [](auto v) { return v == 0; }));
            CHECK(rs_syndromes(word, 2 + trial % 20) == Bytes(s.begin(), s.end()));
        }
    }

    TEST_CASE("RS(15,9): every single error matches the brute-force oracle") {
        std::mt19937_64 rng(3);
        const Bytes data = testing::random_bytes(rng, 9);
        const Bytes clean = codeword(data, 6);
        for (std::size_t p = 0; p < 15; ++p)
            for (int e = 1; e < 256; ++e) {
                Bytes word = clean;
                word[p] ^= static_cast<std::uint8_t>(e);
                const RsDecoded out = rs_decode(word, 6);
                REQUIRE(out.payload == data);
                REQUIRE(out.corrected == 1);
            }
    }

    TEST_CASE("RS(15,9): double errors agree with the brute-force oracle") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 40; ++trial) {
            const Bytes data = testing::random_bytes(rng, 9);
            Bytes word = codeword(data, 6);
            inject(word, 2, rng);
            const auto oracle = patterns_up_to_two(slow_syndromes(word, 6), 15);
            // minimum distance 7: a weight-2 pattern is the unique explanation
            REQUIRE(oracle.size() == 1);
            Bytes repaired = word;
            for (std::size_t i = 0; i < oracle[0].positions.size(); ++i)
                repaired[oracle[0].positions[i]] ^= oracle[0].values[i];
            const RsDecoded out = rs_decode(word, 6);
            CHECK(out.corrected == 2);
            CHECK(out.payload == Bytes(repaired.begin(), repaired.begin() + 9));
            CHECK(out.payload == data);
        }
    }

    TEST_CASE("RS(15,9): triple errors are corrected, quadruple errors never yield a non-codeword") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 200; ++trial) {
            const Bytes data = testing::random_bytes(rng, 9);
            Bytes word = codeword(data, 6);
            inject(word, 3, rng);
            const RsDecoded out = rs_decode(word, 6);
            CHECK(out.payload == data);
            CHECK(out.corrected == 3);
        }
        int rejected = 0;
        for (int trial = 0; trial < 300; ++trial) {
            const Bytes data = testing::random_bytes(rng, 9);
            Bytes word = codeword(data, 6);
            inject(word, 4, rng);
            try {
                const RsDecoded out = rs_decode(word, 6);
                // a miscorrection must still land on a codeword within distance 3
                const Bytes landed = codeword(out.payload, 6);
                CHECK(hamming(landed, word) <= 3);
                CHECK(out.payload != data);
            } catch (const UncorrectableError&) {
                ++rejected;
            }
        }
        CHECK(rejected > 200);
    }

    TEST_CASE("v5-L block: up to 13 errors recover, 20 errors are rejected") {
        const BlockLayout layout = block_layout(5, EcLevel::L);
        REQUIRE(layout.block_count() == 1);
        REQUIRE(layout.ec_per_block == 26);
        std::mt19937_64 rng(9);
        for (int trial = 0; trial < 200; ++trial) {
            const Bytes data = testing::random_bytes(rng, 108);
            Bytes word = codeword(data, 26);
            const std::size_t errors = static_cast<std::size_t>(trial % 14);
            inject(word, errors, rng);
            const RsDecoded out = rs_decode(word, 26);
            REQUIRE(out.payload == data);
            CHECK(out.corrected == errors);
        }
        for (int trial = 0; trial < 50; ++trial) {
            const Bytes data = testing::random_bytes(rng, 108);
            Bytes word = codeword(data, 26);
            inject(word, 20, rng);
            CHECK_THROWS_AS(rs_decode(word, 26), UncorrectableError);
        }
    }

    TEST_CASE("errors confined to parity bytes leave the payload intact") {
        std::mt19937_64 rng(13);
        const Bytes data = testing::random_bytes(rng, 20);
        Bytes word = codeword(data, 10);
        for (std::size_t i = 20; i < 25; ++i) word[i] ^= 0x5A;
        const RsDecoded out = rs_decode(word, 10);
        CHECK(out.payload == data);
        CHECK(out.corrected == 5);
    }

    TEST_CASE("invalid frame lengths") {
        CHECK_THROWS_AS(rs_decode(Bytes(3, 0), 4), UncorrectableError);
        CHECK_THROWS_AS(rs_decode(Bytes(256, 0), 4), UncorrectableError);
    }
}
