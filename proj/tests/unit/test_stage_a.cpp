// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "artqr/decoder_model.hpp"
#include "artqr/errors.hpp"
#include "artqr/geometry.hpp"
#include "artqr/stage_a.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace artqr;

namespace {

constexpr int kA = 13;

// Per-pixel minimizer of (Wm - (w + d*G))^2 by ternary search; the first
// energy term does not depend on w.
double minimize_pixel_weight(double d, double g) {
    double lo = -2000.0, hi = 2000.0;
    auto energy = [&](double w) {
        const double t = 255.0 - (w + d * g);
        return t * t;
    };
    for (int i = 0; i < 200; ++i) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (energy(m1) < energy(m2)) hi = m2;
        else lo = m1;
    }
    return 0.5 * (lo + hi);
}

// Module weight from numerically minimized pixel weights (Wm = 255).
double numeric_module_weight(const GrayImage& gray, int row, int col, std::uint8_t target) {
    const GaussianModuleKernel kernel(kA);
    const int h = kA / 2;
    double total = 0.0;
    for (int dy = -h; dy <= h; ++dy)
        for (int dx = -h; dx <= h; ++dx) {
            const double ix = gray.at(col * kA + h + dx, row * kA + h + dy);
            total += minimize_pixel_weight(std::abs(255.0 * target - ix), kernel.at(dx, dy));
        }
    return total / 255.0;
}

struct Fixture {
    CodewordFrame frame;
    QrMatrix layout;
    GrayImage gray;
    PriorityPlan plan;
};

Fixture make_fixture(const ColorImage& image, int mask, const std::string& message = testing::kMessage) {
    Fixture f;
    f.frame = encode_message(std::string_view(message), 5, EcLevel::L);
    f.layout = QrMatrix::layout(5, EcLevel::L, mask);
    f.gray = to_gray(resize_bilinear(image, 37 * kA, 37 * kA));
    f.plan = compute_plan(f.gray, GaussianModuleKernel(kA), f.layout);
    return f;
}

}  // namespace

TEST_SUITE("geometry") {
    TEST_CASE("Gaussian module kernel is normalized and peaks at the center") {
        for (int a = 5; a <= 21; a += 2) {
            const GaussianModuleKernel k(a);
            const auto w = k.weights();
            CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(k.sigma() == doctest::Approx((a - 1) / 6.0));
            CHECK(*std::max_element(w.begin(), w.end()) == k.at(0, 0));
            CHECK(k.at(1, 2) == doctest::Approx(k.at(-2, 1)));
        }
        CHECK_THROWS_AS(GaussianModuleKernel(12), std::invalid_argument);
        CHECK_THROWS_AS(ModuleGrid(8, 37), std::invalid_argument);
    }

    TEST_CASE("disc and ring offsets") {
        CHECK(disc_offsets(0).size() == 1);
        CHECK(disc_offsets(3).size() == 29);
        for (int r = 0; r <= 6; ++r) {
            std::size_t expect = 0;
            for (int dy = -r - 2; dy <= r + 2; ++dy)
                for (int dx = -r - 2; dx <= r + 2; ++dx) {
                    const double d2 = dx * dx + dy * dy;
                    expect += d2 >= (r + 0.5) * (r + 0.5) && d2 < (r + 1.5) * (r + 1.5);
                }
            CHECK(ring_offsets(r).size() == expect);
            for (auto [dx, dy] : ring_offsets(r)) CHECK(dx * dx + dy * dy > r * r);
        }
    }

    TEST_CASE("module grid coordinates") {
        const ModuleGrid g(13, 37, 52, 52);
        CHECK(g.half() == 6);
        CHECK(g.extent() == 481);
        CHECK(g.center_x(0) == 58);
        CHECK(g.center_y(36) == 52 + 36 * 13 + 6);
        CHECK(g.module_count() == 1369);
    }
}

TEST_SUITE("stage_a") {
    TEST_CASE("priority of uniform modules") {
        const QrMatrix layout = QrMatrix::layout(1, EcLevel::L, 0);
        const GaussianModuleKernel kernel(kA);
        for (auto [value, target, priority] : {std::tuple{0.0, 0, 1.0}, std::tuple{255.0, 1, 1.0},
                                               std::tuple{200.0, 1, 1.0 - 55.0 / 127.5},
                                               std::tuple{127.4, 0, 1.0 - 127.4 / 127.5}}) {
            GrayImage gray(21 * kA, 21 * kA, value);
            const PriorityPlan plan = compute_plan(gray, kernel, layout);
            CHECK(plan.weighted_gray[30] == doctest::Approx(value));
            CHECK(plan.targets[30] == target);
            CHECK(plan.priorities[30] == doctest::Approx(priority).epsilon(1e-12));
        }
        CHECK(1.0 - 55.0 / 127.5 == doctest::Approx(0.56863).epsilon(1e-4));
        CHECK_THROWS_AS(compute_plan(GrayImage(100, 100), kernel, layout), DimensionMismatch);
    }

    TEST_CASE("weighted gray matches a brute-force Gaussian sum") {
        std::mt19937_64 rng(2);
        const QrMatrix layout = QrMatrix::layout(1, EcLevel::L, 0);
        const GrayImage gray = testing::random_gray_image(rng, 21 * kA, 21 * kA);
        const PriorityPlan plan = compute_plan(gray, GaussianModuleKernel(kA), layout);
        const double s = (kA - 1) / 6.0;
        for (int k : {0, 57, 220, 440}) {
            const int row = k / 21, col = k % 21;
            double num = 0.0, den = 0.0;
            for (int y = 0; y < kA; ++y)
                for (int x = 0; x < kA; ++x) {
                    const double dx = x - kA / 2, dy = y - kA / 2;
                    const double w = std::exp(-(dx * dx + dy * dy) / (2 * s * s));
                    num += w * gray.at(col * kA + x, row * kA + y);
                    den += w;
                }
            CHECK(plan.weighted_gray[static_cast<std::size_t>(k)] == doctest::Approx(num / den).epsilon(1e-10));
        }
    }

    TEST_CASE("priority ordering equals the ordering of numerically minimized module weights") {
        std::mt19937_64 rng(8);
        const QrMatrix layout = QrMatrix::layout(1, EcLevel::L, 0);
        const GrayImage gray = to_gray(resize_bilinear(testing::random_color_image(rng, 30, 30), 21 * kA, 21 * kA));
        const PriorityPlan plan = compute_plan(gray, GaussianModuleKernel(kA), layout);
        std::vector<double> numeric;
        for (int k = 0; k < 21 * 21; ++k)
            numeric.push_back(numeric_module_weight(gray, k / 21, k % 21, plan.targets[static_cast<std::size_t>(k)]));
        for (std::size_t i = 0; i < numeric.size(); ++i) {
            // W = a^2 - d/255 with d the weighted distance to the target shade
            CHECK(plan.priorities[i] == doctest::Approx(1.0 - 2.0 * (kA * kA - numeric[i])).epsilon(1e-6));
            for (std::size_t j = 0; j < numeric.size(); j += 7) {
                if (std::abs(numeric[i] - numeric[j]) < 1e-6) continue;
                CHECK((numeric[i] > numeric[j]) == (plan.priorities[i] > plan.priorities[j]));
            }
        }
    }

    TEST_CASE("scheduled symbols are valid codewords that beat the plain encoding") {
        for (int index : {0, 3, 7, 12, 18}) {
            for (int mask : {0, 5}) {
                CAPTURE(index);
                CAPTURE(mask);
                const Fixture f = make_fixture(testing::corpus(index), mask);
                const ScheduleResult s = schedule(f.frame, f.plan, mask);
                CHECK(s.frame.syndromes_zero());
                const FrameDecode d = decode_frame(read_matrix(s.matrix));
                CHECK(d.corrected == 0);
                CHECK(d.payload == testing::message_bytes());
                CHECK(s.pivots_consumed == s.basis_rank);
                CHECK(s.basis_rank == f.frame.free_bit_positions.size());
                const std::size_t plain = count_target_matches(build_matrix(f.frame, mask), f.plan);
                CHECK(count_target_matches(s.matrix, f.plan) >= plain);
                // function modules are untouched
                const QrMatrix reference = build_matrix(f.frame, mask);
                for (int r = 0; r < 37; ++r)
                    for (int c = 0; c < 37; ++c)
                        if (is_function(reference.role(r, c))) CHECK(s.matrix.dark(r, c) == reference.dark(r, c));
            }
        }
    }

    TEST_CASE("property: scheduling on random images never loses matches and stays decodable") {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 12; ++trial) {
            const int mask = static_cast<int>(rng() % 8);
            const std::string message = "m" + std::to_string(rng() % 100000);
            const Fixture f = make_fixture(testing::smooth_color_image(rng, 200, 3 + trial % 5), mask, message);
            const ScheduleResult s = schedule(f.frame, f.plan, mask);
            CHECK(decode_frame(read_matrix(s.matrix)).payload == testing::message_bytes(message));
            CHECK(count_target_matches(s.matrix, f.plan) >= count_target_matches(build_matrix(f.frame, mask), f.plan));
        }
    }

    TEST_CASE("the highest-priority reachable modules match their targets") {
        const Fixture f = make_fixture(testing::corpus(4), 2);
        const ScheduleResult s = schedule(f.frame, f.plan, 2);
        std::vector<std::size_t> order(f.plan.priorities.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](auto x, auto y) { return f.plan.priorities[x] > f.plan.priorities[y]; });
        // payload-carrying data bits are out of reach; every free or parity
        // bit among the first visited is realized
        const std::vector<std::size_t>& free = f.frame.free_bit_positions;
        const std::size_t data_bits = 8 * f.frame.data.size();
        std::size_t checked = 0;
        for (std::size_t k : order) {
            const int row = static_cast<int>(k) / 37, col = static_cast<int>(k) % 37;
            if (s.matrix.role(row, col) != ModuleRole::DataEc) continue;
            const std::size_t bit = s.matrix.bit_position(row, col).flat();
            if (bit < data_bits && !std::binary_search(free.begin(), free.end(), bit)) continue;
            CHECK(s.matrix.dark(row, col) == (f.plan.targets[k] == 0));
            if (++checked == 20) break;
        }
    }

    TEST_CASE("scaling all priorities leaves the schedule unchanged") {
        const Fixture f = make_fixture(testing::corpus(9), 1);
        PriorityPlan scaled = f.plan;
        for (double& p : scaled.priorities) p *= 3.7;
        CHECK(schedule(f.frame, f.plan, 1).matrix == schedule(f.frame, scaled, 1).matrix);
    }

    TEST_CASE("a frame with no free bits schedules to the plain symbol") {
        const std::string full(106, 'z');
        const Fixture f = make_fixture(testing::corpus(1), 4, full);
        REQUIRE(f.frame.free_bit_positions.empty());
        const ScheduleResult s = schedule(f.frame, f.plan, 4);
        CHECK(s.basis_rank == 0);
        CHECK(s.matrix == build_matrix(f.frame, 4));
    }

    TEST_CASE("blended code: spots, function squares and untouched background") {
        const Fixture f = make_fixture(testing::corpus(2), 0);
        const ScheduleResult s = schedule(f.frame, f.plan, 0);
        const ModuleGrid grid(kA, 37);
        const ColorImage base = resize_bilinear(testing::corpus(2), 37 * kA, 37 * kA);
        const ColorImage qa = compose_qa(base, s.matrix, grid, 3);
        for (int r = 0; r < 37; ++r)
            for (int c = 0; c < 37; ++c) {
                const int cx = grid.center_x(c), cy = grid.center_y(r);
                const std::uint8_t shade = s.matrix.dark(r, c) ? 0 : 255;
                CHECK(qa.at(cx, cy).g == shade);
                CHECK(qa.at(cx + 3, cy).g == shade);
                if (is_function(s.matrix.role(r, c))) CHECK(qa.at(cx + 6, cy - 6).r == shade);
                else CHECK(qa.at(cx + 6, cy - 6) == base.at(cx + 6, cy - 6));
            }
        CHECK_THROWS_AS(compose_qa(base, s.matrix, grid, 7), std::invalid_argument);
        CHECK_THROWS_AS(compose_qa(ColorImage(10, 10), s.matrix, grid, 3), DimensionMismatch);
        const ColorImage plain = render_plain(s.matrix, grid);
        CHECK(plain.width() == 481);
        CHECK(plain.at(0, 0).r == 0);
    }
}
