#include <doctest.h>

#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>

#include "bifeat/config.hpp"
#include "bifeat/detector.hpp"
#include "bifeat/synthetic.hpp"
#include "oracles.hpp"

using namespace bifeat;

TEST_CASE("default scale table") {
    const ScaleTable table = ScaleTable::default_table();
    const double sigmas[] = {1.2, 2.0, 2.8, 3.6, 4.4, 5.2, 6.0, 6.4};
    const int lobes[] = {3, 5, 7, 9, 11, 13, 15, 17};
    for (int i = 0; i < kScaleCount; ++i) {
        CHECK(table.levels[i].sigma == doctest::Approx(sigmas[i]));
        CHECK(table.levels[i].lobe == lobes[i]);
        CHECK(table.levels[i].side == 3 * lobes[i]);
        CHECK(table.levels[i].margin == (3 * lobes[i] - 1) / 2);
        CHECK(table.levels[i].side % 2 == 1);
        CHECK(table.levels[i].side >= 9);
        if (i > 0) CHECK(table.levels[i].sigma > table.levels[i - 1].sigma);
    }
    CHECK(table.max_margin() == 25);
}

TEST_CASE("scale table rejects non-increasing sigmas") {
    CHECK_THROWS_AS(ScaleTable::from_sigmas({1.2, 1.2, 2.8, 3.6, 4.4, 5.2, 6.0, 6.4}),
                    std::invalid_argument);
}

TEST_CASE("hessian determinant arithmetic") {
    CHECK(hessian_det100(10, 10, 10) == 1900);
    CHECK(hessian_det100(0, 0, 0) == 0);
    CHECK(hessian_det100(-4, 5, 2) == -2324);
}

TEST_CASE("hessian response is zero on constant images") {
    const GrayImage img(64, 64, 137);
    const IntegralImage ii = compute_integral(img);
    const ScaleTable table = ScaleTable::default_table();
    std::mt19937_64 rng(5);
    for (int s = 0; s < kScaleCount; ++s) {
        const int m = table.levels[s].margin;
        for (int i = 0; i < 5; ++i) {
            const int x = m + static_cast<int>(rng() % (64 - 2 * m));
            const int y = m + static_cast<int>(rng() % (64 - 2 * m));
            CHECK(hessian_response(ii, table, x, y, s) == 0);
        }
    }
}

TEST_CASE("hessian response rejects margin violations") {
    const GrayImage img(64, 64, 0);
    const IntegralImage ii = compute_integral(img);
    const ScaleTable table = ScaleTable::default_table();
    CHECK_THROWS_AS(hessian_response(ii, table, 3, 32, 0), std::out_of_range);
    CHECK_THROWS_AS(hessian_response(ii, table, 32, 24, 7), std::out_of_range);
}

TEST_CASE("box responses match the dense convolution oracle at scale 0") {
    std::mt19937_64 rng(17);
    const GrayImage img = noise_image(32, 32, 1234);
    const IntegralImage ii = compute_integral(img);
    const ScaleTable table = ScaleTable::default_table();
    const ScaleLevel& level = table.levels[0];
    for (int y = level.margin; y < 32 - level.margin; ++y)
        for (int x = level.margin; x < 32 - level.margin; ++x) {
            const BoxResponses fast = box_responses(ii, level, x, y);
            const BoxResponses slow = oracles::conv_responses(img, level.lobe, x, y);
            REQUIRE(fast.dxx == slow.dxx);
            REQUIRE(fast.dyy == slow.dyy);
            REQUIRE(fast.dxy == slow.dxy);
        }
    (void)rng;
}

TEST_CASE("response stack equals per-cell hessian responses and the oracle") {
    const GrayImage img = noise_image(64, 64, 4242);
    const IntegralImage ii = compute_integral(img);
    const ScaleTable table = ScaleTable::default_table();
    const ResponseStack stack = build_response_stack(ii, table);
    REQUIRE(stack.width == 64);
    REQUIRE(stack.height == 64);
    std::mt19937_64 rng(7);
    for (int s = 0; s < kScaleCount; ++s) {
        const int m = table.levels[s].margin;
        CHECK(stack.margins[s] == m);
        for (int i = 0; i < 25; ++i) {
            const int x = m + static_cast<int>(rng() % (64 - 2 * m));
            const int y = m + static_cast<int>(rng() % (64 - 2 * m));
            REQUIRE(stack.at(s, x, y) == hessian_response(ii, table, x, y, s));
            const BoxResponses slow = oracles::conv_responses(img, table.levels[s].lobe, x, y);
            REQUIRE(stack.at(s, x, y) == hessian_det100(slow.dxx, slow.dyy, slow.dxy));
        }
    }
}

TEST_CASE("response stack rejects too-small images") {
    const GrayImage img(50, 64, 0);
    CHECK_THROWS_AS(build_response_stack(compute_integral(img), ScaleTable::default_table()),
                    std::invalid_argument);
}

TEST_CASE("constant 640x480 image yields an all-zero valid stack") {
    const GrayImage img(640, 480, 200);
    const ResponseStack stack =
        build_response_stack(compute_integral(img), ScaleTable::default_table());
    std::size_t nonzero = 0;
    for (int s = 0; s < kScaleCount; ++s)
        for (int y = 0; y < stack.height; ++y)
            for (int x = 0; x < stack.width; ++x)
                if (stack.valid(s, x, y) && stack.at(s, x, y) != 0) ++nonzero;
    CHECK(nonzero == 0);
}

namespace {

ResponseStack random_stack(int w, int h, std::uint64_t seed) {
    ResponseStack stack(w, h, ScaleTable::default_table());
    std::mt19937_64 rng(seed);
    for (int s = 0; s < kScaleCount; ++s)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (stack.valid(s, x, y))
                    stack.at(s, x, y) =
                        (static_cast<std::int64_t>(rng() % 1000) - 300) * stack.norms[s];
    return stack;
}

}  // namespace

TEST_CASE("nms finds a single injected spike") {
    ResponseStack stack(80, 80, ScaleTable::default_table());
    stack.at(3, 40, 40) = 500;
    const auto kps = nms(stack, 0);
    REQUIRE(kps.size() == 1);
    CHECK(kps[0] == Keypoint{40, 40, 3, 500});
}

TEST_CASE("nms suppresses ties: all-equal positive stack yields nothing") {
    ResponseStack stack(64, 64, ScaleTable::default_table());
    for (int s = 0; s < kScaleCount; ++s)
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) stack.at(s, x, y) = 7 * stack.norms[s];
    CHECK(nms(stack, 0).empty());
}

TEST_CASE("nms only emits interior scales with normalized scores above threshold") {
    ResponseStack stack = random_stack(64, 64, 99);
    const auto kps = nms(stack, 250);
    for (const Keypoint& kp : kps) {
        CHECK(kp.scale_index >= 1);
        CHECK(kp.scale_index <= 6);
        CHECK(static_cast<__int128>(kp.score) >
              static_cast<__int128>(250) * stack.norms[kp.scale_index]);
    }
}

TEST_CASE("nms equals the exhaustive 26-neighbor scan on random stacks") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        ResponseStack stack = random_stack(72, 60, seed);
        const auto fast = nms(stack, 50);
        const auto slow = oracles::nms_scan(stack, 50);
        REQUIRE(fast == slow);
        CHECK(!fast.empty());  // dense random stacks should produce some maxima
    }
}

TEST_CASE("nms output is sorted and spatially separated per scale") {
    ResponseStack stack = random_stack(72, 60, 12);
    const auto kps = nms(stack, 0);
    for (std::size_t i = 1; i < kps.size(); ++i) {
        const auto& a = kps[i - 1];
        const auto& b = kps[i];
        const bool sorted = a.y < b.y || (a.y == b.y && (a.x < b.x || (a.x == b.x && a.scale_index < b.scale_index)));
        CHECK(sorted);
    }
    for (const Keypoint& a : kps)
        for (const Keypoint& b : kps)
            if (a.scale_index == b.scale_index && !(a == b))
                CHECK(std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)) > 1);
}

TEST_CASE("detector linearity: intensity gain a scales responses by a and det by a^2") {
    const ScaleTable table = ScaleTable::default_table();
    std::mt19937_64 rng(88);
    for (int round = 0; round < 10; ++round) {
        GrayImage img = noise_image(56, 56, rng());
        const int a = 2 + static_cast<int>(rng() % 2);  // 2 or 3
        for (auto& px : img.data) px = static_cast<std::uint8_t>(px % (255 / a));
        GrayImage scaled = img;
        for (auto& px : scaled.data) px = static_cast<std::uint8_t>(px * a);
        const IntegralImage ii = compute_integral(img);
        const IntegralImage si = compute_integral(scaled);
        for (int s = 0; s < kScaleCount; ++s) {
            const ScaleLevel& level = table.levels[s];
            if (56 <= 2 * level.margin) continue;
            const int x = level.margin + static_cast<int>(rng() % (56 - 2 * level.margin));
            const int y = level.margin + static_cast<int>(rng() % (56 - 2 * level.margin));
            const BoxResponses base = box_responses(ii, level, x, y);
            const BoxResponses gained = box_responses(si, level, x, y);
            REQUIRE(gained.dxx == a * base.dxx);
            REQUIRE(gained.dyy == a * base.dyy);
            REQUIRE(gained.dxy == a * base.dxy);
            REQUIRE(hessian_response(si, table, x, y, s) ==
                    static_cast<std::int64_t>(a) * a * hessian_response(ii, table, x, y, s));
        }
    }
}

TEST_CASE("detector offset invariance: det(I + b) == det(I) without clipping") {
    const ScaleTable table = ScaleTable::default_table();
    std::mt19937_64 rng(321);
    for (int round = 0; round < 10; ++round) {
        GrayImage img = noise_image(56, 56, rng());
        for (auto& px : img.data) px = static_cast<std::uint8_t>(px % 200);
        const int b = 1 + static_cast<int>(rng() % 55);
        GrayImage shifted = img;
        for (auto& px : shifted.data) px = static_cast<std::uint8_t>(px + b);
        const IntegralImage ii = compute_integral(img);
        const IntegralImage si = compute_integral(shifted);
        for (int s = 0; s < kScaleCount; ++s) {
            const int m = table.levels[s].margin;
            if (56 <= 2 * m) continue;
            const int x = m + static_cast<int>(rng() % (56 - 2 * m));
            const int y = m + static_cast<int>(rng() % (56 - 2 * m));
            REQUIRE(hessian_response(si, table, x, y, s) == hessian_response(ii, table, x, y, s));
        }
    }
}

TEST_CASE("detect basics") {
    CHECK(detect(GrayImage(120, 100, 60), 0).empty());

    const GrayImage textured = blob_image(120, 100, 30, 6);
    CHECK(detect(textured, std::numeric_limits<std::int64_t>::max()).empty());

    CHECK_THROWS_AS(detect(GrayImage(40, 40, 0), 0), std::invalid_argument);
}

TEST_CASE("detect is deterministic") {
    const GrayImage img = blob_image(160, 120, 40, 17);
    const auto a = detect(img, 1000);
    const auto b = detect(img, 1000);
    CHECK(a == b);
    std::ostringstream csv_a, csv_b;
    write_keypoints_csv(csv_a, a);
    write_keypoints_csv(csv_b, b);
    CHECK(csv_a.str() == csv_b.str());
}

TEST_CASE("detect finds the center of a bright square") {
    // Odd side so the blob center is a lattice cell; even-sided squares tie
    // across the central 2x2 and strict suppression discards ties.
    const GrayImage img = square_scene(640, 480, 15);
    const auto kps = detect(img, kDefaultDetectorThreshold);
    REQUIRE(!kps.empty());
    CHECK(kps.size() <= 50);
    bool near_center = false;
    for (const Keypoint& kp : kps)
        if (std::abs(kp.x - 320) <= 5 && std::abs(kp.y - 240) <= 5) near_center = true;
    CHECK(near_center);
}

TEST_CASE("keypoint csv format") {
    std::ostringstream out;
    write_keypoints_csv(out, {{3, 4, 2, 1900}});
    CHECK(out.str() == "x,y,scale_index,score\n3,4,2,1900\n");
}
