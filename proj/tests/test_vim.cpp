// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "ppms/bench.hpp"
#include "ppms/vim.hpp"
#include "test_util.hpp"

using namespace ppms;
using testutil::random_tensor;

TEST_CASE("naive pipeline: single channel maps to all zeros") {
    const Tensor logits = random_tensor(1, 1, 8, 8, 1);
    const IndexMap map = naive_upsample_argmax(logits, 32, 32, Interp::bilinear);
    for (std::int32_t v : map.data) CHECK(v == 0);
}

TEST_CASE("naive pipeline at output resolution is a plain argmax") {
    const Tensor logits = random_tensor(1, 7, 8, 8, 2);
    const IndexMap map = naive_upsample_argmax(logits, 8, 8, Interp::bilinear);
    CHECK(map.data == argmax_channel(logits).data);
}

TEST_CASE("naive pipeline equals the primitive composition") {
    const Tensor logits = random_tensor(1, 150, 6, 6, 3);
    const IndexMap got = naive_upsample_argmax(logits, 48, 48, Interp::bilinear);
    const IndexMap want = argmax_channel(resize(logits, 48, 48, Interp::bilinear));
    CHECK(got.data == want.data);
}

TEST_CASE("upsample output dims must not shrink") {
    const Tensor logits = random_tensor(1, 4, 8, 8, 4);
    CHECK_THROWS_AS(naive_upsample_argmax(logits, 4, 8, Interp::bilinear), ShapeError);
    CHECK_THROWS_AS(vim_upsample_argmax(logits, 8, 4, VimConfig{}), ShapeError);
}

TEST_CASE("a single dominant channel selects exactly one class") {
    Tensor logits = random_tensor(1, 40, 8, 8, 5, -0.4f, 0.4f);
    float* winner = logits.plane(0, 17);
    for (int i = 0; i < 64; ++i) winner[i] += 5.0f;

    VimConfig cfg;
    cfg.class_threshold = 30;
    cfg.interp = Interp::bilinear;
    VimStats stats;
    const IndexMap map = vim_upsample_argmax(logits, 64, 64, cfg, &stats);
    for (std::int32_t v : map.data) CHECK(v == 17);
    CHECK(stats.present_classes == 1);
    CHECK(stats.channels_interpolated == 1);
    CHECK(stats.slim_invocations == 1);
    CHECK_FALSE(stats.fallback);
}

TEST_CASE("below the class threshold the slim path is never taken") {
    const Tensor logits = random_tensor(1, 19, 8, 8, 6);
    VimConfig cfg;  // threshold 30
    VimStats stats;
    const IndexMap got = vim_upsample_argmax(logits, 64, 64, cfg, &stats);
    const IndexMap want = naive_upsample_argmax(logits, 64, 64, cfg.interp);
    CHECK(got.data == want.data);  // bitwise
    CHECK(stats.fallback);
    CHECK(stats.slim_invocations == 0);
    CHECK(stats.channels_interpolated == 0);
}

TEST_CASE("nearest mode: slim and naive pipelines agree bitwise on 200 random logits") {
    VimConfig cfg;
    cfg.interp = Interp::nearest;
    for (int trial = 0; trial < 200; ++trial) {
        const Tensor logits = random_tensor(1, 150, 8, 8, 1000 + static_cast<std::uint64_t>(trial));
        const IndexMap naive = naive_upsample_argmax(logits, 64, 64, Interp::nearest);
        const IndexMap slim = vim_upsample_argmax(logits, 64, 64, cfg);
        CHECK(naive.data == slim.data);
    }
}

TEST_CASE("bilinear mode: every emitted class id is in the present set") {
    VimConfig cfg;
    cfg.interp = Interp::bilinear;
    for (int trial = 0; trial < 50; ++trial) {
        const Tensor logits = random_tensor(1, 150, 8, 8, 2000 + static_cast<std::uint64_t>(trial));
        const ClassIndexSet present = unique_sorted(argmax_channel(logits));
        const IndexMap map = vim_upsample_argmax(logits, 32, 32, cfg);
        for (std::int32_t v : map.data) {
            CHECK(std::binary_search(present.begin(), present.end(), v));
        }
    }
}

TEST_CASE("bilinear disagreements only happen where the dense winner is absent") {
    VimConfig cfg;
    cfg.interp = Interp::bilinear;
    for (int trial = 0; trial < 20; ++trial) {
        const Tensor logits = random_tensor(1, 150, 8, 8, 3000 + static_cast<std::uint64_t>(trial));
        const ClassIndexSet present = unique_sorted(argmax_channel(logits));
        const IndexMap naive = naive_upsample_argmax(logits, 32, 32, cfg.interp);
        const IndexMap slim = vim_upsample_argmax(logits, 32, 32, cfg);
        for (std::size_t i = 0; i < naive.data.size(); ++i) {
            if (naive.data[i] != slim.data[i]) {
                CHECK_FALSE(std::binary_search(present.begin(), present.end(), naive.data[i]));
            }
        }
    }
}

TEST_CASE("channel stats: constants, strip fixtures, pigeonhole") {
    Tensor flat(1, 12, 4, 4);
    std::fill(flat.data.begin(), flat.data.end(), 0.25f);
    CHECK(vim_channel_stats(flat) == std::pair<int, int>{1, 12});  // ties pick class 0

    const Tensor strips = strip_logits(150, 10, 8, 16, 7);
    CHECK(vim_channel_stats(strips) == std::pair<int, int>{10, 150});

    for (int trial = 0; trial < 10; ++trial) {
        const Tensor logits = random_tensor(1, 150, 4, 4, 4000 + static_cast<std::uint64_t>(trial));
        const auto [present, total] = vim_channel_stats(logits);
        CHECK(total == 150);
        CHECK(present >= 1);
        CHECK(present <= std::min(150, 16));
    }
}

TEST_CASE("slim path interpolates exactly the present channels") {
    for (int target : {1, 5, 10, 20, 50}) {
        const Tensor logits = strip_logits(150, target, 8, 64, 8);
        VimConfig cfg;
        VimStats stats;
        vim_upsample_argmax(logits, 64, 512, cfg, &stats);
        CHECK(stats.present_classes == target);
        CHECK(stats.channels_interpolated == target);
    }
}
