// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>

#include "ppms/fusion.hpp"
#include "test_util.hpp"

using namespace ppms;
using testutil::const_entry;
using testutil::conv_bn_ref;
using testutil::max_rel_err;
using testutil::put_conv_bias;
using testutil::put_conv_bn;
using testutil::random_tensor;
using testutil::zero_weight;

namespace {

WeightStore aam_store(int c8, int c16, int c32, int embed, std::uint64_t seed) {
    WeightStore ws;
    put_conv_bn(ws, "aam.f8_conv", embed, c8, 1, seed);
    put_conv_bn(ws, "aam.f16_proj", embed, c16, 1, seed + 1);
    put_conv_bn(ws, "aam.f32_proj", embed, c32, 1, seed + 2);
    return ws;
}

WeightStore head_store(int embed, int classes, std::uint64_t seed) {
    WeightStore ws;
    put_conv_bn(ws, "head.conv", embed, embed, 1, seed);
    put_conv_bias(ws, "head.classify", classes, embed, seed + 1);
    return ws;
}

FeaturePyramid pyramid(int c8, int c16, int c32, int h8, int w8, std::uint64_t seed) {
    FeaturePyramid p;
    p.f8 = random_tensor(1, c8, h8, w8, seed);
    p.f16 = random_tensor(1, c16, h8 / 2, w8 / 2, seed + 1);
    p.f32 = random_tensor(1, c32, h8 / 4, w8 / 4, seed + 2);
    return p;
}

// Full fused map rebuilt step by step from tensor-core primitives.
Tensor fuse_by_hand(const FeaturePyramid& p, const FusionConfig& cfg, const WeightStore& ws) {
    const Tensor detail = conv_bn_ref(p.f8, ws, "aam.f8_conv", cfg.embed_channels, 1, 1);
    const Tensor sem32 = resize(conv_bn_ref(p.f32, ws, "aam.f32_proj", cfg.embed_channels, 1, 1),
                                p.f8.h, p.f8.w, Interp::bilinear);
    const Tensor sem16 = resize(conv_bn_ref(p.f16, ws, "aam.f16_proj", cfg.embed_channels, 1, 1),
                                p.f8.h, p.f8.w, Interp::bilinear);
    Tensor fused = detail;
    if (cfg.ensemble_vote) {
        fused = mul(mul(activation(sem32, Act::sigmoid), activation(sem16, Act::sigmoid)), fused);
    }
    if (cfg.final_semantics) {
        fused = add(fused, sem32);
    }
    return fused;
}

}  // namespace

TEST_CASE("frozen gate arithmetic: half gates squared on a constant detail feature") {
    // 1-channel identity-equivalent convs on a 4/2/1 pyramid; detail = 4,
    // semantics = 0, so the fused value is sigmoid(0)^2 * 4 + 0 = 1.
    FusionConfig cfg;
    cfg.embed_channels = 1;
    cfg.num_classes = 2;
    WeightStore ws;
    ws.put("aam.f8_conv.weight", const_entry({1, 1, 1, 1}, 1.0f));
    ws.put("aam.f8_conv_bn.scale", const_entry({1}, 1.0f));
    ws.put("aam.f8_conv_bn.shift", const_entry({1}, 0.0f));
    ws.put("aam.f16_proj.weight", const_entry({1, 1, 1, 1}, 1.0f));
    ws.put("aam.f16_proj_bn.scale", const_entry({1}, 1.0f));
    ws.put("aam.f16_proj_bn.shift", const_entry({1}, 0.0f));
    ws.put("aam.f32_proj.weight", const_entry({1, 1, 1, 1}, 1.0f));
    ws.put("aam.f32_proj_bn.scale", const_entry({1}, 1.0f));
    ws.put("aam.f32_proj_bn.shift", const_entry({1}, 0.0f));

    FeaturePyramid p;
    p.f8 = Tensor(1, 1, 4, 4);
    std::fill(p.f8.data.begin(), p.f8.data.end(), 4.0f);
    p.f16 = Tensor(1, 1, 2, 2);
    p.f32 = Tensor(1, 1, 1, 1);

    const Tensor fused = aam_fuse(p, cfg, ws);
    for (float v : fused.data) {
        CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("zero projection weights give an all-zero fused map") {
    FusionConfig cfg;
    cfg.embed_channels = 16;
    WeightStore ws = aam_store(8, 12, 20, 16, 11);
    zero_weight(ws, "aam.f8_conv.weight");
    zero_weight(ws, "aam.f16_proj.weight");
    zero_weight(ws, "aam.f32_proj.weight");
    const FeaturePyramid p = pyramid(8, 12, 20, 8, 8, 12);
    for (float v : aam_fuse(p, cfg, ws).data) {
        CHECK(v == 0.0f);
    }
}

TEST_CASE("fusion matches the primitive composition on random pyramids") {
    for (int kase = 0; kase < 25; ++kase) {
        FusionConfig cfg;
        cfg.embed_channels = 16;
        const WeightStore ws = aam_store(8, 12, 20, 16, 100 + static_cast<std::uint64_t>(kase));
        const FeaturePyramid p = pyramid(8, 12, 20, 8, 12, 200 + static_cast<std::uint64_t>(kase));
        const Tensor got = aam_fuse(p, cfg, ws);
        const Tensor want = fuse_by_hand(p, cfg, ws);
        CHECK(got.same_dims(want));
        CHECK(max_rel_err(got.data, testutil::widen(want.data)) < 1e-5);
    }
}

TEST_CASE("fused output is bounded by |detail| + |semantics| elementwise") {
    FusionConfig cfg;
    cfg.embed_channels = 16;
    const WeightStore ws = aam_store(8, 12, 20, 16, 31);
    const FeaturePyramid p = pyramid(8, 12, 20, 8, 8, 32);
    const Tensor fused = aam_fuse(p, cfg, ws);
    const Tensor detail = conv_bn_ref(p.f8, ws, "aam.f8_conv", 16, 1, 1);
    const Tensor sem32 = resize(conv_bn_ref(p.f32, ws, "aam.f32_proj", 16, 1, 1), p.f8.h, p.f8.w,
                                Interp::bilinear);
    for (std::size_t i = 0; i < fused.data.size(); ++i) {
        CHECK(std::abs(fused.data[i]) <=
              std::abs(detail.data[i]) + std::abs(sem32.data[i]) + 1e-6f);
    }
}

TEST_CASE("ablation switches disable the vote and semantics branches") {
    const WeightStore ws = aam_store(8, 12, 20, 16, 41);
    const FeaturePyramid p = pyramid(8, 12, 20, 8, 8, 42);
    FusionConfig cfg;
    cfg.embed_channels = 16;

    cfg.ensemble_vote = false;
    cfg.final_semantics = false;
    const Tensor bare = aam_fuse(p, cfg, ws);
    const Tensor detail = conv_bn_ref(p.f8, ws, "aam.f8_conv", 16, 1, 1);
    CHECK(bare.data == detail.data);

    cfg.final_semantics = true;
    const Tensor with_semantics = aam_fuse(p, cfg, ws);
    const Tensor sem32 = resize(conv_bn_ref(p.f32, ws, "aam.f32_proj", 16, 1, 1), 8, 8,
                                Interp::bilinear);
    CHECK(with_semantics.data == add(detail, sem32).data);

    cfg.ensemble_vote = true;
    cfg.final_semantics = false;
    const Tensor vote_only = aam_fuse(p, cfg, ws);
    const Tensor sem16 = resize(conv_bn_ref(p.f16, ws, "aam.f16_proj", 16, 1, 1), 8, 8,
                                Interp::bilinear);
    const Tensor want =
        mul(mul(activation(sem32, Act::sigmoid), activation(sem16, Act::sigmoid)), detail);
    CHECK(vote_only.data == want.data);
}

TEST_CASE("inconsistent pyramid resolutions are rejected") {
    FusionConfig cfg;
    cfg.embed_channels = 16;
    const WeightStore ws = aam_store(8, 12, 20, 16, 51);
    FeaturePyramid p = pyramid(8, 12, 20, 8, 8, 52);
    p.f16 = random_tensor(1, 12, 3, 4, 53);
    CHECK_THROWS_AS(aam_fuse(p, cfg, ws), ShapeError);
}

TEST_CASE("seg head with zero classify weights emits the bias at every pixel") {
    FusionConfig cfg;
    cfg.embed_channels = 16;
    cfg.num_classes = 5;
    WeightStore ws = head_store(16, 5, 61);
    zero_weight(ws, "head.classify.weight");
    const Tensor fused = random_tensor(1, 16, 6, 7, 62);
    const Tensor logits = seg_head(fused, cfg, ws);
    const auto bias = weight_as_vector(ws, "head.classify.bias", 5);
    CHECK(logits.c == 5);
    for (int c = 0; c < 5; ++c) {
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 7; ++j) {
                CHECK(logits.at(0, c, i, j) == bias[c]);
            }
        }
    }
}

TEST_CASE("seg head logits keep the detail-feature resolution") {
    FusionConfig cfg;
    cfg.embed_channels = 16;
    cfg.num_classes = 150;
    const WeightStore ws = head_store(16, 150, 71);
    const Tensor at512 = seg_head(random_tensor(1, 16, 64, 64, 72), cfg, ws);
    CHECK(at512.c == 150);
    CHECK(at512.h == 64);
    CHECK(at512.w == 64);

    // 1024x512 input at 19 classes: logits land at (64, 128)
    FusionConfig city;
    city.embed_channels = 16;
    city.num_classes = 19;
    const WeightStore cws = head_store(16, 19, 73);
    const Tensor wide = seg_head(random_tensor(1, 16, 64, 128, 74), city, cws);
    CHECK(wide.c == 19);
    CHECK(wide.h == 64);
    CHECK(wide.w == 128);

    CHECK_THROWS_AS(seg_head(random_tensor(1, 8, 4, 4, 75), city, cws), ShapeError);
}
