// SPDX-License-Identifier: Apache-2.0
#include "ppms/fusion.hpp"

namespace ppms {

namespace {

Tensor conv1x1_bn(const Tensor& x, const WeightStore& ws, const std::string& base, int out_channels) {
    ConvSpec spec;
    spec.in_channels = x.c;
    spec.out_channels = out_channels;
    const Tensor w = weight_as_tensor(ws, base + ".weight", out_channels, x.c, 1, 1);
    Tensor y = conv2d(x, w, {}, spec);
    return batchnorm_folded(y, weight_as_vector(ws, base + "_bn.scale", out_channels),
                            weight_as_vector(ws, base + "_bn.shift", out_channels));
}

}  // namespace

Tensor aam_fuse(const FeaturePyramid& p, const FusionConfig& cfg, const WeightStore& ws) {
    if (p.f16.h * 2 != p.f8.h || p.f16.w * 2 != p.f8.w || p.f32.h * 2 != p.f16.h ||
        p.f32.w * 2 != p.f16.w) {
        throw ShapeError("aam_fuse: pyramid resolutions inconsistent");
    }
    const int embed = cfg.embed_channels;

    Tensor detail = conv1x1_bn(p.f8, ws, "aam.f8_conv", embed);
    const Tensor sem32 = resize(conv1x1_bn(p.f32, ws, "aam.f32_proj", embed), p.f8.h, p.f8.w,
                                Interp::bilinear);

    Tensor fused = detail;
    if (cfg.ensemble_vote) {
        const Tensor sem16 = resize(conv1x1_bn(p.f16, ws, "aam.f16_proj", embed), p.f8.h, p.f8.w,
                                    Interp::bilinear);
        fused = mul(mul(activation(sem32, Act::sigmoid), activation(sem16, Act::sigmoid)), fused);
    }
    if (cfg.final_semantics) {
        fused = add(fused, sem32);
    }
    return fused;
}

Tensor seg_head(const Tensor& fused, const FusionConfig& cfg, const WeightStore& ws) {
    if (fused.c != cfg.embed_channels) {
        throw ShapeError("seg_head: fused channels do not match embed_channels");
    }
    Tensor y = conv1x1_bn(fused, ws, "head.conv", cfg.embed_channels);
    y = activation(y, Act::relu);
    // dropout is identity at inference
    ConvSpec spec;
    spec.in_channels = cfg.embed_channels;
    spec.out_channels = cfg.num_classes;
    spec.has_bias = true;
    const Tensor w =
        weight_as_tensor(ws, "head.classify.weight", cfg.num_classes, cfg.embed_channels, 1, 1);
    return conv2d(y, w, weight_as_vector(ws, "head.classify.bias", cfg.num_classes), spec);
}

}  // namespace ppms
