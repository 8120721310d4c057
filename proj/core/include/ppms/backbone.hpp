// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "ppms/kernels.hpp"
#include "ppms/profile.hpp"
#include "ppms/weights.hpp"

namespace ppms {

struct VariantConfig;

/// One inverted-residual block: 1x1 expand -> depthwise k x k (stride s) ->
/// optional squeeze-excite -> 1x1 project, with BN after each conv and a
/// residual when stride == 1 and in_channels == out_channels.
struct MV3BlockConfig {
    int in_channels = 0;
    int expand_channels = 0;
    int out_channels = 0;
    int kernel = 3;
    int stride = 1;
    bool use_se = false;
    Act act = Act::relu;

    bool operator==(const MV3BlockConfig&) const = default;
};

struct AttentionConfig {
    int heads = 0;
    int key_dim = 0;   // per head
    int blocks = 0;    // 0 disables attention on the stage
    int channels = 0;

    bool operator==(const AttentionConfig&) const = default;
};

/// Backbone outputs at 1/8, 1/16 and 1/32 of the input resolution.
struct FeaturePyramid {
    Tensor f8;
    Tensor f16;
    Tensor f32;
};

/// Squeeze-excite bottleneck width (a quarter of the expanded channels).
int se_mid_channels(int expand_channels);

Tensor mv3_block(const Tensor& x, const MV3BlockConfig& cfg, const WeightStore& ws,
                 const std::string& prefix);

/// Multi-head scaled dot-product attention over a token sequence. q, k, v are
/// (tokens x heads*key_dim); heads attend independently over column slices.
Matrix multihead_attention(const Matrix& q, const Matrix& k, const Matrix& v, int heads,
                           int key_dim);

/// Squeeze-enhanced axial attention: 1x1 q/k/v transforms, attention along
/// width-pooled rows and height-pooled columns broadcast back and summed, plus
/// a depthwise+pointwise detail branch over concat(q,k,v). Shape preserving,
/// residual from x.
Tensor sea_attention_block(const Tensor& x, const AttentionConfig& cfg, const WeightStore& ws,
                           const std::string& prefix);

/// Stride-2 separable conv down, cfg.blocks attention blocks, bilinear resize
/// back to the input resolution. Attention runs on a quarter of the pixels.
Tensor strided_attention(const Tensor& x, const AttentionConfig& cfg, const WeightStore& ws,
                         const std::string& prefix, AttentionStats* stats = nullptr);

/// Stem at x2, four stages at x4..x32; strided attention on the outputs of the
/// last two stages. Input must be (1, 3, H, W) with H, W divisible by 32.
FeaturePyramid backbone_forward(const Tensor& image, const VariantConfig& variant,
                                const WeightStore& ws, PhaseTimes* phases = nullptr,
                                AttentionStats* stats = nullptr);

}  // namespace ppms
