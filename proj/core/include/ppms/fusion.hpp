// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ppms/backbone.hpp"
#include "ppms/kernels.hpp"
#include "ppms/weights.hpp"

namespace ppms {

struct FusionConfig {
    int embed_channels = 256;
    int num_classes = 150;
    float dropout_rate = 0.1f;  // inert at inference, kept for completeness
    // Ablation switches: the gate product of the two semantic features, and the
    // additive deepest-feature branch. With both off the fused output is just
    // the projected detail feature.
    bool ensemble_vote = true;
    bool final_semantics = true;

    bool operator==(const FusionConfig&) const = default;
};

/// Fuse the pyramid at f8 resolution: sigmoid gates from the projected and
/// upsampled f16/f32 multiply the projected f8, and the projected f32 is added
/// back. Output is (n, embed_channels, H/8, W/8).
Tensor aam_fuse(const FeaturePyramid& p, const FusionConfig& cfg, const WeightStore& ws);

/// 1x1 conv + BN + relu, inference-inert dropout, then a 1x1 classifier with
/// bias producing (n, num_classes, H/8, W/8) logits.
Tensor seg_head(const Tensor& fused, const FusionConfig& cfg, const WeightStore& ws);

}  // namespace ppms
