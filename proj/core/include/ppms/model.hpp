// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ppms/config.hpp"
#include "ppms/profile.hpp"
#include "ppms/vim.hpp"
#include "ppms/weights.hpp"

namespace ppms {

enum class WeightKind { conv, bias, bn_scale, bn_shift };

/// One tensor the variant demands: name, exact dims, fan-in of the owning
/// layer (drives init scaling) and its role.
struct WeightSpec {
    std::string name;
    std::vector<std::uint32_t> dims;
    int fan_in = 1;
    WeightKind kind = WeightKind::conv;

    std::uint64_t numel() const {
        std::uint64_t p = 1;
        for (std::uint32_t d : dims) p *= d;
        return p;
    }
};

/// Walk every tensor the config demands, in a fixed order.
void enumerate_weights(const VariantConfig& cfg, const std::function<void(const WeightSpec&)>& fn);

/// All demanded tensors present with exactly the expected dims.
void validate_weights(const VariantConfig& cfg, const WeightStore& ws);

/// Deterministic initialization: each tensor is drawn from its own stream
/// keyed by seed and tensor name, so insertion order is irrelevant. Conv
/// weights and biases are uniform in +-sqrt(1/fan_in); BN folds to scale 1,
/// shift 0.
WeightStore random_init(const VariantConfig& cfg, std::uint64_t seed);

struct ParamReport {
    std::vector<std::pair<std::string, std::uint64_t>> modules;  // ordered buckets
    std::uint64_t total = 0;
};

/// Exact scalar counts per module bucket, from shapes alone.
ParamReport count_params(const VariantConfig& cfg);

/// Full pipeline: backbone -> fusion -> head -> upsample+argmax at (H, W).
IndexMap forward(const Tensor& image, const VariantConfig& cfg, const WeightStore& ws,
                 bool use_vim, PhaseTimes* phases = nullptr, VimStats* vim_stats = nullptr,
                 AttentionStats* attn_stats = nullptr);

/// Pipeline up to the head: downsampled class logits at (H/8, W/8).
Tensor forward_logits(const Tensor& image, const VariantConfig& cfg, const WeightStore& ws);

}  // namespace ppms
