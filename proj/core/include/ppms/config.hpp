// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "ppms/backbone.hpp"
#include "ppms/fusion.hpp"
#include "ppms/vim.hpp"

namespace ppms {

struct StemConfig {
    int out_channels = 16;
    int kernel = 3;
    int stride = 2;
    Act act = Act::hardswish;

    bool operator==(const StemConfig&) const = default;
};

/// Full architecture description of one variant: stem, the four stage tables,
/// the attention settings for stages 3 and 4, fusion and upsample settings.
struct VariantConfig {
    std::string name;  // "tiny" or "base"
    StemConfig stem;
    std::array<std::vector<MV3BlockConfig>, 4> stages;
    AttentionConfig attn3;
    AttentionConfig attn4;
    FusionConfig fusion;
    VimConfig vim;

    bool operator==(const VariantConfig&) const = default;

    static VariantConfig tiny(int num_classes = 150);
    static VariantConfig base(int num_classes = 150);
};

/// Built-in variant by name ("tiny" or "base").
VariantConfig variant_by_name(const std::string& name, int num_classes = 150);

/// Throws ConfigError with a description when any structural invariant is
/// violated (channel chaining, stage strides, per-variant head/block/channel
/// constants, embed width, class count).
void validate(const VariantConfig& cfg);

/// Text form: [section] headers with key = value lines; sections nest by
/// dotted names (stage2.block1). parse(format(cfg)) == cfg.
std::string format_variant_config(const VariantConfig& cfg);
VariantConfig parse_variant_config(const std::string& text);
VariantConfig load_variant_config(const std::string& path);
void save_variant_config(const VariantConfig& cfg, const std::string& path);

}  // namespace ppms
