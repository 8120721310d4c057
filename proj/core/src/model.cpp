// SPDX-License-Identifier: Apache-2.0
#include "ppms/model.hpp"

#include <cmath>

#include "ppms/backbone.hpp"
#include "ppms/fusion.hpp"
#include "ppms/rng.hpp"

namespace ppms {

namespace {

using Emit = std::function<void(const WeightSpec&)>;

void emit_conv(const Emit& fn, const std::string& base, int out_c, int in_c_per_group, int k) {
    const std::uint32_t o = static_cast<std::uint32_t>(out_c);
    const std::uint32_t i = static_cast<std::uint32_t>(in_c_per_group);
    const std::uint32_t kk = static_cast<std::uint32_t>(k);
    const int fan_in = in_c_per_group * k * k;
    fn({base + ".weight", {o, i, kk, kk}, fan_in, WeightKind::conv});
}

void emit_bn(const Emit& fn, const std::string& base, int channels) {
    const std::uint32_t c = static_cast<std::uint32_t>(channels);
    fn({base + "_bn.scale", {c}, 1, WeightKind::bn_scale});
    fn({base + "_bn.shift", {c}, 1, WeightKind::bn_shift});
}

void emit_conv_bn(const Emit& fn, const std::string& base, int out_c, int in_c_per_group, int k) {
    emit_conv(fn, base, out_c, in_c_per_group, k);
    emit_bn(fn, base, out_c);
}

void emit_conv_bias(const Emit& fn, const std::string& base, int out_c, int in_c) {
    emit_conv(fn, base, out_c, in_c, 1);
    fn({base + ".bias", {static_cast<std::uint32_t>(out_c)}, in_c, WeightKind::bias});
}

void emit_attention(const Emit& fn, const std::string& prefix, const AttentionConfig& a) {
    if (a.blocks <= 0) {
        return;
    }
    const int hk = a.heads * a.key_dim;
    emit_conv_bn(fn, prefix + ".stride_dw", a.channels, 1, 3);
    emit_conv_bn(fn, prefix + ".stride_pw", a.channels, a.channels, 1);
    for (int b = 1; b <= a.blocks; ++b) {
        const std::string bp = prefix + ".block" + std::to_string(b);
        emit_conv_bn(fn, bp + ".q", hk, a.channels, 1);
        emit_conv_bn(fn, bp + ".k", hk, a.channels, 1);
        emit_conv_bn(fn, bp + ".v", hk, a.channels, 1);
        emit_conv_bn(fn, bp + ".proj", a.channels, hk, 1);
        emit_conv_bn(fn, bp + ".detail_dw", 3 * hk, 1, 3);
        emit_conv_bn(fn, bp + ".detail_pw", a.channels, 3 * hk, 1);
    }
}

}  // namespace

void enumerate_weights(const VariantConfig& cfg, const Emit& fn) {
    emit_conv_bn(fn, "stem.conv", cfg.stem.out_channels, 3, cfg.stem.kernel);
    for (std::size_t s = 0; s < cfg.stages.size(); ++s) {
        for (std::size_t b = 0; b < cfg.stages[s].size(); ++b) {
            const MV3BlockConfig& blk = cfg.stages[s][b];
            const std::string bp =
                "stage" + std::to_string(s + 1) + ".block" + std::to_string(b + 1);
            emit_conv_bn(fn, bp + ".expand", blk.expand_channels, blk.in_channels, 1);
            emit_conv_bn(fn, bp + ".dw", blk.expand_channels, 1, blk.kernel);
            if (blk.use_se) {
                const int mid = se_mid_channels(blk.expand_channels);
                emit_conv_bias(fn, bp + ".se_reduce", mid, blk.expand_channels);
                emit_conv_bias(fn, bp + ".se_restore", blk.expand_channels, mid);
            }
            emit_conv_bn(fn, bp + ".project", blk.out_channels, blk.expand_channels, 1);
        }
    }
    emit_attention(fn, "attn3", cfg.attn3);
    emit_attention(fn, "attn4", cfg.attn4);

    const int embed = cfg.fusion.embed_channels;
    emit_conv_bn(fn, "aam.f8_conv", embed, cfg.stages[1].back().out_channels, 1);
    emit_conv_bn(fn, "aam.f16_proj", embed, cfg.attn3.channels, 1);
    emit_conv_bn(fn, "aam.f32_proj", embed, cfg.attn4.channels, 1);

    emit_conv_bn(fn, "head.conv", embed, embed, 1);
    emit_conv_bias(fn, "head.classify", cfg.fusion.num_classes, embed);
}

void validate_weights(const VariantConfig& cfg, const WeightStore& ws) {
    enumerate_weights(cfg, [&ws](const WeightSpec& spec) {
        const WeightEntry& e = ws.get(spec.name);
        if (e.dims != spec.dims) {
            throw ShapeError("weight " + spec.name + " has unexpected dims");
        }
    });
}

WeightStore random_init(const VariantConfig& cfg, std::uint64_t seed) {
    WeightStore ws;
    enumerate_weights(cfg, [&ws, seed](const WeightSpec& spec) {
        WeightEntry entry;
        entry.dims = spec.dims;
        const std::uint64_t count = spec.numel();
        entry.data.reserve(count);
        switch (spec.kind) {
            case WeightKind::bn_scale:
                entry.data.assign(count, 1.0f);
                break;
            case WeightKind::bn_shift:
                entry.data.assign(count, 0.0f);
                break;
            case WeightKind::conv:
            case WeightKind::bias: {
                Rng rng(seed ^ fnv1a64(spec.name));
                const float bound = std::sqrt(1.0f / static_cast<float>(spec.fan_in));
                for (std::uint64_t i = 0; i < count; ++i) {
                    entry.data.push_back(rng.uniform(-bound, bound));
                }
                break;
            }
        }
        ws.put(spec.name, std::move(entry));
    });
    return ws;
}

ParamReport count_params(const VariantConfig& cfg) {
    ParamReport report;
    auto bucket = [&report](const std::string& name) -> std::uint64_t& {
        const std::string key = name.substr(0, name.find('.'));
        for (auto& [k, v] : report.modules) {
            if (k == key) return v;
        }
        report.modules.emplace_back(key, 0);
        return report.modules.back().second;
    };
    enumerate_weights(cfg, [&](const WeightSpec& spec) {
        const std::uint64_t count = spec.numel();
        bucket(spec.name) += count;
        report.total += count;
    });
    return report;
}

Tensor forward_logits(const Tensor& image, const VariantConfig& cfg, const WeightStore& ws) {
    const FeaturePyramid pyr = backbone_forward(image, cfg, ws);
    return seg_head(aam_fuse(pyr, cfg.fusion, ws), cfg.fusion, ws);
}

IndexMap forward(const Tensor& image, const VariantConfig& cfg, const WeightStore& ws,
                 bool use_vim, PhaseTimes* phases, VimStats* vim_stats,
                 AttentionStats* attn_stats) {
    const FeaturePyramid pyr = backbone_forward(image, cfg, ws, phases, attn_stats);
    Tensor logits;
    {
        ScopedPhase phase(phases ? &phases->fusion : nullptr);
        logits = aam_fuse(pyr, cfg.fusion, ws);
    }
    {
        ScopedPhase phase(phases ? &phases->head : nullptr);
        logits = seg_head(logits, cfg.fusion, ws);
    }
    {
        ScopedPhase phase(phases ? &phases->upsample : nullptr);
        if (use_vim) {
            return vim_upsample_argmax(logits, image.h, image.w, cfg.vim, vim_stats);
        }
        if (vim_stats) {
            *vim_stats = VimStats{};
        }
        return naive_upsample_argmax(logits, image.h, image.w, cfg.vim.interp);
    }
}

}  // namespace ppms
