// SPDX-License-Identifier: Apache-2.0
#include "ppms/vim.hpp"

namespace ppms {

namespace {

void check_upsample_dims(const Tensor& logits, int out_h, int out_w) {
    if (out_h < logits.h || out_w < logits.w) {
        throw ShapeError("upsample output dims must be >= logit dims");
    }
}

}  // namespace

IndexMap naive_upsample_argmax(const Tensor& logits, int out_h, int out_w, Interp mode) {
    check_upsample_dims(logits, out_h, out_w);
    return argmax_channel(resize(logits, out_h, out_w, mode));
}

IndexMap vim_upsample_argmax(const Tensor& logits, int out_h, int out_w, const VimConfig& cfg,
                             VimStats* stats) {
    check_upsample_dims(logits, out_h, out_w);
    if (cfg.class_threshold < 1) {
        throw ConfigError("vim class_threshold must be >= 1");
    }
    if (logits.c < cfg.class_threshold) {
        if (stats) {
            *stats = VimStats{};
            stats->fallback = true;
        }
        return naive_upsample_argmax(logits, out_h, out_w, cfg.interp);
    }

    const ClassIndexSet present = unique_sorted(argmax_channel(logits));
    const Tensor slim = gather_channels(logits, present);
    IndexMap map = argmax_channel(resize(slim, out_h, out_w, cfg.interp));
    for (std::int32_t& v : map.data) {
        v = present[static_cast<std::size_t>(v)];
    }
    if (stats) {
        *stats = VimStats{};
        stats->present_classes = static_cast<int>(present.size());
        stats->channels_interpolated = slim.c;
        stats->slim_invocations = 1;
    }
    return map;
}

std::pair<int, int> vim_channel_stats(const Tensor& logits) {
    const ClassIndexSet present = unique_sorted(argmax_channel(logits));
    return {static_cast<int>(present.size()), logits.c};
}

}  // namespace ppms
