// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>

#include "ppms/kernels.hpp"

namespace ppms {

struct VimConfig {
    int class_threshold = 30;  // below this class count the slim path is skipped
    Interp interp = Interp::bilinear;

    bool operator==(const VimConfig&) const = default;
};

/// Counters filled by vim_upsample_argmax when requested.
struct VimStats {
    bool fallback = false;          // class count below threshold, naive path used
    int present_classes = 0;        // |S| from the downsampled argmax (0 on fallback)
    int channels_interpolated = 0;  // channels the resize actually touched
    std::uint64_t slim_invocations = 0;  // times the slim path executed
};

/// Baseline pipeline: resize every channel to (out_h, out_w), then argmax.
IndexMap naive_upsample_argmax(const Tensor& logits, int out_h, int out_w, Interp mode);

/// Sparse-class pipeline: argmax + unique on the downsampled logits select the
/// present classes S; only those channels are resized and argmaxed, and slim
/// indices are remapped through S. Falls back to the naive pipeline when the
/// class count is below cfg.class_threshold.
IndexMap vim_upsample_argmax(const Tensor& logits, int out_h, int out_w, const VimConfig& cfg,
                             VimStats* stats = nullptr);

/// (|S|, C): classes present in the downsampled argmax vs. total channels.
std::pair<int, int> vim_channel_stats(const Tensor& logits);

}  // namespace ppms
