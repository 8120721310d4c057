// SPDX-License-Identifier: Apache-2.0
#include "ppms/backbone.hpp"

#include <cmath>

#include "ppms/config.hpp"

namespace ppms {

namespace {

// Conv (pad = kernel/2, no bias) followed by folded BN. Weight names are
// base.weight, base_bn.scale, base_bn.shift.
Tensor conv_bn(const Tensor& x, const WeightStore& ws, const std::string& base, int out_channels,
               int kernel, int stride, int groups = 1) {
    ConvSpec spec;
    spec.in_channels = x.c;
    spec.out_channels = out_channels;
    spec.kh = spec.kw = kernel;
    spec.sh = spec.sw = stride;
    spec.ph = spec.pw = kernel / 2;
    spec.groups = groups;
    const Tensor w = weight_as_tensor(ws, base + ".weight", out_channels, x.c / groups, kernel, kernel);
    Tensor y = conv2d(x, w, {}, spec);
    return batchnorm_folded(y, weight_as_vector(ws, base + "_bn.scale", out_channels),
                            weight_as_vector(ws, base + "_bn.shift", out_channels));
}

// 1x1 conv with bias, no BN (squeeze-excite internals).
Tensor conv_bias_1x1(const Tensor& x, const WeightStore& ws, const std::string& base,
                     int out_channels) {
    ConvSpec spec;
    spec.in_channels = x.c;
    spec.out_channels = out_channels;
    spec.has_bias = true;
    const Tensor w = weight_as_tensor(ws, base + ".weight", out_channels, x.c, 1, 1);
    return conv2d(x, w, weight_as_vector(ws, base + ".bias", out_channels), spec);
}

void scale_channels(Tensor& x, const Tensor& gates) {
    const std::size_t hw = static_cast<std::size_t>(x.h) * x.w;
    for (int ni = 0; ni < x.n; ++ni) {
        for (int ci = 0; ci < x.c; ++ci) {
            const float g = gates.at(ni, ci, 0, 0);
            float* p = x.plane(ni, ci);
            for (std::size_t i = 0; i < hw; ++i) {
                p[i] *= g;
            }
        }
    }
}

}  // namespace

int se_mid_channels(int expand_channels) { return std::max(1, expand_channels / 4); }

Tensor mv3_block(const Tensor& x, const MV3BlockConfig& cfg, const WeightStore& ws,
                 const std::string& prefix) {
    if (x.c != cfg.in_channels) {
        throw ShapeError(prefix + ": input has " + std::to_string(x.c) + " channels, expected " +
                         std::to_string(cfg.in_channels));
    }
    Tensor y = conv_bn(x, ws, prefix + ".expand", cfg.expand_channels, 1, 1);
    y = activation(y, cfg.act);
    y = conv_bn(y, ws, prefix + ".dw", cfg.expand_channels, cfg.kernel, cfg.stride,
                cfg.expand_channels);
    y = activation(y, cfg.act);
    if (cfg.use_se) {
        const int mid = se_mid_channels(cfg.expand_channels);
        Tensor pooled = global_avg_pool(y);
        Tensor gates = conv_bias_1x1(pooled, ws, prefix + ".se_reduce", mid);
        gates = activation(gates, Act::relu);
        gates = conv_bias_1x1(gates, ws, prefix + ".se_restore", cfg.expand_channels);
        gates = activation(gates, Act::hardsigmoid);
        scale_channels(y, gates);
    }
    y = conv_bn(y, ws, prefix + ".project", cfg.out_channels, 1, 1);
    if (cfg.stride == 1 && cfg.in_channels == cfg.out_channels) {
        y = add(y, x);
    }
    return y;
}

namespace {

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols, m.rows);
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            out.at(c, r) = m.at(r, c);
        }
    }
    return out;
}

Matrix slice_cols(const Matrix& m, int c0, int count) {
    Matrix out(m.rows, count);
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < count; ++c) {
            out.at(r, c) = m.at(r, c0 + c);
        }
    }
    return out;
}

// Mean over width per row (axis = h) or over height per column (axis = w);
// returns (tokens x channels).
Matrix squeeze_axis(const Tensor& x, int ni, bool rows) {
    const int tokens = rows ? x.h : x.w;
    const int other = rows ? x.w : x.h;
    Matrix out(tokens, x.c);
    const float inv = 1.0f / static_cast<float>(other);
    for (int ci = 0; ci < x.c; ++ci) {
        const float* p = x.plane(ni, ci);
        for (int t = 0; t < tokens; ++t) {
            float acc = 0.0f;
            if (rows) {
                const float* row = p + static_cast<std::size_t>(t) * x.w;
                for (int i = 0; i < other; ++i) acc += row[i];
            } else {
                for (int i = 0; i < other; ++i) acc += p[static_cast<std::size_t>(i) * x.w + t];
            }
            out.at(t, ci) = acc * inv;
        }
    }
    return out;
}

}  // namespace

Matrix multihead_attention(const Matrix& q, const Matrix& k, const Matrix& v, int heads,
                           int key_dim) {
    if (heads < 1 || key_dim < 1 || q.cols != heads * key_dim) {
        throw ConfigError("multihead_attention: cols must equal heads*key_dim");
    }
    if (k.cols != q.cols || v.cols != q.cols || k.rows != q.rows || v.rows != q.rows) {
        throw ShapeError("multihead_attention: q/k/v dims disagree");
    }
    const float scale = 1.0f / std::sqrt(static_cast<float>(key_dim));
    Matrix out(q.rows, q.cols);
    for (int h = 0; h < heads; ++h) {
        Matrix qh = slice_cols(q, h * key_dim, key_dim);
        const Matrix kh = slice_cols(k, h * key_dim, key_dim);
        const Matrix vh = slice_cols(v, h * key_dim, key_dim);
        for (float& f : qh.v) {
            f *= scale;
        }
        const Matrix scores = softmax_rows(matmul(qh, transpose(kh)));
        const Matrix oh = matmul(scores, vh);
        for (int r = 0; r < out.rows; ++r) {
            for (int c = 0; c < key_dim; ++c) {
                out.at(r, h * key_dim + c) = oh.at(r, c);
            }
        }
    }
    return out;
}

Tensor sea_attention_block(const Tensor& x, const AttentionConfig& cfg, const WeightStore& ws,
                           const std::string& prefix) {
    if (cfg.channels % cfg.heads != 0) {
        throw ConfigError("sea attention: channels not divisible by heads");
    }
    if (x.c != cfg.channels) {
        throw ShapeError(prefix + ": input channels do not match attention config");
    }
    const int hk = cfg.heads * cfg.key_dim;

    const Tensor q = conv_bn(x, ws, prefix + ".q", hk, 1, 1);
    const Tensor k = conv_bn(x, ws, prefix + ".k", hk, 1, 1);
    const Tensor v = conv_bn(x, ws, prefix + ".v", hk, 1, 1);

    Tensor axial(x.n, hk, x.h, x.w);
    for (int ni = 0; ni < x.n; ++ni) {
        const Matrix row_out = multihead_attention(squeeze_axis(q, ni, true),
                                                   squeeze_axis(k, ni, true),
                                                   squeeze_axis(v, ni, true), cfg.heads, cfg.key_dim);
        const Matrix col_out = multihead_attention(squeeze_axis(q, ni, false),
                                                   squeeze_axis(k, ni, false),
                                                   squeeze_axis(v, ni, false), cfg.heads, cfg.key_dim);
        for (int ci = 0; ci < hk; ++ci) {
            float* p = axial.plane(ni, ci);
            for (int hi = 0; hi < x.h; ++hi) {
                const float rv = row_out.at(hi, ci);
                float* row = p + static_cast<std::size_t>(hi) * x.w;
                for (int wi = 0; wi < x.w; ++wi) {
                    row[wi] = rv + col_out.at(wi, ci);
                }
            }
        }
    }
    const Tensor projected = conv_bn(axial, ws, prefix + ".proj", cfg.channels, 1, 1);

    Tensor detail = concat_channels({&q, &k, &v});
    detail = conv_bn(detail, ws, prefix + ".detail_dw", 3 * hk, 3, 1, 3 * hk);
    detail = conv_bn(detail, ws, prefix + ".detail_pw", cfg.channels, 1, 1);

    return add(add(projected, detail), x);
}

Tensor strided_attention(const Tensor& x, const AttentionConfig& cfg, const WeightStore& ws,
                         const std::string& prefix, AttentionStats* stats) {
    if (x.h < 2 || x.w < 2) {
        throw ShapeError("strided_attention: spatial dims must be >= 2");
    }
    if (x.c != cfg.channels) {
        throw ShapeError(prefix + ": input channels do not match attention config");
    }
    Tensor down = conv_bn(x, ws, prefix + ".stride_dw", cfg.channels, 3, 2, cfg.channels);
    down = conv_bn(down, ws, prefix + ".stride_pw", cfg.channels, 1, 1);
    if (stats) {
        stats->records.push_back({static_cast<std::uint64_t>(x.h) * x.w,
                                  static_cast<std::uint64_t>(down.h) * down.w,
                                  static_cast<std::uint64_t>(cfg.blocks)});
    }
    for (int b = 1; b <= cfg.blocks; ++b) {
        down = sea_attention_block(down, cfg, ws, prefix + ".block" + std::to_string(b));
    }
    return resize(down, x.h, x.w, Interp::bilinear);
}

FeaturePyramid backbone_forward(const Tensor& image, const VariantConfig& variant,
                                const WeightStore& ws, PhaseTimes* phases,
                                AttentionStats* stats) {
    if (image.n != 1 || image.c != 3) {
        throw InputError("backbone expects a (1, 3, H, W) image");
    }
    if (image.h % 32 != 0 || image.w % 32 != 0) {
        throw InputError("image height and width must be divisible by 32, got " +
                         std::to_string(image.h) + "x" + std::to_string(image.w));
    }

    auto run_stage = [&](Tensor t, int stage_index) {
        const auto& blocks = variant.stages[static_cast<std::size_t>(stage_index)];
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            t = mv3_block(t, blocks[b], ws,
                          "stage" + std::to_string(stage_index + 1) + ".block" + std::to_string(b + 1));
        }
        return t;
    };

    FeaturePyramid pyr;
    Tensor s3;
    Tensor s4;
    {
        ScopedPhase phase(phases ? &phases->backbone : nullptr);
        Tensor t = conv_bn(image, ws, "stem.conv", variant.stem.out_channels, variant.stem.kernel,
                           variant.stem.stride);
        t = activation(t, variant.stem.act);
        t = run_stage(std::move(t), 0);
        pyr.f8 = run_stage(std::move(t), 1);
        s3 = run_stage(pyr.f8, 2);
    }
    {
        ScopedPhase phase(phases ? &phases->attention : nullptr);
        pyr.f16 = variant.attn3.blocks > 0 ? strided_attention(s3, variant.attn3, ws, "attn3", stats)
                                           : std::move(s3);
    }
    {
        // Attention blocks sit in the trunk: stage 4 consumes the enhanced feature.
        ScopedPhase phase(phases ? &phases->backbone : nullptr);
        s4 = run_stage(pyr.f16, 3);
    }
    {
        ScopedPhase phase(phases ? &phases->attention : nullptr);
        pyr.f32 = variant.attn4.blocks > 0 ? strided_attention(s4, variant.attn4, ws, "attn4", stats)
                                           : s4;
    }
    return pyr;
}

}  // namespace ppms
