// SPDX-License-Identifier: Apache-2.0
#include "ppms/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ppms {

Matrix::Matrix(int r, int c, std::vector<float> values) : rows(r), cols(c), v(std::move(values)) {
    if (static_cast<std::int64_t>(v.size()) != static_cast<std::int64_t>(rows) * cols) {
        throw ShapeError("matrix data length does not match rows*cols");
    }
}

Act act_from_string(const std::string& s) {
    if (s == "relu") return Act::relu;
    if (s == "relu6") return Act::relu6;
    if (s == "hardswish") return Act::hardswish;
    if (s == "hardsigmoid") return Act::hardsigmoid;
    if (s == "sigmoid") return Act::sigmoid;
    throw ConfigError("unknown activation: " + s);
}

std::string act_to_string(Act a) {
    switch (a) {
        case Act::relu: return "relu";
        case Act::relu6: return "relu6";
        case Act::hardswish: return "hardswish";
        case Act::hardsigmoid: return "hardsigmoid";
        case Act::sigmoid: return "sigmoid";
    }
    return "relu";
}

Interp interp_from_string(const std::string& s) {
    if (s == "nearest") return Interp::nearest;
    if (s == "bilinear") return Interp::bilinear;
    throw ConfigError("unknown interpolation mode: " + s);
}

std::string interp_to_string(Interp m) {
    return m == Interp::nearest ? "nearest" : "bilinear";
}

namespace {

int conv_out_dim(int in, int pad, int k, int stride) {
    return (in + 2 * pad - k) / stride + 1;
}

void check_conv_args(const Tensor& x, const Tensor& weight, std::span<const float> bias,
                     const ConvSpec& s) {
    if (s.groups < 1 || s.in_channels % s.groups != 0 || s.out_channels % s.groups != 0) {
        throw ShapeError("conv2d: in/out channels must be divisible by groups");
    }
    if (x.c != s.in_channels) {
        throw ShapeError("conv2d: input has " + std::to_string(x.c) + " channels, spec expects " +
                         std::to_string(s.in_channels));
    }
    const int icpg = s.in_channels / s.groups;
    if (weight.n != s.out_channels || weight.c != icpg || weight.h != s.kh || weight.w != s.kw) {
        throw ShapeError("conv2d: weight dims (" + std::to_string(weight.n) + "," +
                         std::to_string(weight.c) + "," + std::to_string(weight.h) + "," +
                         std::to_string(weight.w) + ") do not match spec");
    }
    if (!bias.empty() && static_cast<int>(bias.size()) != s.out_channels) {
        throw ShapeError("conv2d: bias length does not match out_channels");
    }
    if (s.sh < 1 || s.sw < 1 || s.ph < 0 || s.pw < 0) {
        throw ShapeError("conv2d: invalid stride or padding");
    }
    if (conv_out_dim(x.h, s.ph, s.kh, s.sh) < 1 || conv_out_dim(x.w, s.pw, s.kw, s.sw) < 1) {
        throw ShapeError("conv2d: computed output spatial dim < 1");
    }
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& weight, std::span<const float> bias, const ConvSpec& s) {
    check_conv_args(x, weight, bias, s);
    const int oh = conv_out_dim(x.h, s.ph, s.kh, s.sh);
    const int ow = conv_out_dim(x.w, s.pw, s.kw, s.sw);
    Tensor out(x.n, s.out_channels, oh, ow);

    const int icpg = s.in_channels / s.groups;
    const int ocpg = s.out_channels / s.groups;
    const std::size_t ksize = static_cast<std::size_t>(s.kh) * s.kw;

    // 1x1 stride-1 fast path: accumulate whole planes. Per-element summation
    // order (ascending input channel) matches the generic loop below.
    const bool pointwise = s.kh == 1 && s.kw == 1 && s.sh == 1 && s.sw == 1 && s.ph == 0 && s.pw == 0;
    if (pointwise) {
        const std::size_t hw = static_cast<std::size_t>(x.h) * x.w;
        for (int ni = 0; ni < x.n; ++ni) {
            for (int g = 0; g < s.groups; ++g) {
                for (int ocl = 0; ocl < ocpg; ++ocl) {
                    const int oc = g * ocpg + ocl;
                    float* op = out.plane(ni, oc);
                    const float b = bias.empty() ? 0.0f : bias[oc];
                    std::fill(op, op + hw, b);
                    for (int icl = 0; icl < icpg; ++icl) {
                        const float wv = weight.data[static_cast<std::size_t>(oc) * icpg + icl];
                        const float* ip = x.plane(ni, g * icpg + icl);
                        for (std::size_t i = 0; i < hw; ++i) {
                            op[i] += wv * ip[i];
                        }
                    }
                }
            }
        }
        return out;
    }

    for (int ni = 0; ni < x.n; ++ni) {
        for (int g = 0; g < s.groups; ++g) {
            for (int ocl = 0; ocl < ocpg; ++ocl) {
                const int oc = g * ocpg + ocl;
                const float b = bias.empty() ? 0.0f : bias[oc];
                const float* wbase = weight.data.data() + static_cast<std::size_t>(oc) * icpg * ksize;
                float* op = out.plane(ni, oc);
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy0 = oy * s.sh - s.ph;
                    const int ky_lo = std::max(0, -iy0);
                    const int ky_hi = std::min(s.kh, x.h - iy0);
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix0 = ox * s.sw - s.pw;
                        const int kx_lo = std::max(0, -ix0);
                        const int kx_hi = std::min(s.kw, x.w - ix0);
                        float acc = b;
                        for (int icl = 0; icl < icpg; ++icl) {
                            const float* ip = x.plane(ni, g * icpg + icl);
                            const float* wp = wbase + static_cast<std::size_t>(icl) * ksize;
                            for (int ky = ky_lo; ky < ky_hi; ++ky) {
                                const float* irow = ip + static_cast<std::size_t>(iy0 + ky) * x.w + ix0;
                                const float* wrow = wp + static_cast<std::size_t>(ky) * s.kw;
                                for (int kx = kx_lo; kx < kx_hi; ++kx) {
                                    acc += irow[kx] * wrow[kx];
                                }
                            }
                        }
                        op[static_cast<std::size_t>(oy) * ow + ox] = acc;
                    }
                }
            }
        }
    }
    return out;
}

Tensor depthwise_conv2d(const Tensor& x, const Tensor& weight, std::span<const float> bias,
                        const ConvSpec& s) {
    if (s.groups != s.in_channels || s.in_channels != s.out_channels) {
        throw ShapeError("depthwise_conv2d requires groups == in_channels == out_channels");
    }
    return conv2d(x, weight, bias, s);
}

Tensor activation(const Tensor& x, Act kind) {
    Tensor out = x;
    float* p = out.data.data();
    const std::size_t count = out.data.size();
    switch (kind) {
        case Act::relu:
            for (std::size_t i = 0; i < count; ++i) p[i] = p[i] > 0.0f ? p[i] : 0.0f;
            break;
        case Act::relu6:
            for (std::size_t i = 0; i < count; ++i) p[i] = std::clamp(p[i], 0.0f, 6.0f);
            break;
        case Act::hardswish:
            for (std::size_t i = 0; i < count; ++i) {
                p[i] = p[i] * std::clamp(p[i] + 3.0f, 0.0f, 6.0f) * (1.0f / 6.0f);
            }
            break;
        case Act::hardsigmoid:
            for (std::size_t i = 0; i < count; ++i) {
                p[i] = std::clamp(p[i] + 3.0f, 0.0f, 6.0f) * (1.0f / 6.0f);
            }
            break;
        case Act::sigmoid:
            for (std::size_t i = 0; i < count; ++i) p[i] = 1.0f / (1.0f + std::exp(-p[i]));
            break;
    }
    return out;
}

Tensor batchnorm_folded(const Tensor& x, std::span<const float> scale, std::span<const float> shift) {
    if (static_cast<int>(scale.size()) != x.c || static_cast<int>(shift.size()) != x.c) {
        throw ShapeError("batchnorm_folded: scale/shift length must equal channel count");
    }
    Tensor out(x.n, x.c, x.h, x.w);
    const std::size_t hw = static_cast<std::size_t>(x.h) * x.w;
    for (int ni = 0; ni < x.n; ++ni) {
        for (int ci = 0; ci < x.c; ++ci) {
            const float* ip = x.plane(ni, ci);
            float* op = out.plane(ni, ci);
            const float a = scale[ci];
            const float b = shift[ci];
            for (std::size_t i = 0; i < hw; ++i) {
                op[i] = ip[i] * a + b;
            }
        }
    }
    return out;
}

Tensor global_avg_pool(const Tensor& x) {
    Tensor out(x.n, x.c, 1, 1);
    const std::size_t hw = static_cast<std::size_t>(x.h) * x.w;
    const float inv = 1.0f / static_cast<float>(hw);
    for (int ni = 0; ni < x.n; ++ni) {
        for (int ci = 0; ci < x.c; ++ci) {
            const float* ip = x.plane(ni, ci);
            float acc = 0.0f;
            for (std::size_t i = 0; i < hw; ++i) {
                acc += ip[i];
            }
            out.at(ni, ci, 0, 0) = acc * inv;
        }
    }
    return out;
}

namespace {

// Source positions for one axis of the half-pixel mapping.
struct AxisMap {
    std::vector<int> lo, hi;     // clamped neighbor indices (bilinear)
    std::vector<float> frac;     // blend weight toward hi
    std::vector<int> nearest;    // floor of the mapping, clamped (nearest)
};

AxisMap make_axis_map(int in, int out) {
    AxisMap m;
    m.lo.resize(out);
    m.hi.resize(out);
    m.frac.resize(out);
    m.nearest.resize(out);
    const double scale = static_cast<double>(in) / out;
    for (int d = 0; d < out; ++d) {
        const double src = (d + 0.5) * scale - 0.5;
        const double clamped = std::min(std::max(src, 0.0), static_cast<double>(in - 1));
        const int lo = static_cast<int>(clamped);
        m.lo[d] = lo;
        m.hi[d] = std::min(lo + 1, in - 1);
        m.frac[d] = static_cast<float>(clamped - lo);
        m.nearest[d] = std::clamp(static_cast<int>(std::floor(src)), 0, in - 1);
    }
    return m;
}

}  // namespace

Tensor resize(const Tensor& x, int out_h, int out_w, Interp mode) {
    if (out_h < 1 || out_w < 1) {
        throw ShapeError("resize: output dims must be >= 1");
    }
    if (out_h == x.h && out_w == x.w) {
        return x;
    }
    Tensor out(x.n, x.c, out_h, out_w);
    const AxisMap ym = make_axis_map(x.h, out_h);
    const AxisMap xm = make_axis_map(x.w, out_w);

    for (int ni = 0; ni < x.n; ++ni) {
        for (int ci = 0; ci < x.c; ++ci) {
            const float* ip = x.plane(ni, ci);
            float* op = out.plane(ni, ci);
            if (mode == Interp::nearest) {
                for (int oy = 0; oy < out_h; ++oy) {
                    const float* irow = ip + static_cast<std::size_t>(ym.nearest[oy]) * x.w;
                    float* orow = op + static_cast<std::size_t>(oy) * out_w;
                    for (int ox = 0; ox < out_w; ++ox) {
                        orow[ox] = irow[xm.nearest[ox]];
                    }
                }
            } else {
                for (int oy = 0; oy < out_h; ++oy) {
                    const float* row0 = ip + static_cast<std::size_t>(ym.lo[oy]) * x.w;
                    const float* row1 = ip + static_cast<std::size_t>(ym.hi[oy]) * x.w;
                    const float fy = ym.frac[oy];
                    float* orow = op + static_cast<std::size_t>(oy) * out_w;
                    for (int ox = 0; ox < out_w; ++ox) {
                        const int x0 = xm.lo[ox];
                        const int x1 = xm.hi[ox];
                        const float fx = xm.frac[ox];
                        const float top = row0[x0] + fx * (row0[x1] - row0[x0]);
                        const float bot = row1[x0] + fx * (row1[x1] - row1[x0]);
                        orow[ox] = top + fy * (bot - top);
                    }
                }
            }
        }
    }
    return out;
}

IndexMap argmax_channel(const Tensor& x) {
    IndexMap out(x.n, x.h, x.w);
    const std::size_t hw = static_cast<std::size_t>(x.h) * x.w;
    std::vector<float> best(hw);
    for (int ni = 0; ni < x.n; ++ni) {
        const float* p0 = x.plane(ni, 0);
        std::copy(p0, p0 + hw, best.begin());
        std::int32_t* idx = out.data.data() + static_cast<std::size_t>(ni) * hw;
        std::fill(idx, idx + hw, 0);
        for (int ci = 1; ci < x.c; ++ci) {
            const float* ip = x.plane(ni, ci);
            for (std::size_t i = 0; i < hw; ++i) {
                if (ip[i] > best[i]) {
                    best[i] = ip[i];
                    idx[i] = ci;
                }
            }
        }
    }
    return out;
}

ClassIndexSet unique_sorted(const IndexMap& m) {
    std::int32_t max_id = 0;
    for (std::int32_t v : m.data) {
        if (v < 0) {
            throw IndexError("unique_sorted: negative class id " + std::to_string(v));
        }
        max_id = std::max(max_id, v);
    }
    std::vector<bool> seen(static_cast<std::size_t>(max_id) + 1, false);
    for (std::int32_t v : m.data) {
        seen[static_cast<std::size_t>(v)] = true;
    }
    ClassIndexSet out;
    for (std::int32_t v = 0; v <= max_id; ++v) {
        if (seen[static_cast<std::size_t>(v)]) {
            out.push_back(v);
        }
    }
    return out;
}

Tensor gather_channels(const Tensor& x, const ClassIndexSet& idx) {
    if (idx.empty()) {
        throw IndexError("gather_channels: empty index set");
    }
    for (std::int32_t id : idx) {
        if (id < 0 || id >= x.c) {
            throw IndexError("gather_channels: channel id " + std::to_string(id) +
                             " out of range [0," + std::to_string(x.c) + ")");
        }
    }
    Tensor out(x.n, static_cast<int>(idx.size()), x.h, x.w);
    const std::size_t hw = static_cast<std::size_t>(x.h) * x.w;
    for (int ni = 0; ni < x.n; ++ni) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const float* ip = x.plane(ni, idx[k]);
            std::copy(ip, ip + hw, out.plane(ni, static_cast<int>(k)));
        }
    }
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_dims(b)) {
        throw ShapeError("add: dims differ");
    }
    Tensor out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] += b.data[i];
    }
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    if (!a.same_dims(b)) {
        throw ShapeError("mul: dims differ");
    }
    Tensor out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] *= b.data[i];
    }
    return out;
}

Tensor concat_channels(const std::vector<const Tensor*>& parts) {
    if (parts.empty()) {
        throw ShapeError("concat_channels: no inputs");
    }
    const Tensor& first = *parts.front();
    int channels = 0;
    for (const Tensor* t : parts) {
        if (t->n != first.n || t->h != first.h || t->w != first.w) {
            throw ShapeError("concat_channels: spatial/batch dims differ");
        }
        channels += t->c;
    }
    Tensor out(first.n, channels, first.h, first.w);
    const std::size_t hw = static_cast<std::size_t>(first.h) * first.w;
    for (int ni = 0; ni < first.n; ++ni) {
        int co = 0;
        for (const Tensor* t : parts) {
            for (int ci = 0; ci < t->c; ++ci, ++co) {
                const float* ip = t->plane(ni, ci);
                std::copy(ip, ip + hw, out.plane(ni, co));
            }
        }
    }
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw ShapeError("matmul: inner dims disagree (" + std::to_string(a.cols) + " vs " +
                         std::to_string(b.rows) + ")");
    }
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < b.cols; ++j) {
            float acc = 0.0f;
            for (int k = 0; k < a.cols; ++k) {
                acc += a.at(i, k) * b.at(k, j);
            }
            out.at(i, j) = acc;
        }
    }
    return out;
}

Matrix softmax_rows(const Matrix& a) {
    Matrix out(a.rows, a.cols);
    for (int i = 0; i < a.rows; ++i) {
        float mx = a.at(i, 0);
        for (int j = 1; j < a.cols; ++j) {
            mx = std::max(mx, a.at(i, j));
        }
        float sum = 0.0f;
        for (int j = 0; j < a.cols; ++j) {
            const float e = std::exp(a.at(i, j) - mx);
            out.at(i, j) = e;
            sum += e;
        }
        const float inv = 1.0f / sum;
        for (int j = 0; j < a.cols; ++j) {
            out.at(i, j) *= inv;
        }
    }
    return out;
}

}  // namespace ppms
