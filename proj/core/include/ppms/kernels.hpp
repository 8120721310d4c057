// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "ppms/tensor.hpp"

namespace ppms {

struct ConvSpec {
    int in_channels = 0;
    int out_channels = 0;
    int kh = 1, kw = 1;
    int sh = 1, sw = 1;
    int ph = 0, pw = 0;
    int groups = 1;
    bool has_bias = false;
};

enum class Act { relu, relu6, hardswish, hardsigmoid, sigmoid };

enum class Interp { nearest, bilinear };

Act act_from_string(const std::string& s);
std::string act_to_string(Act a);
Interp interp_from_string(const std::string& s);
std::string interp_to_string(Interp m);

/// Direct 2D convolution. Weights are (out_channels, in_channels/groups, kh, kw).
/// Summation order is fixed (output-major, reduction innermost) so results are
/// bit-reproducible for identical inputs. Pass an empty bias span for no bias.
Tensor conv2d(const Tensor& x, const Tensor& weight, std::span<const float> bias, const ConvSpec& spec);

/// Per-channel spatial convolution; requires groups == in_channels == out_channels.
Tensor depthwise_conv2d(const Tensor& x, const Tensor& weight, std::span<const float> bias,
                        const ConvSpec& spec);

Tensor activation(const Tensor& x, Act kind);

/// y[c] = x[c] * scale[c] + shift[c]; vectors sized to the channel count.
Tensor batchnorm_folded(const Tensor& x, std::span<const float> scale, std::span<const float> shift);

/// Mean over h*w per (n, c); output is (n, c, 1, 1).
Tensor global_avg_pool(const Tensor& x);

/// Half-pixel source mapping src = (dst + 0.5) * (in/out) - 0.5 with edge
/// clamping (align-corners disabled); nearest takes floor of the same mapping.
Tensor resize(const Tensor& x, int out_h, int out_w, Interp mode);

/// Per-pixel index of the max channel; ties break toward the lowest index.
IndexMap argmax_channel(const Tensor& x);

/// Ascending distinct values of the map.
ClassIndexSet unique_sorted(const IndexMap& m);

/// Output channel k is input channel idx[k]; spatial dims unchanged.
Tensor gather_channels(const Tensor& x, const ClassIndexSet& idx);

Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

/// Concatenate along the channel axis; all inputs share n, h, w.
Tensor concat_channels(const std::vector<const Tensor*>& parts);

/// Row-major 2D matrix of 32-bit floats.
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<float> v;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0f) {}
    Matrix(int r, int c, std::vector<float> values);

    float& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    float at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

Matrix matmul(const Matrix& a, const Matrix& b);

/// Numerically stabilized by row-max subtraction; each row sums to 1.
Matrix softmax_rows(const Matrix& a);

}  // namespace ppms
