// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "ppms/errors.hpp"

namespace ppms {

/// Dense NCHW tensor of 32-bit floats, contiguous row-major (n-major, w-minor).
struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<float> data;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_);  // zero-filled
    Tensor(int n_, int c_, int h_, int w_, std::vector<float> values);

    std::int64_t numel() const { return static_cast<std::int64_t>(n) * c * h * w; }
    bool same_dims(const Tensor& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }

    float& at(int ni, int ci, int hi, int wi) {
        return data[((static_cast<std::size_t>(ni) * c + ci) * h + hi) * w + wi];
    }
    float at(int ni, int ci, int hi, int wi) const {
        return data[((static_cast<std::size_t>(ni) * c + ci) * h + hi) * w + wi];
    }

    /// Pointer to the (ni, ci) spatial plane of h*w contiguous values.
    float* plane(int ni, int ci) {
        return data.data() + (static_cast<std::size_t>(ni) * c + ci) * h * w;
    }
    const float* plane(int ni, int ci) const {
        return data.data() + (static_cast<std::size_t>(ni) * c + ci) * h * w;
    }
};

/// Integer-valued map of shape (n, 1, h, w); holds class ids.
struct IndexMap {
    int n = 0, h = 0, w = 0;
    std::vector<std::int32_t> data;

    IndexMap() = default;
    IndexMap(int n_, int h_, int w_);

    std::int64_t numel() const { return static_cast<std::int64_t>(n) * h * w; }

    std::int32_t& at(int ni, int hi, int wi) {
        return data[(static_cast<std::size_t>(ni) * h + hi) * w + wi];
    }
    std::int32_t at(int ni, int hi, int wi) const {
        return data[(static_cast<std::size_t>(ni) * h + hi) * w + wi];
    }
};

/// Strictly ascending list of distinct class ids.
using ClassIndexSet = std::vector<std::int32_t>;

}  // namespace ppms
