// SPDX-License-Identifier: Apache-2.0
#include "ppms/tensor.hpp"

#include <string>

namespace ppms {

Tensor::Tensor(int n_, int c_, int h_, int w_) : n(n_), c(c_), h(h_), w(w_) {
    if (n < 1 || c < 1 || h < 1 || w < 1) {
        throw ShapeError("tensor dims must all be >= 1, got (" + std::to_string(n) + "," +
                         std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + ")");
    }
    data.assign(static_cast<std::size_t>(numel()), 0.0f);
}

Tensor::Tensor(int n_, int c_, int h_, int w_, std::vector<float> values)
    : n(n_), c(c_), h(h_), w(w_), data(std::move(values)) {
    if (n < 1 || c < 1 || h < 1 || w < 1) {
        throw ShapeError("tensor dims must all be >= 1");
    }
    if (static_cast<std::int64_t>(data.size()) != numel()) {
        throw ShapeError("tensor data length " + std::to_string(data.size()) +
                         " does not match dims product " + std::to_string(numel()));
    }
}

IndexMap::IndexMap(int n_, int h_, int w_) : n(n_), h(h_), w(w_) {
    if (n < 1 || h < 1 || w < 1) {
        throw ShapeError("index map dims must all be >= 1");
    }
    data.assign(static_cast<std::size_t>(numel()), 0);
}

}  // namespace ppms
