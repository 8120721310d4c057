// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "ppms/tensor.hpp"
#include "ppms/weights.hpp"

namespace ppms {

// Segmentation map container: magic "PPSM", u32 height, u32 width, then
// height*width little-endian u16 class ids, row-major.
void save_segmap(const IndexMap& map, const std::string& path);
IndexMap load_segmap(const std::string& path);

/// Input tensors ride in the weight container under the single name "input".
void save_input_tensor(const Tensor& t, const std::string& path);
Tensor load_input_tensor(const std::string& path);

}  // namespace ppms
