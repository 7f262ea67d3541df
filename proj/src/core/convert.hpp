#pragma once

#include <vector>

#include "core/image.hpp"
#include "core/nn/tensor.hpp"

namespace penh {

// HWC float images to one NCHW double batch. All images must share one size.
Tensor batch_to_tensor(const std::vector<ImageTensor>& images);

// One batch item back to an HWC image, values clamped to [0,1].
ImageTensor tensor_to_image(const Tensor& t, int n = 0);

}  // namespace penh
