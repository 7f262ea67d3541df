#include "core/convert.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace penh {

Tensor batch_to_tensor(const std::vector<ImageTensor>& images) {
  if (images.empty()) fail(ErrorCode::InvalidArgument, "empty image batch");
  int h = images[0].height, w = images[0].width;
  Tensor t(static_cast<int>(images.size()), 3, h, w);
  for (std::size_t n = 0; n < images.size(); ++n) {
    const ImageTensor& img = images[n];
    if (img.height != h || img.width != w)
      fail(ErrorCode::ShapeError, "batch images disagree on size");
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < 3; ++c)
          t.at(static_cast<int>(n), c, y, x) = img.at(y, x, c);
  }
  return t;
}

ImageTensor tensor_to_image(const Tensor& t, int n) {
  if (t.c != 3) fail(ErrorCode::ShapeError, "expected a 3-channel tensor, got " + t.shape_str());
  if (n < 0 || n >= t.n) fail(ErrorCode::InvalidArgument, "batch index out of range");
  ImageTensor img;
  img.height = t.h;
  img.width = t.w;
  img.data.resize(static_cast<std::size_t>(t.h) * t.w * 3);
  for (int y = 0; y < t.h; ++y)
    for (int x = 0; x < t.w; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(y, x, c) = static_cast<float>(std::clamp(t.at(n, c, y, x), 0.0, 1.0));
  return img;
}

}  // namespace penh
