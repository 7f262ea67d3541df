#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace penh {

/// H x W x 3 image, RGB interleaved, values in [0,1].
struct ImageTensor {
  int height = 0;
  int width = 0;
  std::vector<float> data;  // size height*width*3

  static ImageTensor filled(int height, int width, float r, float g, float b);

  float& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  float at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height) * width;
  }
  bool empty() const { return height == 0 || width == 0; }
};

/// Throws an Error if dims are non-positive, the buffer size is wrong, or any
/// value is non-finite or outside [0,1].
void validate_image(const ImageTensor& img, const std::string& what);

/// Decodes a PNG or JPEG file (detected by signature). 8-bit samples are
/// scaled by 1/255, 16-bit PNG by 1/65535. Grayscale is replicated to three
/// channels; alpha is dropped.
ImageTensor load_image(const std::string& path);

/// Encodes 8-bit PNG or JPEG depending on the file extension (.png, .jpg,
/// .jpeg). Values are clamped and rounded to the nearest 8-bit code, so a
/// save/load round trip is exact to within 1/255 per channel.
void save_image(const ImageTensor& img, const std::string& path);

/// Bilinear resize with the half-pixel center convention; an identity-size
/// resize reproduces the input exactly.
ImageTensor resize_bilinear(const ImageTensor& img, int out_height, int out_width);

/// Mirror-pads on the bottom/right edges up to the requested size
/// (reflection without repeating the border sample, falling back to edge
/// replication for single-pixel dimensions).
ImageTensor pad_reflect(const ImageTensor& img, int out_height, int out_width);

/// Top-left crop.
ImageTensor crop(const ImageTensor& img, int out_height, int out_width);

}  // namespace penh
