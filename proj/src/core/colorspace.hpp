#pragma once

#include <cstddef>
#include <vector>

#include "core/image.hpp"

namespace penh {

enum class LabScale { Unit, EightBit };

// Planar Lab image. `unit` keeps L in [0,100]; `eight_bit` rescales L to
// [0,255] (L × 2.55), which is the scale the degradation gate thresholds on.
struct LabTensor {
  int height = 0;
  int width = 0;
  LabScale scale = LabScale::Unit;
  std::vector<double> l;
  std::vector<double> a;
  std::vector<double> b;

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
};

// Scalar sRGB → Lab (D65, unit scale). Inputs in [0,1].
void srgb_to_lab(double r, double g, double b, double& out_l, double& out_a, double& out_b);

LabTensor rgb_to_lab(const ImageTensor& img, LabScale scale);

}  // namespace penh
