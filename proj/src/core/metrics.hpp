#pragma once

#include "core/colorspace.hpp"
#include "core/image.hpp"

namespace penh {

enum class DeltaEVariant { Ciede2000, Cie76 };

// Color difference between two Lab points (unit scale).
double ciede2000(double l1, double a1, double b1, double l2, double a2, double b2);
double cie76(double l1, double a1, double b1, double l2, double a2, double b2);

// 10·log10(1/MSE) with peak 1.0; +inf for identical inputs.
double psnr(const ImageTensor& reference, const ImageTensor& candidate);

// Mean per-pixel color difference in Lab.
double delta_e(const ImageTensor& reference, const ImageTensor& candidate,
               DeltaEVariant variant = DeltaEVariant::Ciede2000);

}  // namespace penh
