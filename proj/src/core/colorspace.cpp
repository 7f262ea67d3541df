#include "core/colorspace.hpp"

#include <cmath>

namespace penh {

namespace {

// sRGB → XYZ (D65). The white point is taken as the matrix row sums so that
// (1,1,1) lands exactly on (100, 0, 0) after normalization.
constexpr double kM[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};
constexpr double kXn = kM[0][0] + kM[0][1] + kM[0][2];
constexpr double kYn = kM[1][0] + kM[1][1] + kM[1][2];
constexpr double kZn = kM[2][0] + kM[2][1] + kM[2][2];

constexpr double kEps = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

double srgb_inverse_gamma(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double lab_f(double t) { return t > kEps ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0; }

}  // namespace

void srgb_to_lab(double r, double g, double b, double& out_l, double& out_a, double& out_b) {
  double rl = srgb_inverse_gamma(r);
  double gl = srgb_inverse_gamma(g);
  double bl = srgb_inverse_gamma(b);
  double x = kM[0][0] * rl + kM[0][1] * gl + kM[0][2] * bl;
  double y = kM[1][0] * rl + kM[1][1] * gl + kM[1][2] * bl;
  double z = kM[2][0] * rl + kM[2][1] * gl + kM[2][2] * bl;
  double ty = y / kYn;
  double fx = lab_f(x / kXn);
  double fy = lab_f(ty);
  double fz = lab_f(z / kZn);
  // Algebraically 116·f(t)−16 on both branches, but evaluating the linear
  // branch as κ·t keeps black at exactly 0.
  out_l = ty > kEps ? 116.0 * fy - 16.0 : kKappa * ty;
  out_a = 500.0 * (fx - fy);
  out_b = 200.0 * (fy - fz);
}

LabTensor rgb_to_lab(const ImageTensor& img, LabScale scale) {
  LabTensor lab;
  lab.height = img.height;
  lab.width = img.width;
  lab.scale = scale;
  std::size_t n = lab.pixel_count();
  lab.l.resize(n);
  lab.a.resize(n);
  lab.b.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    srgb_to_lab(img.data[3 * p], img.data[3 * p + 1], img.data[3 * p + 2],
                lab.l[p], lab.a[p], lab.b[p]);
    if (scale == LabScale::EightBit) lab.l[p] *= 2.55;
  }
  return lab;
}

}  // namespace penh
