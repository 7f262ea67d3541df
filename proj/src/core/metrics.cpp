#include "core/metrics.hpp"

#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace penh {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }

void check_same_shape(const ImageTensor& a, const ImageTensor& b) {
  if (a.height != b.height || a.width != b.width)
    fail(ErrorCode::ShapeError, "metric inputs differ in shape");
}

}  // namespace

double ciede2000(double l1, double a1, double b1, double l2, double a2, double b2) {
  const double pow25_7 = std::pow(25.0, 7.0);

  double c1 = std::sqrt(a1 * a1 + b1 * b1);
  double c2 = std::sqrt(a2 * a2 + b2 * b2);
  double cbar = 0.5 * (c1 + c2);
  double cbar7 = std::pow(cbar, 7.0);
  double g = 0.5 * (1.0 - std::sqrt(cbar7 / (cbar7 + pow25_7)));
  double a1p = (1.0 + g) * a1;
  double a2p = (1.0 + g) * a2;
  double c1p = std::sqrt(a1p * a1p + b1 * b1);
  double c2p = std::sqrt(a2p * a2p + b2 * b2);

  double h1p = (a1p == 0.0 && b1 == 0.0) ? 0.0 : rad2deg(std::atan2(b1, a1p));
  if (h1p < 0.0) h1p += 360.0;
  double h2p = (a2p == 0.0 && b2 == 0.0) ? 0.0 : rad2deg(std::atan2(b2, a2p));
  if (h2p < 0.0) h2p += 360.0;

  double dlp = l2 - l1;
  double dcp = c2p - c1p;
  double dhp;
  if (c1p * c2p == 0.0) {
    dhp = 0.0;
  } else if (std::abs(h2p - h1p) <= 180.0) {
    dhp = h2p - h1p;
  } else if (h2p - h1p > 180.0) {
    dhp = h2p - h1p - 360.0;
  } else {
    dhp = h2p - h1p + 360.0;
  }
  double dHp = 2.0 * std::sqrt(c1p * c2p) * std::sin(deg2rad(dhp) / 2.0);

  double lbar = 0.5 * (l1 + l2);
  double cbarp = 0.5 * (c1p + c2p);
  double hbarp;
  if (c1p * c2p == 0.0) {
    hbarp = h1p + h2p;
  } else if (std::abs(h1p - h2p) <= 180.0) {
    hbarp = 0.5 * (h1p + h2p);
  } else if (h1p + h2p < 360.0) {
    hbarp = 0.5 * (h1p + h2p + 360.0);
  } else {
    hbarp = 0.5 * (h1p + h2p - 360.0);
  }

  double t = 1.0 - 0.17 * std::cos(deg2rad(hbarp - 30.0)) + 0.24 * std::cos(deg2rad(2.0 * hbarp)) +
             0.32 * std::cos(deg2rad(3.0 * hbarp + 6.0)) - 0.20 * std::cos(deg2rad(4.0 * hbarp - 63.0));
  double dtheta = 30.0 * std::exp(-((hbarp - 275.0) / 25.0) * ((hbarp - 275.0) / 25.0));
  double cbarp7 = std::pow(cbarp, 7.0);
  double rc = 2.0 * std::sqrt(cbarp7 / (cbarp7 + pow25_7));
  double lterm = (lbar - 50.0) * (lbar - 50.0);
  double sl = 1.0 + 0.015 * lterm / std::sqrt(20.0 + lterm);
  double sc = 1.0 + 0.045 * cbarp;
  double sh = 1.0 + 0.015 * cbarp * t;
  double rt = -std::sin(deg2rad(2.0 * dtheta)) * rc;

  double x = dlp / sl;
  double y = dcp / sc;
  double z = dHp / sh;
  return std::sqrt(x * x + y * y + z * z + rt * y * z);
}

double cie76(double l1, double a1, double b1, double l2, double a2, double b2) {
  double dl = l1 - l2, da = a1 - a2, db = b1 - b2;
  return std::sqrt(dl * dl + da * da + db * db);
}

double psnr(const ImageTensor& reference, const ImageTensor& candidate) {
  check_same_shape(reference, candidate);
  double sum = 0.0;
  for (std::size_t i = 0; i < reference.data.size(); ++i) {
    double d = static_cast<double>(reference.data[i]) - static_cast<double>(candidate.data[i]);
    sum += d * d;
  }
  double mse = sum / static_cast<double>(reference.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double delta_e(const ImageTensor& reference, const ImageTensor& candidate, DeltaEVariant variant) {
  check_same_shape(reference, candidate);
  LabTensor ref = rgb_to_lab(reference, LabScale::Unit);
  LabTensor cand = rgb_to_lab(candidate, LabScale::Unit);
  double sum = 0.0;
  std::size_t n = ref.pixel_count();
  for (std::size_t p = 0; p < n; ++p) {
    if (variant == DeltaEVariant::Ciede2000)
      sum += ciede2000(ref.l[p], ref.a[p], ref.b[p], cand.l[p], cand.a[p], cand.b[p]);
    else
      sum += cie76(ref.l[p], ref.a[p], ref.b[p], cand.l[p], cand.a[p], cand.b[p]);
  }
  return sum / static_cast<double>(n);
}

}  // namespace penh
