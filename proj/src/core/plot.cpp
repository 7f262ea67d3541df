#include "core/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/image.hpp"

namespace penh {

namespace {

struct Color {
  float r, g, b;
};

constexpr Color kPalette[] = {
    {0.13f, 0.35f, 0.80f},  // blue
    {0.85f, 0.25f, 0.20f},  // red
    {0.16f, 0.62f, 0.30f},  // green
    {0.80f, 0.55f, 0.10f},  // amber
    {0.55f, 0.25f, 0.70f},  // purple
    {0.35f, 0.35f, 0.35f},  // gray
};

void put(ImageTensor& img, int y, int x, Color c) {
  if (y < 0 || y >= img.height || x < 0 || x >= img.width) return;
  img.at(y, x, 0) = c.r;
  img.at(y, x, 1) = c.g;
  img.at(y, x, 2) = c.b;
}

void draw_line(ImageTensor& img, int y0, int x0, int y1, int x1, Color c) {
  int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    put(img, y0, x0, c);
    put(img, y0 + 1, x0, c);  // 2px weight keeps curves visible when dense
    if (x0 == x1 && y0 == y1) break;
    int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace

void plot_series(const std::vector<std::vector<double>>& series, const std::string& out_png,
                 int width, int height) {
  if (series.empty()) fail(ErrorCode::InvalidArgument, "plot needs at least one series");
  if (width < 64 || height < 64) fail(ErrorCode::InvalidArgument, "plot canvas too small");

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t n = 0;
  for (const auto& s : series) {
    n = std::max(n, s.size());
    for (double v : s)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  }
  if (n == 0 || !std::isfinite(lo)) fail(ErrorCode::InvalidArgument, "plot series are empty");
  if (hi - lo < 1e-12) {
    hi += 1.0;
    lo -= 1.0;
  }

  ImageTensor img = ImageTensor::filled(height, width, 1.f, 1.f, 1.f);
  const int ml = 40, mr = 16, mt = 16, mb = 28;  // margins
  int px0 = ml, px1 = width - mr - 1, py0 = mt, py1 = height - mb - 1;
  Color axis{0.45f, 0.45f, 0.45f};
  draw_line(img, py1, px0, py1, px1, axis);
  draw_line(img, py0, px0, py1, px0, axis);

  auto map_x = [&](std::size_t i) {
    return n < 2 ? px0 : px0 + static_cast<int>(std::lround(static_cast<double>(i) * (px1 - px0) /
                                                            static_cast<double>(n - 1)));
  };
  auto map_y = [&](double v) {
    double t = (v - lo) / (hi - lo);
    return py1 - static_cast<int>(std::lround(t * (py1 - py0)));
  };

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    Color c = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    int prev_x = 0, prev_y = 0;
    bool have_prev = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!std::isfinite(s[i])) {
        have_prev = false;
        continue;
      }
      int x = map_x(i), y = map_y(s[i]);
      if (have_prev)
        draw_line(img, prev_y, prev_x, y, x, c);
      else
        put(img, y, x, c);
      prev_x = x;
      prev_y = y;
      have_prev = true;
    }
    // legend swatch
    for (int dy = 0; dy < 8; ++dy)
      for (int dx = 0; dx < 14; ++dx)
        put(img, py0 + 4 + static_cast<int>(si) * 12 + dy, px1 - 18 + dx, c);
  }
  save_image(img, out_png);
}

}  // namespace penh
