#include "core/nn/layers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace penh {

namespace nn_detail {
// im2col working set is strip-mined to keep peak memory flat regardless of
// image size (a 1024² column matrix would otherwise run to gigabytes).
// Mutable so tests can shrink it and exercise strip boundaries cheaply.
std::size_t strip_budget_bytes = 32u << 20;
}  // namespace nn_detail

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatRM>;
using CMapRM = Eigen::Map<const MatRM>;
using StridedMap = Eigen::Map<MatRM, 0, Eigen::OuterStride<>>;
using CStridedMap = Eigen::Map<const MatRM, 0, Eigen::OuterStride<>>;

std::size_t strip_columns(std::size_t rows, std::size_t total_cols) {
  std::size_t cols =
      nn_detail::strip_budget_bytes / (sizeof(double) * std::max<std::size_t>(rows, 1));
  return std::max<std::size_t>(1, std::min(cols, total_cols));
}

// Gathers patches of src (C×H×W) for grid positions [p0,p1) on a grid of
// width grid_w; col is (C·k·k)×(p1−p0) row-major. Sample (r=(c,ky,kx), p):
// src[c][py·stride−pad+ky][px·stride−pad+kx], zero outside.
void im2col_strip(const double* src, int C, int H, int W, int k, int stride, int pad,
                  int grid_w, std::size_t p0, std::size_t p1, double* col) {
  const std::size_t cols = p1 - p0;
  for (int c = 0; c < C; ++c) {
    const double* plane = src + static_cast<std::size_t>(c) * H * W;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        double* row = col + ((static_cast<std::size_t>(c) * k + ky) * k + kx) * cols;
        int py = static_cast<int>(p0) / grid_w;
        int px = static_cast<int>(p0) % grid_w;
        for (std::size_t i = 0; i < cols; ++i) {
          int sy = py * stride - pad + ky;
          int sx = px * stride - pad + kx;
          row[i] = (sy >= 0 && sy < H && sx >= 0 && sx < W)
                       ? plane[static_cast<std::size_t>(sy) * W + sx]
                       : 0.0;
          if (++px == grid_w) {
            px = 0;
            ++py;
          }
        }
      }
    }
  }
}

// Scatter-add inverse of im2col_strip.
void col2im_strip_add(const double* col, int C, int H, int W, int k, int stride, int pad,
                      int grid_w, std::size_t p0, std::size_t p1, double* dst) {
  const std::size_t cols = p1 - p0;
  for (int c = 0; c < C; ++c) {
    double* plane = dst + static_cast<std::size_t>(c) * H * W;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const double* row = col + ((static_cast<std::size_t>(c) * k + ky) * k + kx) * cols;
        int py = static_cast<int>(p0) / grid_w;
        int px = static_cast<int>(p0) % grid_w;
        for (std::size_t i = 0; i < cols; ++i) {
          int sy = py * stride - pad + ky;
          int sx = px * stride - pad + kx;
          if (sy >= 0 && sy < H && sx >= 0 && sx < W)
            plane[static_cast<std::size_t>(sy) * W + sx] += row[i];
          if (++px == grid_w) {
            px = 0;
            ++py;
          }
        }
      }
    }
  }
}

}  // namespace

// ---- Conv2d ----

Conv2d::Conv2d(const std::string& name, int in_ch_, int out_ch_, int kernel, int stride_,
               int pad_)
    : weight(name + "/weight",
             static_cast<std::size_t>(out_ch_) * in_ch_ * kernel * kernel),
      bias(name + "/bias", static_cast<std::size_t>(out_ch_)),
      in_ch(in_ch_), out_ch(out_ch_), k(kernel), stride(stride_), pad(pad_) {}

void Conv2d::init_he(Rng& rng) {
  double std = std::sqrt(2.0 / (static_cast<double>(in_ch) * k * k));
  for (auto& v : weight.value) v = rng.normal(0.0, std);
  std::fill(bias.value.begin(), bias.value.end(), 0.0);
}

Tensor Conv2d::forward(const Tensor& x) const {
  if (x.c != in_ch) fail(ErrorCode::ShapeError, "conv expects " + std::to_string(in_ch) +
                                                    " channels, got " + std::to_string(x.c));
  const int oh = out_dim(x.h), ow = out_dim(x.w);
  if (oh < 1 || ow < 1) fail(ErrorCode::ShapeError, "conv input too small: " + x.shape_str());
  Tensor y(x.n, out_ch, oh, ow);

  const std::size_t ck = static_cast<std::size_t>(in_ch) * k * k;
  const std::size_t total = static_cast<std::size_t>(oh) * ow;
  const std::size_t strip = strip_columns(ck, total);
  std::vector<double> col(ck * strip);
  CMapRM wmat(weight.value.data(), out_ch, static_cast<Eigen::Index>(ck));

  for (int in = 0; in < x.n; ++in) {
    for (std::size_t p0 = 0; p0 < total; p0 += strip) {
      std::size_t p1 = std::min(total, p0 + strip);
      im2col_strip(x.item(in), in_ch, x.h, x.w, k, stride, pad, ow, p0, p1, col.data());
      CMapRM cmat(col.data(), static_cast<Eigen::Index>(ck), static_cast<Eigen::Index>(p1 - p0));
      StridedMap ymat(y.item(in) + p0, out_ch, static_cast<Eigen::Index>(p1 - p0),
                      Eigen::OuterStride<>(static_cast<Eigen::Index>(total)));
      ymat.noalias() = wmat * cmat;
    }
    double* yi = y.item(in);
    for (int oc = 0; oc < out_ch; ++oc) {
      double b = bias.value[static_cast<std::size_t>(oc)];
      double* row = yi + static_cast<std::size_t>(oc) * total;
      for (std::size_t p = 0; p < total; ++p) row[p] += b;
    }
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& x, const Tensor& dy, bool want_wgrad) {
  const int oh = out_dim(x.h), ow = out_dim(x.w);
  const std::size_t ck = static_cast<std::size_t>(in_ch) * k * k;
  const std::size_t total = static_cast<std::size_t>(oh) * ow;
  const std::size_t strip = strip_columns(ck, total);
  std::vector<double> col(ck * strip);
  std::vector<double> dcol(ck * strip);

  Tensor dx(x.n, x.c, x.h, x.w);
  CMapRM wmat(weight.value.data(), out_ch, static_cast<Eigen::Index>(ck));
  MapRM dwmat(weight.grad.data(), out_ch, static_cast<Eigen::Index>(ck));

  for (int in = 0; in < x.n; ++in) {
    for (std::size_t p0 = 0; p0 < total; p0 += strip) {
      std::size_t p1 = std::min(total, p0 + strip);
      CStridedMap dymat(dy.item(in) + p0, out_ch, static_cast<Eigen::Index>(p1 - p0),
                        Eigen::OuterStride<>(static_cast<Eigen::Index>(total)));
      if (want_wgrad) {
        im2col_strip(x.item(in), in_ch, x.h, x.w, k, stride, pad, ow, p0, p1, col.data());
        CMapRM cmat(col.data(), static_cast<Eigen::Index>(ck),
                    static_cast<Eigen::Index>(p1 - p0));
        dwmat.noalias() += dymat * cmat.transpose();
      }
      MapRM dcmat(dcol.data(), static_cast<Eigen::Index>(ck), static_cast<Eigen::Index>(p1 - p0));
      dcmat.noalias() = wmat.transpose() * dymat;
      col2im_strip_add(dcol.data(), in_ch, x.h, x.w, k, stride, pad, ow, p0, p1, dx.item(in));
    }
    if (want_wgrad) {
      const double* dyi = dy.item(in);
      for (int oc = 0; oc < out_ch; ++oc) {
        double s = 0.0;
        const double* row = dyi + static_cast<std::size_t>(oc) * total;
        for (std::size_t p = 0; p < total; ++p) s += row[p];
        bias.grad[static_cast<std::size_t>(oc)] += s;
      }
    }
  }
  return dx;
}

void Conv2d::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

// ---- ConvTranspose2d ----

ConvTranspose2d::ConvTranspose2d(const std::string& name, int in_ch_, int out_ch_, int kernel,
                                 int stride_, int pad_, int output_pad_)
    : weight(name + "/weight",
             static_cast<std::size_t>(in_ch_) * out_ch_ * kernel * kernel),
      bias(name + "/bias", static_cast<std::size_t>(out_ch_)),
      in_ch(in_ch_), out_ch(out_ch_), k(kernel), stride(stride_), pad(pad_),
      output_pad(output_pad_) {}

void ConvTranspose2d::init_he(Rng& rng) {
  double std = std::sqrt(2.0 / (static_cast<double>(in_ch) * k * k));
  for (auto& v : weight.value) v = rng.normal(0.0, std);
  std::fill(bias.value.begin(), bias.value.end(), 0.0);
}

Tensor ConvTranspose2d::forward(const Tensor& x) const {
  if (x.c != in_ch)
    fail(ErrorCode::ShapeError, "transpose conv expects " + std::to_string(in_ch) +
                                    " channels, got " + std::to_string(x.c));
  const int oh = out_dim(x.h), ow = out_dim(x.w);
  Tensor y(x.n, out_ch, oh, ow);

  const std::size_t ok = static_cast<std::size_t>(out_ch) * k * k;
  const std::size_t total = x.plane();  // grid = input positions
  const std::size_t strip = strip_columns(ok, total);
  std::vector<double> col(ok * strip);
  CMapRM wmat(weight.value.data(), in_ch, static_cast<Eigen::Index>(ok));

  for (int in = 0; in < x.n; ++in) {
    for (std::size_t p0 = 0; p0 < total; p0 += strip) {
      std::size_t p1 = std::min(total, p0 + strip);
      CStridedMap xmat(x.item(in) + p0, in_ch, static_cast<Eigen::Index>(p1 - p0),
                       Eigen::OuterStride<>(static_cast<Eigen::Index>(total)));
      MapRM cmat(col.data(), static_cast<Eigen::Index>(ok), static_cast<Eigen::Index>(p1 - p0));
      cmat.noalias() = wmat.transpose() * xmat;
      col2im_strip_add(col.data(), out_ch, oh, ow, k, stride, pad, x.w, p0, p1, y.item(in));
    }
    double* yi = y.item(in);
    const std::size_t oplane = static_cast<std::size_t>(oh) * ow;
    for (int oc = 0; oc < out_ch; ++oc) {
      double b = bias.value[static_cast<std::size_t>(oc)];
      double* row = yi + static_cast<std::size_t>(oc) * oplane;
      for (std::size_t p = 0; p < oplane; ++p) row[p] += b;
    }
  }
  return y;
}

Tensor ConvTranspose2d::backward(const Tensor& x, const Tensor& dy, bool want_wgrad) {
  const int oh = out_dim(x.h), ow = out_dim(x.w);
  const std::size_t ok = static_cast<std::size_t>(out_ch) * k * k;
  const std::size_t total = x.plane();
  const std::size_t strip = strip_columns(ok, total);
  std::vector<double> dcol(ok * strip);

  Tensor dx(x.n, x.c, x.h, x.w);
  CMapRM wmat(weight.value.data(), in_ch, static_cast<Eigen::Index>(ok));
  MapRM dwmat(weight.grad.data(), in_ch, static_cast<Eigen::Index>(ok));

  for (int in = 0; in < x.n; ++in) {
    for (std::size_t p0 = 0; p0 < total; p0 += strip) {
      std::size_t p1 = std::min(total, p0 + strip);
      im2col_strip(dy.item(in), out_ch, oh, ow, k, stride, pad, x.w, p0, p1, dcol.data());
      CMapRM dcmat(dcol.data(), static_cast<Eigen::Index>(ok),
                   static_cast<Eigen::Index>(p1 - p0));
      StridedMap dxmat(dx.item(in) + p0, in_ch, static_cast<Eigen::Index>(p1 - p0),
                       Eigen::OuterStride<>(static_cast<Eigen::Index>(total)));
      dxmat.noalias() = wmat * dcmat;
      if (want_wgrad) {
        CStridedMap xmat(x.item(in) + p0, in_ch, static_cast<Eigen::Index>(p1 - p0),
                         Eigen::OuterStride<>(static_cast<Eigen::Index>(total)));
        dwmat.noalias() += xmat * dcmat.transpose();
      }
    }
    if (want_wgrad) {
      const double* dyi = dy.item(in);
      const std::size_t oplane = static_cast<std::size_t>(oh) * ow;
      for (int oc = 0; oc < out_ch; ++oc) {
        double s = 0.0;
        const double* row = dyi + static_cast<std::size_t>(oc) * oplane;
        for (std::size_t p = 0; p < oplane; ++p) s += row[p];
        bias.grad[static_cast<std::size_t>(oc)] += s;
      }
    }
  }
  return dx;
}

void ConvTranspose2d::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

// ---- PReLU ----

PReLU::PReLU(const std::string& name, int channels, double init)
    : alpha(name + "/alpha", static_cast<std::size_t>(channels)) {
  std::fill(alpha.value.begin(), alpha.value.end(), init);
}

Tensor PReLU::forward(const Tensor& x) const {
  Tensor y = x;
  const std::size_t plane = x.plane();
  for (int in = 0; in < x.n; ++in)
    for (int c = 0; c < x.c; ++c) {
      double a = alpha.value[static_cast<std::size_t>(c)];
      double* row = y.item(in) + static_cast<std::size_t>(c) * plane;
      for (std::size_t p = 0; p < plane; ++p)
        if (row[p] < 0.0) row[p] *= a;
    }
  return y;
}

Tensor PReLU::backward(const Tensor& x, const Tensor& dy, bool want_wgrad) {
  Tensor dx(x.n, x.c, x.h, x.w);
  const std::size_t plane = x.plane();
  for (int in = 0; in < x.n; ++in)
    for (int c = 0; c < x.c; ++c) {
      double a = alpha.value[static_cast<std::size_t>(c)];
      const double* xr = x.item(in) + static_cast<std::size_t>(c) * plane;
      const double* dyr = dy.item(in) + static_cast<std::size_t>(c) * plane;
      double* dxr = dx.item(in) + static_cast<std::size_t>(c) * plane;
      double da = 0.0;
      for (std::size_t p = 0; p < plane; ++p) {
        if (xr[p] > 0.0) {
          dxr[p] = dyr[p];
        } else {
          dxr[p] = dyr[p] * a;
          da += dyr[p] * xr[p];
        }
      }
      if (want_wgrad) alpha.grad[static_cast<std::size_t>(c)] += da;
    }
  return dx;
}

void PReLU::collect(std::vector<Parameter*>& out) { out.push_back(&alpha); }

// ---- stateless activations ----

Tensor leaky_relu(const Tensor& x, double slope) {
  Tensor y = x;
  for (auto& v : y.data)
    if (v < 0.0) v *= slope;
  return y;
}

Tensor leaky_relu_backward(const Tensor& x, const Tensor& dy, double slope) {
  Tensor dx = dy;
  for (std::size_t i = 0; i < x.data.size(); ++i)
    if (x.data[i] <= 0.0) dx.data[i] *= slope;
  return dx;
}

Tensor sigmoid(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.data) v = 1.0 / (1.0 + std::exp(-v));
  return y;
}

Tensor sigmoid_backward(const Tensor& y, const Tensor& dy) {
  Tensor dx = dy;
  for (std::size_t i = 0; i < y.data.size(); ++i)
    dx.data[i] *= y.data[i] * (1.0 - y.data[i]);
  return dx;
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.data) v = std::max(0.0, v);
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy) {
  Tensor dx = dy;
  for (std::size_t i = 0; i < x.data.size(); ++i)
    if (x.data[i] <= 0.0) dx.data[i] = 0.0;
  return dx;
}

Tensor swish(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.data) v = v / (1.0 + std::exp(-v));
  return y;
}

Tensor swish_backward(const Tensor& x, const Tensor& dy) {
  Tensor dx = dy;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    double s = 1.0 / (1.0 + std::exp(-x.data[i]));
    dx.data[i] *= s + x.data[i] * s * (1.0 - s);
  }
  return dx;
}

Tensor tanh01(const Tensor& x) {
  Tensor y = x;
  for (auto& v : y.data) v = 0.5 * (std::tanh(v) + 1.0);
  return y;
}

Tensor tanh01_backward(const Tensor& x, const Tensor& dy) {
  Tensor dx = dy;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    double t = std::tanh(x.data[i]);
    dx.data[i] *= 0.5 * (1.0 - t * t);
  }
  return dx;
}

Tensor maxpool2(const Tensor& x) {
  if (x.h % 2 || x.w % 2) fail(ErrorCode::ShapeError, "maxpool2 needs even dims: " + x.shape_str());
  Tensor y(x.n, x.c, x.h / 2, x.w / 2);
  for (int in = 0; in < x.n; ++in)
    for (int c = 0; c < x.c; ++c)
      for (int oy = 0; oy < y.h; ++oy)
        for (int ox = 0; ox < y.w; ++ox) {
          double m = x.at(in, c, 2 * oy, 2 * ox);
          m = std::max(m, x.at(in, c, 2 * oy, 2 * ox + 1));
          m = std::max(m, x.at(in, c, 2 * oy + 1, 2 * ox));
          m = std::max(m, x.at(in, c, 2 * oy + 1, 2 * ox + 1));
          y.at(in, c, oy, ox) = m;
        }
  return y;
}

Tensor maxpool2_backward(const Tensor& x, const Tensor& dy) {
  Tensor dx(x.n, x.c, x.h, x.w);
  for (int in = 0; in < x.n; ++in)
    for (int c = 0; c < x.c; ++c)
      for (int oy = 0; oy < dy.h; ++oy)
        for (int ox = 0; ox < dy.w; ++ox) {
          int best_y = 2 * oy, best_x = 2 * ox;
          double m = x.at(in, c, best_y, best_x);
          for (int j = 0; j < 4; ++j) {
            int yy = 2 * oy + j / 2, xx = 2 * ox + j % 2;
            if (x.at(in, c, yy, xx) > m) {
              m = x.at(in, c, yy, xx);
              best_y = yy;
              best_x = xx;
            }
          }
          dx.at(in, c, best_y, best_x) += dy.at(in, c, oy, ox);
        }
  return dx;
}

}  // namespace penh
