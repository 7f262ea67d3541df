#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace penh {

// NCHW, double precision. All training math runs in f64: the gradient
// checks pin a 1e-4 finite-difference step, which f32 cannot resolve.
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_),
        data(static_cast<std::size_t>(n_) * c_ * h_ * w_, 0.0) {}

  std::size_t size() const { return data.size(); }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }

  double* item(int in) { return data.data() + static_cast<std::size_t>(in) * c * plane(); }
  const double* item(int in) const {
    return data.data() + static_cast<std::size_t>(in) * c * plane();
  }

  double& at(int in, int ic, int iy, int ix) {
    return data[((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix];
  }
  double at(int in, int ic, int iy, int ix) const {
    return data[((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix];
  }

  bool same_shape(const Tensor& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }
  std::string shape_str() const {
    return std::to_string(n) + "x" + std::to_string(c) + "x" + std::to_string(h) + "x" +
           std::to_string(w);
  }
};

struct Parameter {
  std::string name;
  std::vector<double> value;
  std::vector<double> grad;

  explicit Parameter(std::string name_ = "", std::size_t count = 0)
      : name(std::move(name_)), value(count, 0.0), grad(count, 0.0) {}

  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

}  // namespace penh
