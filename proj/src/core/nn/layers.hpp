#pragma once

#include <string>
#include <vector>

#include "core/nn/tensor.hpp"
#include "core/rng.hpp"

namespace penh {

namespace nn_detail {
extern std::size_t strip_budget_bytes;
}

// Layers hold parameters only; activations are cached by the caller (the
// model passes the stage input back into backward). backward returns dx and
// accumulates into parameter .grad unless want_wgrad is false — useful when
// a frozen network only relays gradients.

class Conv2d {
 public:
  Conv2d(const std::string& name, int in_ch, int out_ch, int kernel, int stride, int pad);

  void init_he(Rng& rng);
  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const Tensor& dy, bool want_wgrad = true);
  void collect(std::vector<Parameter*>& out);
  std::size_t param_count() const { return weight.value.size() + bias.value.size(); }
  int out_dim(int in) const { return (in + 2 * pad - k) / stride + 1; }

  Parameter weight;  // [out][in][k][k]
  Parameter bias;    // [out]
  int in_ch, out_ch, k, stride, pad;
};

class ConvTranspose2d {
 public:
  ConvTranspose2d(const std::string& name, int in_ch, int out_ch, int kernel, int stride,
                  int pad, int output_pad);

  void init_he(Rng& rng);
  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const Tensor& dy, bool want_wgrad = true);
  void collect(std::vector<Parameter*>& out);
  std::size_t param_count() const { return weight.value.size() + bias.value.size(); }
  int out_dim(int in) const { return (in - 1) * stride - 2 * pad + k + output_pad; }

  Parameter weight;  // [in][out][k][k]
  Parameter bias;    // [out]
  int in_ch, out_ch, k, stride, pad, output_pad;
};

class PReLU {
 public:
  PReLU(const std::string& name, int channels, double init = 0.25);

  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& x, const Tensor& dy, bool want_wgrad = true);
  void collect(std::vector<Parameter*>& out);
  std::size_t param_count() const { return alpha.value.size(); }

  Parameter alpha;  // per channel
};

Tensor leaky_relu(const Tensor& x, double slope);
Tensor leaky_relu_backward(const Tensor& x, const Tensor& dy, double slope);
Tensor sigmoid(const Tensor& x);
Tensor sigmoid_backward(const Tensor& y, const Tensor& dy);  // takes forward output
Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& x, const Tensor& dy);
Tensor swish(const Tensor& x);
Tensor swish_backward(const Tensor& x, const Tensor& dy);
Tensor tanh01(const Tensor& x);  // (tanh(x)+1)/2, range (0,1)
Tensor tanh01_backward(const Tensor& x, const Tensor& dy);
Tensor maxpool2(const Tensor& x);
Tensor maxpool2_backward(const Tensor& x, const Tensor& dy);

}  // namespace penh
