#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/nn/layers.hpp"
#include "core/nn/tensor.hpp"

namespace penh {

struct GeneratorConfig {
  std::vector<int> schedule{64, 96, 128, 196};
  bool use_residual_blocks = true;
  bool use_gates = true;
};

// conv3x3 -> PReLU -> conv3x3, plus the input when residual (plain double
// conv otherwise, the ablation form).
class ResBlock {
 public:
  ResBlock(const std::string& name, int channels, bool residual);

  struct Cache {
    Tensor a;  // conv1 output
    Tensor p;  // PReLU output
  };

  Tensor forward(const Tensor& x, Cache* cache) const;
  Tensor backward(const Tensor& x, const Cache& cache, const Tensor& dy, bool want_wgrad);
  void collect(std::vector<Parameter*>& out);
  void init(Rng& rng);

  Conv2d conv1, conv2;
  PReLU act;
  bool residual;
};

// O = LeakyReLU(W_a x) ⊙ sigmoid(W_b x), both 1×1 channel-preserving.
class Gate {
 public:
  Gate(const std::string& name, int channels);

  struct Cache {
    Tensor a;  // W_a x
    Tensor b;  // W_b x
  };

  Tensor forward(const Tensor& x, Cache* cache) const;
  Tensor backward(const Tensor& x, const Cache& cache, const Tensor& dy, bool want_wgrad);
  void collect(std::vector<Parameter*>& out);
  void init(Rng& rng);

  static constexpr double kSlope = 0.2;

  Conv2d wa, wb;
};

// Fully convolutional gated residual encoder-decoder. Input and output are
// N×3×H×W with H, W divisible by 2^levels; output range (0,1) via
// (tanh+1)/2.
class Generator {
 public:
  Generator(const GeneratorConfig& cfg, uint64_t init_seed);

  struct Cache {
    Tensor input;
    Tensor in_conv_out;
    std::vector<ResBlock::Cache> enc_rb;
    std::vector<Tensor> enc_rb_out;  // skip features
    std::vector<Tensor> down_out;    // [levels-1] is the bottleneck
    std::vector<Tensor> up_out;
    std::vector<Gate::Cache> gate_cache;
    std::vector<Tensor> fused;
    std::vector<ResBlock::Cache> dec_rb;
    std::vector<Tensor> dec_rb_out;
    Tensor pre_tanh;
  };

  // cache == nullptr runs inference-style (nothing retained).
  Tensor forward(const Tensor& x, Cache* cache = nullptr) const;
  // Seeds from d(output); accumulates parameter grads, returns d(input).
  Tensor backward(const Cache& cache, const Tensor& dy, bool want_wgrad = true);

  std::vector<Parameter*> parameters();
  std::size_t param_count() const;
  const GeneratorConfig& config() const { return cfg_; }
  int divisor() const { return 1 << static_cast<int>(cfg_.schedule.size()); }

 private:
  GeneratorConfig cfg_;
  Conv2d in_conv_;
  std::vector<ResBlock> enc_blocks_;
  std::vector<Conv2d> downs_;
  std::vector<ConvTranspose2d> ups_;
  std::vector<Gate> gates_;
  std::vector<ResBlock> dec_blocks_;
  Conv2d out_conv_;
};

}  // namespace penh
