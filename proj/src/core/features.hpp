#pragma once

#include <string>
#include <vector>

#include "core/nn/layers.hpp"
#include "core/nn/tensor.hpp"

namespace penh {

// Frozen deep feature network ψ: the VGG-19 convolutional prefix up to the
// fourth block's first convolution, tapped before its activation. Inputs are
// RGB in [0,1], normalized channelwise before the first layer. H and W must
// be divisible by 8 (three pools).
//
// Weight spec: "random:<seed>" draws fixed He weights from that seed (the
// default — self-contained and deterministic), "random-smooth:<seed>" draws
// a locally smooth variant (scaled-down weights, positive biases) whose
// units sit away from their ReLU kinks — useful when the loss stack is
// validated with finite differences — or a path to a weight archive written
// by save_weights. Pretrained archives are not bundled; pointing at a
// missing file raises DependencyError with the remediation choices.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const std::string& weight_spec = kDefaultWeights);

  struct Cache {
    Tensor x_norm;
    std::vector<Tensor> pre;  // conv outputs before their activation
  };

  Tensor forward(const Tensor& x, Cache* cache = nullptr) const;
  // Relays d(features) back to d(input); ψ is frozen so no weight grads.
  Tensor backward_data(const Cache& cache, const Tensor& dfeat);

  void save_weights(const std::string& path) const;
  std::size_t param_count() const;
  const std::string& weight_spec() const { return spec_; }

  static constexpr const char* kDefaultWeights = "random:2261";

 private:
  std::string spec_;
  std::vector<Conv2d> convs_;
  std::vector<bool> pool_after_;
};

}  // namespace penh
