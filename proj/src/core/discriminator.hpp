#pragma once

#include <cstdint>
#include <vector>

#include "core/nn/layers.hpp"
#include "core/nn/tensor.hpp"

namespace penh {

struct DiscriminatorConfig {
  int base_channels = 32;
};

// Conditional patch critic. Scores the candidate image against the reference
// it should reproduce: the two are stacked into a 6-channel input and pushed
// through nine convolutions — eight 3×3 swish layers whose odd members halve
// the grid and double the width, then a 1×1 sigmoid head. A H×W input yields
// a (H/16)×(W/16) map of per-patch realism scores in (0,1).
class Discriminator {
 public:
  Discriminator(const DiscriminatorConfig& cfg, uint64_t init_seed);

  struct Cache {
    Tensor x;                // concatenated input
    std::vector<Tensor> pre;  // conv outputs before each activation
    Tensor score;
  };

  Tensor forward(const Tensor& candidate, const Tensor& reference, Cache* cache = nullptr) const;
  // Seeds from d(score map); returns d(candidate). Reference gradients are
  // computed internally but never needed, so they are dropped.
  Tensor backward(const Cache& cache, const Tensor& dscore, bool want_wgrad = true);

  std::vector<Parameter*> parameters();
  std::size_t param_count() const;

 private:
  std::vector<Conv2d> convs_;
};

}  // namespace penh
