#pragma once

#include <vector>

#include "core/nn/tensor.hpp"

namespace penh {

class Adam {
 public:
  Adam(std::vector<Parameter*> params, double lr, double beta1, double beta2,
       double eps = 1e-8);

  void step();
  void zero_grad();

  // Optimizer state is checkpointed alongside the weights.
  int t = 0;
  std::vector<std::vector<double>> m, v;
  const std::vector<Parameter*>& params() const { return params_; }

 private:
  std::vector<Parameter*> params_;
  double lr_, beta1_, beta2_, eps_;
};

}  // namespace penh
