#include "core/nn/adam.hpp"

#include <cmath>

namespace penh {

Adam::Adam(std::vector<Parameter*> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  m.reserve(params_.size());
  v.reserve(params_.size());
  for (const Parameter* p : params_) {
    m.emplace_back(p->value.size(), 0.0);
    v.emplace_back(p->value.size(), 0.0);
  }
}

void Adam::step() {
  ++t;
  double bc1 = 1.0 - std::pow(beta1_, t);
  double bc2 = 1.0 - std::pow(beta2_, t);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      double g = p.grad[j];
      m[i][j] = beta1_ * m[i][j] + (1.0 - beta1_) * g;
      v[i][j] = beta2_ * v[i][j] + (1.0 - beta2_) * g * g;
      p.value[j] -= lr_ * (m[i][j] / bc1) / (std::sqrt(v[i][j] / bc2) + eps_);
    }
  }
}

void Adam::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

}  // namespace penh
