#include "core/discriminator.hpp"

#include <cstring>
#include <string>
#include <utility>

#include "core/error.hpp"

namespace penh {

Discriminator::Discriminator(const DiscriminatorConfig& cfg, uint64_t init_seed) {
  if (cfg.base_channels < 1)
    fail(ErrorCode::ConfigError, "discriminator base_channels must be positive");
  int ch = cfg.base_channels;
  int in = 6;
  for (int layer = 0; layer < 8; ++layer) {
    bool strided = layer % 2 == 0;
    convs_.emplace_back("d/conv" + std::to_string(layer + 1), in, ch, 3, strided ? 2 : 1, 1);
    in = ch;
    if (!strided) ch *= 2;
  }
  convs_.emplace_back("d/conv9", in, 1, 1, 1, 0);

  Rng rng(init_seed);
  for (auto& c : convs_) c.init_he(rng);
}

Tensor Discriminator::forward(const Tensor& candidate, const Tensor& reference,
                              Cache* cache) const {
  if (!candidate.same_shape(reference))
    fail(ErrorCode::ShapeError, "discriminator inputs differ: " + candidate.shape_str() +
                                    " vs " + reference.shape_str());
  if (candidate.c != 3)
    fail(ErrorCode::ShapeError,
         "discriminator expects 3-channel images, got " + candidate.shape_str());
  if (candidate.h < 16 || candidate.w < 16 || candidate.h % 16 != 0 || candidate.w % 16 != 0)
    fail(ErrorCode::ShapeError, "discriminator input " + std::to_string(candidate.h) + "x" +
                                    std::to_string(candidate.w) +
                                    " must be a multiple of 16");

  Tensor x(candidate.n, 6, candidate.h, candidate.w);
  const std::size_t half = candidate.plane() * 3;
  for (int in = 0; in < candidate.n; ++in) {
    std::memcpy(x.item(in), candidate.item(in), half * sizeof(double));
    std::memcpy(x.item(in) + half, reference.item(in), half * sizeof(double));
  }

  if (cache) {
    cache->x = x;
    cache->pre.resize(convs_.size());
  }

  Tensor cur = std::move(x);
  for (std::size_t layer = 0; layer + 1 < convs_.size(); ++layer) {
    Tensor pre = convs_[layer].forward(cur);
    cur = swish(pre);
    if (cache) cache->pre[layer] = std::move(pre);
  }
  Tensor pre = convs_.back().forward(cur);
  Tensor score = sigmoid(pre);
  if (cache) {
    cache->pre.back() = std::move(pre);
    cache->score = score;
  }
  return score;
}

Tensor Discriminator::backward(const Cache& cache, const Tensor& dscore, bool want_wgrad) {
  Tensor dcur = sigmoid_backward(cache.score, dscore);
  for (std::size_t layer = convs_.size(); layer-- > 0;) {
    if (layer == 0) {
      dcur = convs_[0].backward(cache.x, dcur, want_wgrad);
    } else {
      Tensor input = swish(cache.pre[layer - 1]);  // recomputed, cheaper than caching
      dcur = convs_[layer].backward(input, dcur, want_wgrad);
      dcur = swish_backward(cache.pre[layer - 1], dcur);
    }
  }

  Tensor dcand(dcur.n, 3, dcur.h, dcur.w);
  const std::size_t half = dcand.plane() * 3;
  for (int in = 0; in < dcur.n; ++in)
    std::memcpy(dcand.item(in), dcur.item(in), half * sizeof(double));
  return dcand;
}

std::vector<Parameter*> Discriminator::parameters() {
  std::vector<Parameter*> out;
  for (auto& c : convs_) c.collect(out);
  return out;
}

std::size_t Discriminator::param_count() const {
  std::size_t total = 0;
  for (const auto& c : convs_) total += c.param_count();
  return total;
}

}  // namespace penh
