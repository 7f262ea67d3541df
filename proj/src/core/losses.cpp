#include "core/losses.hpp"

#include <cmath>

#include "core/error.hpp"

namespace penh {

namespace {
constexpr double kLogFloor = 1e-8;
}

double l1_mean(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b))
    fail(ErrorCode::ShapeError,
         "loss inputs differ: " + a.shape_str() + " vs " + b.shape_str());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a.data[i] - b.data[i]);
  return acc / static_cast<double>(a.size());
}

Tensor l1_mean_backward(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b))
    fail(ErrorCode::ShapeError,
         "loss inputs differ: " + a.shape_str() + " vs " + b.shape_str());
  Tensor d(a.n, a.c, a.h, a.w);
  const double inv = 1.0 / static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a.data[i] - b.data[i];
    d.data[i] = diff > 0.0 ? inv : diff < 0.0 ? -inv : 0.0;
  }
  return d;
}

double total_variation(const Tensor& x) {
  double acc = 0.0;
  std::size_t pairs = 0;
  for (int in = 0; in < x.n; ++in)
    for (int c = 0; c < x.c; ++c) {
      for (int y = 0; y < x.h; ++y)
        for (int xx = 0; xx + 1 < x.w; ++xx) {
          acc += std::abs(x.at(in, c, y, xx + 1) - x.at(in, c, y, xx));
          ++pairs;
        }
      for (int y = 0; y + 1 < x.h; ++y)
        for (int xx = 0; xx < x.w; ++xx) {
          acc += std::abs(x.at(in, c, y + 1, xx) - x.at(in, c, y, xx));
          ++pairs;
        }
    }
  return pairs == 0 ? 0.0 : acc / static_cast<double>(pairs);
}

Tensor total_variation_backward(const Tensor& x) {
  Tensor d(x.n, x.c, x.h, x.w);
  std::size_t pairs = 0;
  for (int c = 0; c < x.c; ++c) {
    pairs += static_cast<std::size_t>(x.h) * (x.w - 1);
    pairs += static_cast<std::size_t>(x.w) * (x.h - 1);
  }
  pairs *= static_cast<std::size_t>(x.n);
  if (pairs == 0) return d;
  const double inv = 1.0 / static_cast<double>(pairs);
  auto sgn = [](double v) { return v > 0.0 ? 1.0 : v < 0.0 ? -1.0 : 0.0; };
  for (int in = 0; in < x.n; ++in)
    for (int c = 0; c < x.c; ++c) {
      for (int y = 0; y < x.h; ++y)
        for (int xx = 0; xx + 1 < x.w; ++xx) {
          double s = sgn(x.at(in, c, y, xx + 1) - x.at(in, c, y, xx)) * inv;
          d.at(in, c, y, xx + 1) += s;
          d.at(in, c, y, xx) -= s;
        }
      for (int y = 0; y + 1 < x.h; ++y)
        for (int xx = 0; xx < x.w; ++xx) {
          double s = sgn(x.at(in, c, y + 1, xx) - x.at(in, c, y, xx)) * inv;
          d.at(in, c, y + 1, xx) += s;
          d.at(in, c, y, xx) -= s;
        }
    }
  return d;
}

double feature_term(const Tensor& feat_out, const Tensor& feat_ref) {
  return l1_mean(feat_out, feat_ref);
}

double feature_loss(const Tensor& out, const Tensor& ref, FeatureExtractor& psi,
                    const LossWeights& w) {
  Tensor feat_out = psi.forward(out);
  Tensor feat_ref = psi.forward(ref);
  return w.lambda_R_feat * feature_term(feat_out, feat_ref) +
         w.lambda_TV * total_variation(out);
}

double adversarial_generator_loss(const Tensor& scores) {
  double acc = 0.0;
  for (double s : scores.data) acc += -std::log(s > kLogFloor ? s : kLogFloor);
  return acc / static_cast<double>(scores.size());
}

Tensor adversarial_generator_loss_backward(const Tensor& scores) {
  Tensor d(scores.n, scores.c, scores.h, scores.w);
  const double inv = 1.0 / static_cast<double>(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    d.data[i] = scores.data[i] > kLogFloor ? -inv / scores.data[i] : 0.0;
  return d;
}

double discriminator_loss(const Tensor& real, const Tensor& fake) {
  double acc_real = 0.0;
  for (double s : real.data) acc_real += -std::log(s > kLogFloor ? s : kLogFloor);
  double acc_fake = 0.0;
  for (double s : fake.data) {
    double v = 1.0 - s;
    acc_fake += -std::log(v > kLogFloor ? v : kLogFloor);
  }
  return acc_real / static_cast<double>(real.size()) +
         acc_fake / static_cast<double>(fake.size());
}

void discriminator_loss_backward(const Tensor& real, const Tensor& fake, Tensor& dreal,
                                 Tensor& dfake) {
  dreal = Tensor(real.n, real.c, real.h, real.w);
  dfake = Tensor(fake.n, fake.c, fake.h, fake.w);
  const double inv_r = 1.0 / static_cast<double>(real.size());
  const double inv_f = 1.0 / static_cast<double>(fake.size());
  for (std::size_t i = 0; i < real.size(); ++i)
    dreal.data[i] = real.data[i] > kLogFloor ? -inv_r / real.data[i] : 0.0;
  for (std::size_t i = 0; i < fake.size(); ++i) {
    double v = 1.0 - fake.data[i];
    dfake.data[i] = v > kLogFloor ? inv_f / v : 0.0;
  }
}

LossBreakdown perceptual_loss(const Tensor& out, const Tensor& ref, const Tensor& d_scores,
                              FeatureExtractor& psi, const LossWeights& w) {
  LossBreakdown b;
  b.l_r = reconstruction_loss(out, ref);
  b.l_rfl = feature_loss(out, ref, psi, w);
  b.l_g = adversarial_generator_loss(d_scores);
  b.l_p = combine(b.l_r, b.l_rfl, b.l_g, w);
  return b;
}

}  // namespace penh
