#include "core/features.hpp"

#include <cstdint>
#include <cstring>
#include <cstdio>
#include <filesystem>
#include <memory>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace penh {

namespace {

constexpr double kMean[3] = {0.485, 0.456, 0.406};
constexpr double kStd[3] = {0.229, 0.224, 0.225};
constexpr char kArchiveMagic[8] = {'P', 'E', 'N', 'H', 'V', 'G', 'G', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

FeatureExtractor::FeatureExtractor(const std::string& weight_spec) : spec_(weight_spec) {
  // VGG-19 prefix: 64,64 | 128,128 | 256,256,256,256 | 512 with pools
  // between blocks. The last conv is the tap.
  const int widths[9] = {64, 64, 128, 128, 256, 256, 256, 256, 512};
  const bool pools[9] = {false, true, false, true, false, false, false, true, false};
  int in = 3;
  for (int i = 0; i < 9; ++i) {
    convs_.emplace_back("psi/conv" + std::to_string(i), in, widths[i], 3, 1, 1);
    pool_after_.push_back(pools[i]);
    in = widths[i];
  }

  if (spec_.rfind("random:", 0) == 0) {
    uint64_t seed = 0;
    try {
      seed = std::stoull(spec_.substr(7));
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigError, "bad feature weight spec '" + spec_ +
                                       "': expected random:<seed> or an archive path");
    }
    Rng rng(seed);
    for (auto& c : convs_) c.init_he(rng);
    return;
  }

  if (spec_.rfind("random-smooth:", 0) == 0) {
    uint64_t seed = 0;
    try {
      seed = std::stoull(spec_.substr(14));
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigError, "bad feature weight spec '" + spec_ +
                                       "': expected random-smooth:<seed>");
    }
    Rng rng(seed);
    for (auto& c : convs_) {
      c.init_he(rng);
      // Small weights plus positive biases keep pre-activations away from
      // the ReLU kink, so the extractor is locally smooth around typical
      // inputs. Used for finite-difference validation of the loss stack.
      for (auto& v : c.weight.value) v *= 0.25;
      for (auto& v : c.bias.value) v = rng.uniform(0.75, 1.25);
    }
    return;
  }

  if (!std::filesystem::exists(spec_))
    fail(ErrorCode::DependencyError,
         "feature extractor weights not found at '" + spec_ +
             "'; supply an archive saved by this tool or use random:<seed> "
             "for self-contained frozen features");
  FilePtr f(std::fopen(spec_.c_str(), "rb"));
  if (!f) fail(ErrorCode::IoError, "cannot open feature weights '" + spec_ + "'");
  char magic[8];
  if (std::fread(magic, 1, 8, f.get()) != 8 ||
      std::memcmp(magic, kArchiveMagic, 8) != 0)
    fail(ErrorCode::FormatError, "'" + spec_ + "' is not a feature weight archive");
  for (auto& c : convs_) {
    uint32_t dims[2];
    if (std::fread(dims, sizeof(uint32_t), 2, f.get()) != 2 ||
        dims[0] != static_cast<uint32_t>(c.out_ch) ||
        dims[1] != static_cast<uint32_t>(c.in_ch))
      fail(ErrorCode::FormatError, "feature archive '" + spec_ + "' layer shape mismatch");
    if (std::fread(c.weight.value.data(), sizeof(double), c.weight.value.size(), f.get()) !=
            c.weight.value.size() ||
        std::fread(c.bias.value.data(), sizeof(double), c.bias.value.size(), f.get()) !=
            c.bias.value.size())
      fail(ErrorCode::FormatError, "feature archive '" + spec_ + "' truncated");
  }
}

Tensor FeatureExtractor::forward(const Tensor& x, Cache* cache) const {
  if (x.c != 3)
    fail(ErrorCode::ShapeError, "feature extractor expects 3 channels, got " + x.shape_str());
  if (x.h % 8 != 0 || x.w % 8 != 0 || x.h < 8 || x.w < 8)
    fail(ErrorCode::ShapeError, "feature extractor input " + std::to_string(x.h) + "x" +
                                    std::to_string(x.w) + " must be a multiple of 8");

  Tensor cur(x.n, 3, x.h, x.w);
  const std::size_t plane = x.plane();
  for (int in = 0; in < x.n; ++in)
    for (int c = 0; c < 3; ++c) {
      const double* src = x.item(in) + c * plane;
      double* dst = cur.item(in) + c * plane;
      for (std::size_t p = 0; p < plane; ++p) dst[p] = (src[p] - kMean[c]) / kStd[c];
    }
  if (cache) {
    cache->x_norm = cur;
    cache->pre.resize(convs_.size());
  }

  for (std::size_t i = 0; i < convs_.size(); ++i) {
    Tensor pre = convs_[i].forward(cur);
    if (i + 1 == convs_.size()) {
      if (cache) cache->pre[i] = pre;
      return pre;  // pre-activation tap
    }
    cur = relu(pre);
    if (pool_after_[i]) cur = maxpool2(cur);
    if (cache) cache->pre[i] = std::move(pre);
  }
  fail(ErrorCode::Internal, "unreachable");
}

Tensor FeatureExtractor::backward_data(const Cache& cache, const Tensor& dfeat) {
  Tensor d = dfeat;
  for (std::size_t i = convs_.size(); i-- > 0;) {
    // rebuild this conv's input from the cached pre-activations
    if (i == 0) {
      d = convs_[0].backward(cache.x_norm, d, false);
    } else {
      Tensor input = relu(cache.pre[i - 1]);
      if (pool_after_[i - 1]) input = maxpool2(input);
      d = convs_[i].backward(input, d, false);
      if (pool_after_[i - 1]) d = maxpool2_backward(relu(cache.pre[i - 1]), d);
      d = relu_backward(cache.pre[i - 1], d);
    }
  }

  const std::size_t plane = d.plane();
  for (int in = 0; in < d.n; ++in)
    for (int c = 0; c < 3; ++c) {
      double* p = d.item(in) + c * plane;
      for (std::size_t j = 0; j < plane; ++j) p[j] /= kStd[c];
    }
  return d;
}

void FeatureExtractor::save_weights(const std::string& path) const {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) fail(ErrorCode::IoError, "cannot write feature weights '" + path + "'");
  bool ok = std::fwrite(kArchiveMagic, 1, 8, f.get()) == 8;
  for (const auto& c : convs_) {
    uint32_t dims[2] = {static_cast<uint32_t>(c.out_ch), static_cast<uint32_t>(c.in_ch)};
    ok = ok && std::fwrite(dims, sizeof(uint32_t), 2, f.get()) == 2;
    ok = ok && std::fwrite(c.weight.value.data(), sizeof(double), c.weight.value.size(),
                           f.get()) == c.weight.value.size();
    ok = ok &&
         std::fwrite(c.bias.value.data(), sizeof(double), c.bias.value.size(), f.get()) ==
             c.bias.value.size();
  }
  if (!ok) fail(ErrorCode::IoError, "short write on feature weights '" + path + "'");
}

std::size_t FeatureExtractor::param_count() const {
  std::size_t total = 0;
  for (const auto& c : convs_) total += c.param_count();
  return total;
}

}  // namespace penh
