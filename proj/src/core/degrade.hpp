#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "core/image.hpp"
#include "core/rng.hpp"

namespace penh {

enum class DegradeMode { Full, NoiseOnly };

struct DegradeConfig {
  double brightness_threshold = 100.0;  // eight_bit L units
  double r_max = 0.8;
  double sigma_max = 10.0;  // noise std in 8-bit pixel units
  DegradeMode mode = DegradeMode::Full;
  double noise_only_sigma_max = 50.0;
  uint64_t seed = 0;
};

struct DegradeRecord {
  bool accepted = false;
  double mean_luminance = 0.0;
  double r_n = 0.0;
  double r_c = 0.0;
  double r_b = 0.0;
};

struct DegradeResult {
  std::optional<ImageTensor> image;  // empty when the luminance gate skips
  DegradeRecord record;
};

struct CorpusSummary {
  int accepted = 0;
  int skipped = 0;
};

// Mean eight_bit L over pixels with strictly positive L; 0 when none qualify.
double mean_luminance(const ImageTensor& img);

// Draws r_n, then (full mode only) r_c and r_b, in that order. The draw
// order is a compatibility contract: reimplementations that consume the
// same stream must sample identically before touching pixels.
DegradeRecord sample_params(const DegradeConfig& config, Rng& rng);

// Luminance-gated degradation: additive Gaussian noise (std r_n/255),
// contrast blend toward the image mean, multiplicative dimming. Values are
// clamped to [0,1] after each stage. Skips (no draws) unless
// mean_luminance > brightness_threshold.
DegradeResult degrade(const ImageTensor& img, const DegradeConfig& config, Rng& rng);

// Degrades every image under src_dir (recursively; .png/.jpg/.jpeg), writing
// accepted outputs under out_dir with the same relative paths plus a
// degrade_records.jsonl sidecar. Each image gets its own rng seeded from
// (config.seed, path hash), so results do not depend on processing order.
CorpusSummary degrade_corpus(const std::string& src_dir, const std::string& out_dir,
                             const DegradeConfig& config);

}  // namespace penh
