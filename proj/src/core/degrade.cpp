#include "core/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "core/colorspace.hpp"
#include "core/error.hpp"

namespace penh {

namespace {

namespace fs = std::filesystem;

float clamp01(double v) { return static_cast<float>(std::min(1.0, std::max(0.0, v))); }

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

double mean_luminance(const ImageTensor& img) {
  LabTensor lab = rgb_to_lab(img, LabScale::EightBit);
  double sum = 0.0;
  long count = 0;
  for (double l : lab.l) {
    if (l > 0.0) {
      sum += l;
      ++count;
    }
  }
  return count ? sum / count : 0.0;
}

DegradeRecord sample_params(const DegradeConfig& config, Rng& rng) {
  DegradeRecord rec;
  double sigma =
      config.mode == DegradeMode::NoiseOnly ? config.noise_only_sigma_max : config.sigma_max;
  rec.r_n = rng.uniform(0.0, sigma);
  if (config.mode == DegradeMode::Full) {
    rec.r_c = rng.uniform(0.0, config.r_max);
    rec.r_b = rng.uniform(0.0, config.r_max);
  }
  return rec;
}

DegradeResult degrade(const ImageTensor& img, const DegradeConfig& config, Rng& rng) {
  validate_image(img, "degrade");
  DegradeResult res;
  double mean_l = mean_luminance(img);
  if (!(mean_l > config.brightness_threshold)) {
    res.record.mean_luminance = mean_l;
    return res;
  }

  res.record = sample_params(config, rng);
  res.record.accepted = true;
  res.record.mean_luminance = mean_l;

  ImageTensor out = img;
  double noise_std = res.record.r_n / 255.0;
  for (auto& v : out.data) v = clamp01(v + rng.normal(0.0, noise_std));

  if (config.mode == DegradeMode::Full) {
    double sum = 0.0;
    for (float v : out.data) sum += v;
    double mu = sum / static_cast<double>(out.data.size());
    double keep = 1.0 - res.record.r_c;
    for (auto& v : out.data) v = clamp01(mu + keep * (v - mu));
    double dim = 1.0 - res.record.r_b;
    for (auto& v : out.data) v = clamp01(dim * v);
  }

  res.image = std::move(out);
  return res;
}

CorpusSummary degrade_corpus(const std::string& src_dir, const std::string& out_dir,
                             const DegradeConfig& config) {
  fs::path src(src_dir);
  if (!fs::is_directory(src)) fail(ErrorCode::NotFound, "not a directory: " + src_dir);

  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(src))
    if (entry.is_regular_file() && has_image_extension(entry.path()))
      files.push_back(fs::relative(entry.path(), src).generic_string());
  if (files.empty()) fail(ErrorCode::EmptyCorpus, "empty corpus: no images under " + src_dir);
  std::sort(files.begin(), files.end());

  fs::path out(out_dir);
  fs::create_directories(out);
  std::ofstream sidecar(out / "degrade_records.jsonl");
  if (!sidecar) fail(ErrorCode::IoError, "cannot write sidecar under " + out_dir);

  CorpusSummary summary;
  for (const auto& rel : files) {
    uint64_t seed = mix_seed(config.seed, fnv1a64(rel));
    Rng rng(seed);
    ImageTensor img = load_image((src / rel).string());
    DegradeResult res = degrade(img, config, rng);
    if (res.image) {
      fs::path dst = out / rel;
      fs::create_directories(dst.parent_path());
      save_image(*res.image, dst.string());
      ++summary.accepted;
    } else {
      ++summary.skipped;
    }
    nlohmann::ordered_json line{
        {"file", rel},
        {"accepted", res.record.accepted},
        {"mean_L", res.record.mean_luminance},
        {"r_n", res.record.r_n},
        {"r_c", res.record.r_c},
        {"r_b", res.record.r_b},
        {"seed", seed},
    };
    sidecar << line.dump() << "\n";
  }
  return summary;
}

}  // namespace penh
