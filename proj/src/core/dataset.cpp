#include "core/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace penh {

namespace {

namespace fs = std::filesystem;

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool has_image_extension(const fs::path& p) {
  std::string ext = to_lower(p.extension().string());
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::string top_dir(const std::string& rel) {
  auto slash = rel.find('/');
  return slash == std::string::npos ? "" : rel.substr(0, slash);
}

}  // namespace

const char* category_name(Category c) {
  switch (c) {
    case Category::Radiology: return "radiology";
    case Category::Dermatology: return "dermatology";
    case Category::Microscopy: return "microscopy";
    case Category::Other: return "other";
  }
  return "other";
}

const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

Category category_from_name(const std::string& name) {
  std::string n = to_lower(name);
  if (n == "radiology") return Category::Radiology;
  if (n == "dermatology") return Category::Dermatology;
  if (n == "microscopy") return Category::Microscopy;
  if (n == "other") return Category::Other;
  fail(ErrorCode::FormatError, "unknown category: " + name);
}

namespace {

Split split_from_name(const std::string& name) {
  std::string n = to_lower(name);
  if (n == "train") return Split::Train;
  if (n == "val") return Split::Val;
  if (n == "test") return Split::Test;
  fail(ErrorCode::FormatError, "unknown split: " + name);
}

Category infer_category(const std::string& rel, const std::map<std::string, Category>& overrides) {
  auto exact = overrides.find(rel);
  if (exact != overrides.end()) return exact->second;
  std::string dir = top_dir(rel);
  if (!dir.empty()) {
    auto by_dir = overrides.find(dir);
    if (by_dir != overrides.end()) return by_dir->second;
    std::string lowered = to_lower(dir);
    if (lowered == "radiology") return Category::Radiology;
    if (lowered == "dermatology") return Category::Dermatology;
    if (lowered == "microscopy") return Category::Microscopy;
  }
  return Category::Other;
}

}  // namespace

PairManifest build_manifest(const std::string& degraded_dir, const std::string& reference_dir,
                            const std::string& category_map_path) {
  fs::path deg(degraded_dir), ref(reference_dir);
  if (!fs::is_directory(deg)) fail(ErrorCode::NotFound, "not a directory: " + degraded_dir);
  if (!fs::is_directory(ref)) fail(ErrorCode::NotFound, "not a directory: " + reference_dir);

  std::map<std::string, Category> overrides;
  if (!category_map_path.empty()) {
    std::ifstream in(category_map_path);
    if (!in) fail(ErrorCode::NotFound, "category map not found: " + category_map_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::FormatError, "bad category map: " + std::string(e.what()));
    }
    for (auto it = j.begin(); it != j.end(); ++it)
      overrides[it.key()] = category_from_name(it.value().get<std::string>());
  }

  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(deg))
    if (entry.is_regular_file() && has_image_extension(entry.path()))
      files.push_back(fs::relative(entry.path(), deg).generic_string());
  if (files.empty()) fail(ErrorCode::EmptyCorpus, "no degraded images under " + degraded_dir);
  std::sort(files.begin(), files.end());

  PairManifest manifest;
  for (const auto& rel : files) {
    fs::path ref_path = ref / rel;
    if (!fs::exists(ref_path))
      fail(ErrorCode::PairingError, "no reference for degraded image: " + rel);
    ManifestEntry entry;
    entry.degraded_path = (deg / rel).generic_string();
    entry.reference_path = ref_path.generic_string();
    entry.category = infer_category(rel, overrides);
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

PairManifest split_manifest(const PairManifest& manifest, double train_frac, double val_frac,
                            uint64_t seed) {
  if (train_frac < 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0)
    fail(ErrorCode::ConfigError, "split fractions must be >= 0 and sum to <= 1");

  std::size_t n = manifest.entries.size();
  std::vector<std::size_t> order(n);
  std::vector<uint64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = i;
    keys[i] = mix_seed(seed, fnv1a64(manifest.entries[i].degraded_path));
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return manifest.entries[a].degraded_path < manifest.entries[b].degraded_path;
  });

  auto n_train = static_cast<std::size_t>(train_frac * static_cast<double>(n));
  auto n_val = static_cast<std::size_t>(val_frac * static_cast<double>(n));

  PairManifest out = manifest;
  out.seed = seed;
  for (std::size_t rank = 0; rank < n; ++rank) {
    Split s = rank < n_train ? Split::Train : rank < n_train + n_val ? Split::Val : Split::Test;
    out.entries[order[rank]].split = s;
  }
  return out;
}

void save_manifest(const PairManifest& manifest, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write manifest: " + path);
  nlohmann::ordered_json header{{"format", "penh-manifest"}, {"version", 1}, {"seed", manifest.seed}};
  out << header.dump() << "\n";
  for (const auto& e : manifest.entries) {
    nlohmann::ordered_json line{
        {"degraded", e.degraded_path},
        {"reference", e.reference_path},
        {"category", category_name(e.category)},
        {"split", split_name(e.split)},
    };
    out << line.dump() << "\n";
  }
}

PairManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::NotFound, "manifest not found: " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::FormatError, "empty manifest: " + path);

  PairManifest manifest;
  try {
    auto header = nlohmann::json::parse(line);
    if (header.value("format", "") != "penh-manifest")
      fail(ErrorCode::FormatError, "not a manifest file: " + path);
    manifest.seed = header.value("seed", 0ull);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.degraded_path = j.at("degraded").get<std::string>();
      e.reference_path = j.at("reference").get<std::string>();
      e.category = category_from_name(j.at("category").get<std::string>());
      e.split = split_from_name(j.at("split").get<std::string>());
      manifest.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, "bad manifest line: " + std::string(e.what()));
  }

  for (const auto& e : manifest.entries) {
    if (!fs::exists(e.degraded_path))
      fail(ErrorCode::NotFound, "manifest references missing file: " + e.degraded_path);
    if (!fs::exists(e.reference_path))
      fail(ErrorCode::NotFound, "manifest references missing file: " + e.reference_path);
  }
  return manifest;
}

PairBatch load_training_batch(const PairManifest& manifest, const std::vector<int>& indices,
                              int side) {
  if (side < 1) fail(ErrorCode::ConfigError, "batch side must be positive");
  PairBatch batch;
  for (int idx : indices) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= manifest.entries.size())
      fail(ErrorCode::InvalidArgument, "batch index out of range");
    const auto& e = manifest.entries[static_cast<std::size_t>(idx)];
    batch.degraded.push_back(resize_bilinear(load_image(e.degraded_path), side, side));
    batch.reference.push_back(resize_bilinear(load_image(e.reference_path), side, side));
  }
  return batch;
}

std::vector<int> split_indices(const PairManifest& manifest, Split split) {
  std::vector<int> out;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i)
    if (manifest.entries[i].split == split) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace penh
