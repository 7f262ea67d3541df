#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/image.hpp"

namespace penh {

enum class Category { Radiology, Dermatology, Microscopy, Other };
enum class Split { Train, Val, Test };

const char* category_name(Category c);
const char* split_name(Split s);
Category category_from_name(const std::string& name);

struct ManifestEntry {
  std::string degraded_path;
  std::string reference_path;
  Category category = Category::Other;
  Split split = Split::Train;
};

struct PairManifest {
  std::vector<ManifestEntry> entries;
  uint64_t seed = 0;
};

// Pairs files by identical relative path. Category comes from the top-level
// directory name (radiology/dermatology/microscopy, case-insensitive), with
// an optional JSON mapping file {path-or-top-dir: category} taking
// precedence. Reference files without a degraded counterpart are ignored
// (the luminance gate legitimately drops sources); the reverse is an error.
PairManifest build_manifest(const std::string& degraded_dir, const std::string& reference_dir,
                            const std::string& category_map_path = "");

// Deterministic split: entries ordered by a per-key hash of (seed, degraded
// path), then partitioned by exact counts floor(n·train), floor(n·val),
// remainder test. Independent of input order.
PairManifest split_manifest(const PairManifest& manifest, double train_frac, double val_frac,
                            uint64_t seed);

void save_manifest(const PairManifest& manifest, const std::string& path);
PairManifest load_manifest(const std::string& path);

struct PairBatch {
  std::vector<ImageTensor> degraded;
  std::vector<ImageTensor> reference;
};

// Loads the given entries and resizes both sides of each pair to side×side.
PairBatch load_training_batch(const PairManifest& manifest, const std::vector<int>& indices,
                              int side = 128);

std::vector<int> split_indices(const PairManifest& manifest, Split split);

}  // namespace penh
