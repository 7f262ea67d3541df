#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/generator.hpp"
#include "core/image.hpp"
#include "core/metrics.hpp"

namespace penh {

struct CategoryMetrics {
  int count = 0;     // images scored
  int psnr_inf = 0;  // identical pairs, excluded from psnr_mean
  double psnr_mean = 0.0;  // dB over the finite samples; +inf when there are none
  double delta_e_mean = 0.0;
};

// Table layout: one row per category present plus an unweighted average of
// the category means.
struct MetricReport {
  std::map<Category, CategoryMetrics> per_category;
  double psnr_average = 0.0;
  double delta_e_average = 0.0;
};

using EnhanceFn = std::function<ImageTensor(const ImageTensor&)>;

// Scores fn over the manifest's test split at native resolution against the
// paired references.
MetricReport evaluate_manifest(const PairManifest& manifest, const EnhanceFn& fn,
                               DeltaEVariant variant = DeltaEVariant::Ciede2000);

std::string report_json(const MetricReport& r);  // +inf PSNR serialized as "inf"
void write_report_json(const MetricReport& r, const std::string& path);
void write_report_csv(const MetricReport& r, const std::string& path);
std::string format_report_table(const MetricReport& r);

struct BenchRow {
  int resolution = 0;
  std::string device;
  double seconds_mean = 0.0;
  double seconds_std = 0.0;
  int runs = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

// Times batch-1 forwards at each square resolution, one untimed warm-up
// first. runs must be >= 3 so the sample std means something.
BenchReport bench_inference(const Generator& gen, const std::vector<int>& resolutions, int runs,
                            const std::string& device_label);

void write_bench_csv(const BenchReport& r, const std::string& path);
std::string format_bench_table(const BenchReport& r);

}  // namespace penh
