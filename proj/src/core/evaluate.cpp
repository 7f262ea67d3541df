#include "core/evaluate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "nlohmann/json.hpp"

namespace penh {

namespace {

std::string fmt_metric(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

nlohmann::json json_metric(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) fail(ErrorCode::IoError, "cannot write '" + path + "'");
}

}  // namespace

MetricReport evaluate_manifest(const PairManifest& manifest, const EnhanceFn& fn,
                               DeltaEVariant variant) {
  std::vector<int> test = split_indices(manifest, Split::Test);
  if (test.empty()) fail(ErrorCode::EmptyCorpus, "manifest has no test entries");

  struct Accum {
    int count = 0, finite = 0, inf = 0;
    double psnr_sum = 0.0, de_sum = 0.0;
  };
  std::map<Category, Accum> acc;
  for (int i : test) {
    const ManifestEntry& e = manifest.entries[i];
    ImageTensor degraded = load_image(e.degraded_path);
    ImageTensor reference = load_image(e.reference_path);
    ImageTensor enhanced = fn(degraded);
    double p = psnr(reference, enhanced);
    double de = delta_e(reference, enhanced, variant);
    Accum& a = acc[e.category];
    ++a.count;
    a.de_sum += de;
    if (std::isfinite(p)) {
      ++a.finite;
      a.psnr_sum += p;
    } else {
      ++a.inf;
    }
  }

  MetricReport r;
  double psum = 0.0, desum = 0.0;
  for (const auto& [cat, a] : acc) {
    CategoryMetrics m;
    m.count = a.count;
    m.psnr_inf = a.inf;
    m.psnr_mean = a.finite ? a.psnr_sum / a.finite : std::numeric_limits<double>::infinity();
    m.delta_e_mean = a.de_sum / a.count;
    r.per_category[cat] = m;
    psum += m.psnr_mean;
    desum += m.delta_e_mean;
  }
  r.psnr_average = psum / static_cast<double>(r.per_category.size());
  r.delta_e_average = desum / static_cast<double>(r.per_category.size());
  return r;
}

std::string report_json(const MetricReport& r) {
  nlohmann::json j;
  j["per_category"] = nlohmann::json::object();
  for (const auto& [cat, m] : r.per_category) {
    j["per_category"][category_name(cat)] = {{"count", m.count},
                                             {"psnr_mean", json_metric(m.psnr_mean)},
                                             {"delta_e_mean", json_metric(m.delta_e_mean)},
                                             {"psnr_inf_count", m.psnr_inf}};
  }
  j["average"] = {{"psnr", json_metric(r.psnr_average)},
                  {"delta_e", json_metric(r.delta_e_average)}};
  return j.dump(2) + "\n";
}

void write_report_json(const MetricReport& r, const std::string& path) {
  write_text(report_json(r), path);
}

void write_report_csv(const MetricReport& r, const std::string& path) {
  std::string csv = "category,count,psnr_mean,delta_e_mean,psnr_inf_count\n";
  int total = 0, total_inf = 0;
  for (const auto& [cat, m] : r.per_category) {
    csv += std::string(category_name(cat)) + "," + std::to_string(m.count) + "," +
           fmt_metric(m.psnr_mean) + "," + fmt_metric(m.delta_e_mean) + "," +
           std::to_string(m.psnr_inf) + "\n";
    total += m.count;
    total_inf += m.psnr_inf;
  }
  csv += "average," + std::to_string(total) + "," + fmt_metric(r.psnr_average) + "," +
         fmt_metric(r.delta_e_average) + "," + std::to_string(total_inf) + "\n";
  write_text(csv, path);
}

std::string format_report_table(const MetricReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-12s %7s %10s %10s\n", "category", "images", "psnr_db",
                "delta_e");
  std::string out = buf;
  for (const auto& [cat, m] : r.per_category) {
    std::snprintf(buf, sizeof(buf), "%-12s %7d %10s %10s\n", category_name(cat), m.count,
                  fmt_metric(m.psnr_mean).c_str(), fmt_metric(m.delta_e_mean).c_str());
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "%-12s %7s %10s %10s\n", "average", "",
                fmt_metric(r.psnr_average).c_str(), fmt_metric(r.delta_e_average).c_str());
  out += buf;
  return out;
}

BenchReport bench_inference(const Generator& gen, const std::vector<int>& resolutions, int runs,
                            const std::string& device_label) {
  if (runs < 3) fail(ErrorCode::ConfigError, "bench needs runs >= 3, got " + std::to_string(runs));
  if (resolutions.empty()) fail(ErrorCode::ConfigError, "bench needs at least one resolution");
  int d = gen.divisor();
  for (int res : resolutions)
    if (res < d || res % d != 0)
      fail(ErrorCode::ShapeError,
           "bench resolution " + std::to_string(res) + " is not a positive multiple of " +
               std::to_string(d));

  BenchReport report;
  for (int res : resolutions) {
    Tensor x(1, 3, res, res);
    Rng rng(mix_seed(4242, static_cast<uint64_t>(res)));
    for (auto& v : x.data) v = rng.uniform(0.0, 1.0);

    gen.forward(x, nullptr);  // warm-up, untimed
    std::vector<double> secs(runs);
    for (int i = 0; i < runs; ++i) {
      auto t0 = std::chrono::steady_clock::now();
      gen.forward(x, nullptr);
      secs[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    double mean = 0.0;
    for (double s : secs) mean += s;
    mean /= runs;
    double var = 0.0;
    for (double s : secs) var += (s - mean) * (s - mean);

    BenchRow row;
    row.resolution = res;
    row.device = device_label;
    row.seconds_mean = mean;
    row.seconds_std = std::sqrt(var / (runs - 1));
    row.runs = runs;
    report.rows.push_back(row);
  }
  return report;
}

void write_bench_csv(const BenchReport& r, const std::string& path) {
  std::string csv = "resolution,device,seconds_mean,seconds_std,runs\n";
  char buf[128];
  for (const BenchRow& row : r.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%.6f,%.6f,%d\n", row.resolution, row.device.c_str(),
                  row.seconds_mean, row.seconds_std, row.runs);
    csv += buf;
  }
  write_text(csv, path);
}

std::string format_bench_table(const BenchReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%10s %-10s %12s %12s %5s\n", "resolution", "device",
                "seconds_mean", "seconds_std", "runs");
  std::string out = buf;
  for (const BenchRow& row : r.rows) {
    std::snprintf(buf, sizeof(buf), "%10d %-10s %12.4f %12.4f %5d\n", row.resolution,
                  row.device.c_str(), row.seconds_mean, row.seconds_std, row.runs);
    out += buf;
  }
  return out;
}

}  // namespace penh
