#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "core/error.hpp"
#include "core/evaluate.hpp"
#include "core/image.hpp"
#include "core/metrics.hpp"
#include "core/plot.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "nlohmann/json.hpp"

namespace fs = std::filesystem;
using namespace penh;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("penh_eval_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Writes n test pairs per category and returns a manifest over them.
PairManifest make_eval_manifest(const fs::path& root, const std::vector<Category>& cats, int n,
                                bool identical_pairs = false) {
  PairManifest m;
  Rng rng(9);
  int k = 0;
  for (Category cat : cats)
    for (int i = 0; i < n; ++i, ++k) {
      ImageTensor ref = ImageTensor::filled(12, 12, 0.f, 0.f, 0.f);
      for (auto& v : ref.data) v = static_cast<float>(rng.uniform(0.1, 0.9));
      ImageTensor deg = ref;
      if (!identical_pairs)
        for (auto& v : deg.data) v = std::max(0.f, v - 0.2f);
      std::string rp = (root / ("ref" + std::to_string(k) + ".png")).string();
      std::string dp = identical_pairs ? rp : (root / ("deg" + std::to_string(k) + ".png")).string();
      save_image(ref, rp);
      if (!identical_pairs) save_image(deg, dp);
      m.entries.push_back({dp, rp, cat, Split::Test});
    }
  return m;
}

}  // namespace

TEST_SUITE("evaluate") {

TEST_CASE("identity enhancer scores the degraded baseline exactly") {
  fs::path dir = fresh_dir("identity");
  PairManifest m = make_eval_manifest(dir, {Category::Radiology}, 3);
  MetricReport r = evaluate_manifest(m, [](const ImageTensor& img) { return img; });

  double psnr_sum = 0.0, de_sum = 0.0;
  for (const auto& e : m.entries) {
    ImageTensor deg = load_image(e.degraded_path);
    ImageTensor ref = load_image(e.reference_path);
    psnr_sum += psnr(ref, deg);
    de_sum += delta_e(ref, deg);
  }
  const CategoryMetrics& cm = r.per_category.at(Category::Radiology);
  CHECK(cm.count == 3);
  CHECK(cm.psnr_mean == doctest::Approx(psnr_sum / 3).epsilon(1e-12));
  CHECK(cm.delta_e_mean == doctest::Approx(de_sum / 3).epsilon(1e-12));
  CHECK(r.psnr_average == cm.psnr_mean);
}

TEST_CASE("perfect enhancer: infinite PSNR rows, zero delta-e, 'inf' in JSON") {
  fs::path dir = fresh_dir("perfect");
  PairManifest m = make_eval_manifest(dir, {Category::Dermatology}, 2, /*identical_pairs=*/true);
  MetricReport r = evaluate_manifest(m, [](const ImageTensor& img) { return img; });

  const CategoryMetrics& cm = r.per_category.at(Category::Dermatology);
  CHECK(cm.psnr_inf == 2);
  CHECK(std::isinf(cm.psnr_mean));
  CHECK(cm.delta_e_mean == 0.0);
  CHECK(std::isinf(r.psnr_average));

  nlohmann::json j = nlohmann::json::parse(report_json(r));
  CHECK(j["per_category"]["dermatology"]["psnr_mean"] == "inf");
  CHECK(j["per_category"]["dermatology"]["psnr_inf_count"] == 2);
  CHECK(j["average"]["psnr"] == "inf");
  CHECK(j["average"]["delta_e"] == 0.0);
}

TEST_CASE("average is the unweighted mean over categories present") {
  fs::path dir = fresh_dir("avg");
  PairManifest m =
      make_eval_manifest(dir, {Category::Radiology, Category::Dermatology, Category::Microscopy}, 2);
  MetricReport r = evaluate_manifest(m, [](const ImageTensor& img) { return img; });

  REQUIRE(r.per_category.size() == 3);
  double psum = 0.0, desum = 0.0;
  for (const auto& [cat, cm] : r.per_category) {
    psum += cm.psnr_mean;
    desum += cm.delta_e_mean;
  }
  CHECK(r.psnr_average == doctest::Approx(psum / 3).epsilon(1e-12));
  CHECK(r.delta_e_average == doctest::Approx(desum / 3).epsilon(1e-12));
}

TEST_CASE("cie76 variant flows through") {
  fs::path dir = fresh_dir("cie76");
  PairManifest m = make_eval_manifest(dir, {Category::Other}, 2);
  auto id = [](const ImageTensor& img) { return img; };
  MetricReport r2000 = evaluate_manifest(m, id, DeltaEVariant::Ciede2000);
  MetricReport r76 = evaluate_manifest(m, id, DeltaEVariant::Cie76);
  CHECK(r2000.delta_e_average != r76.delta_e_average);
}

TEST_CASE("empty test split raises EmptyCorpus") {
  PairManifest m;
  m.entries.push_back({"a.png", "b.png", Category::Other, Split::Train});
  try {
    evaluate_manifest(m, [](const ImageTensor& img) { return img; });
    FAIL("expected EmptyCorpus");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCorpus);
  }
}

TEST_CASE("report files: csv rows and json round-trip") {
  fs::path dir = fresh_dir("files");
  PairManifest m = make_eval_manifest(dir, {Category::Radiology, Category::Microscopy}, 1);
  MetricReport r = evaluate_manifest(m, [](const ImageTensor& img) { return img; });
  write_report_csv(r, (dir / "report.csv").string());
  write_report_json(r, (dir / "report.json").string());

  std::ifstream csv(dir / "report.csv");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);  // header, two categories, average
  CHECK(lines[0] == "category,count,psnr_mean,delta_e_mean,psnr_inf_count");
  CHECK(lines[1].rfind("radiology,1,", 0) == 0);
  CHECK(lines[3].rfind("average,2,", 0) == 0);

  std::ifstream jf(dir / "report.json");
  nlohmann::json j = nlohmann::json::parse(jf);
  CHECK(j["per_category"].size() == 2);
  CHECK(j["average"]["psnr"].is_number());

  std::string table = format_report_table(r);
  CHECK(table.find("radiology") != std::string::npos);
  CHECK(table.find("average") != std::string::npos);
}

TEST_CASE("bench: validation and report structure") {
  Generator gen(GeneratorConfig{{4, 6}, true, true}, 3);

  CHECK_THROWS_AS(bench_inference(gen, {16}, 1, "cpu"), Error);  // runs too small
  try {
    bench_inference(gen, {18}, 3, "cpu");  // 18 % 4 != 0
    FAIL("expected ShapeError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeError);
  }

  BenchReport r = bench_inference(gen, {16, 32}, 3, "cpu-test");
  REQUIRE(r.rows.size() == 2);
  for (const BenchRow& row : r.rows) {
    CHECK(row.seconds_mean > 0.0);
    CHECK(row.seconds_std >= 0.0);
    CHECK(row.runs == 3);
    CHECK(row.device == "cpu-test");
  }
  CHECK(r.rows[0].resolution == 16);
  CHECK(r.rows[1].resolution == 32);

  fs::path dir = fresh_dir("bench");
  write_bench_csv(r, (dir / "bench.csv").string());
  std::ifstream csv(dir / "bench.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "resolution,device,seconds_mean,seconds_std,runs");
}

TEST_CASE("plot_series writes a readable png") {
  fs::path dir = fresh_dir("plot");
  std::vector<std::vector<double>> series{{1.0, 0.8, 0.6, 0.5, 0.42}, {0.5, 0.4, 0.35, 0.3, 0.28}};
  std::string path = (dir / "curve.png").string();
  plot_series(series, path, 300, 200);
  ImageTensor img = load_image(path);
  CHECK(img.height == 200);
  CHECK(img.width == 300);

  CHECK_THROWS_AS(plot_series({}, path), Error);
  CHECK_THROWS_AS(plot_series({{}}, path), Error);
}

}  // TEST_SUITE
