#include "penh.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/degrade.hpp"
#include "core/enhance.hpp"
#include "core/error.hpp"
#include "core/evaluate.hpp"
#include "core/plot.hpp"
#include "core/trainer.hpp"
#include "nlohmann/json.hpp"

#define PENH_API __attribute__((visibility("default")))

using namespace penh;

namespace {

thread_local std::string g_last_error;

penh_status map_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotFound: return PENH_ERR_NOT_FOUND;
    case ErrorCode::FormatError: return PENH_ERR_FORMAT;
    case ErrorCode::IoError: return PENH_ERR_IO;
    case ErrorCode::ShapeError: return PENH_ERR_SHAPE;
    case ErrorCode::ConfigError: return PENH_ERR_CONFIG;
    case ErrorCode::EmptyCorpus: return PENH_ERR_EMPTY_CORPUS;
    case ErrorCode::PairingError: return PENH_ERR_PAIRING;
    case ErrorCode::DependencyError: return PENH_ERR_DEPENDENCY;
    case ErrorCode::DivergenceError: return PENH_ERR_DIVERGENCE;
    case ErrorCode::CheckpointVersionError: return PENH_ERR_CHECKPOINT_VERSION;
    case ErrorCode::InvalidArgument: return PENH_ERR_INVALID_ARGUMENT;
    case ErrorCode::Internal: return PENH_ERR_INTERNAL;
  }
  return PENH_ERR_INTERNAL;
}

// Runs fn, converting every exception into a status + last-error message.
template <typename Fn>
penh_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PENH_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PENH_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PENH_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

nlohmann::json parse_json(const char* text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, std::string(what) + ": " + e.what());
  }
}

// Overlays user keys onto defaults, recursing into nested objects; a key the
// defaults don't have is a ConfigError rather than a silent no-op.
void merge_config(nlohmann::json& base, const nlohmann::json& user, const std::string& prefix) {
  if (!user.is_object())
    fail(ErrorCode::FormatError, "config" + (prefix.empty() ? "" : " " + prefix) +
                                     " must be a JSON object");
  for (const auto& [key, value] : user.items()) {
    if (!base.contains(key))
      fail(ErrorCode::ConfigError, "unknown config key '" + prefix + key + "'");
    if (base[key].is_object())
      merge_config(base[key], value, prefix + key + ".");
    else
      base[key] = value;
  }
}

TrainConfig resolve_train_config(const char* config_json) {
  nlohmann::json doc = config_to_json(TrainConfig{});
  if (config_json && *config_json)
    merge_config(doc, parse_json(config_json, "train config"), "");
  return config_from_json(doc);
}

// loss_curve.png from the run's CSV: l_p (blue), l_r (red), d_loss (green)
void emit_loss_plot(const std::string& out_dir) {
  std::ifstream in(out_dir + "/train_log.csv");
  if (!in) return;
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> series(3);
  while (std::getline(in, line)) {
    double step, l_r, l_rfl, l_g, l_p, d_loss;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &step, &l_r, &l_rfl, &l_g, &l_p,
                    &d_loss) == 6) {
      series[0].push_back(l_p);
      series[1].push_back(l_r);
      series[2].push_back(d_loss);
    }
  }
  if (!series[0].empty()) plot_series(series, out_dir + "/loss_curve.png");
}

TrainProgressFn wrap_progress(penh_train_progress_cb cb, void* user) {
  if (!cb) return nullptr;
  return [cb, user](long long step, long long total, const StepResult& r) {
    penh_loss_row row{step, total, r.losses.l_r, r.losses.l_rfl, r.losses.l_g, r.losses.l_p,
                      r.d_loss};
    cb(&row, user);
  };
}

}  // namespace

struct penh_enhancer {
  Enhancer impl;
};

extern "C" {

PENH_API const char* penh_version(void) { return "0.1.0"; }

PENH_API const char* penh_last_error(void) { return g_last_error.c_str(); }

PENH_API void penh_string_free(char* s) { std::free(s); }

PENH_API penh_status penh_synth(const char* src_dir, const char* out_dir,
                                const char* options_json, int* accepted_out, int* skipped_out) {
  return guarded([&] {
    require(src_dir, "src_dir");
    require(out_dir, "out_dir");

    nlohmann::json opts = {
        {"seed", 0},
        {"brightness_threshold", DegradeConfig{}.brightness_threshold},
        {"r_max", DegradeConfig{}.r_max},
        {"sigma_max", DegradeConfig{}.sigma_max},
        {"mode", "full"},
        {"noise_only_sigma_max", DegradeConfig{}.noise_only_sigma_max},
        {"train_frac", 0.8},
        {"val_frac", 0.1},
    };
    if (options_json && *options_json)
      merge_config(opts, parse_json(options_json, "synth options"), "");

    DegradeConfig cfg;
    cfg.seed = opts.at("seed").get<std::uint64_t>();
    cfg.brightness_threshold = opts.at("brightness_threshold").get<double>();
    cfg.r_max = opts.at("r_max").get<double>();
    cfg.sigma_max = opts.at("sigma_max").get<double>();
    cfg.noise_only_sigma_max = opts.at("noise_only_sigma_max").get<double>();
    std::string mode = opts.at("mode").get<std::string>();
    if (mode == "full")
      cfg.mode = DegradeMode::Full;
    else if (mode == "noise_only")
      cfg.mode = DegradeMode::NoiseOnly;
    else
      fail(ErrorCode::ConfigError, "unknown degrade mode '" + mode + "'");

    CorpusSummary summary = degrade_corpus(src_dir, out_dir, cfg);
    PairManifest manifest = build_manifest(out_dir, src_dir);
    manifest = split_manifest(manifest, opts.at("train_frac").get<double>(),
                              opts.at("val_frac").get<double>(), cfg.seed);
    save_manifest(manifest, std::string(out_dir) + "/manifest.json");
    if (accepted_out) *accepted_out = summary.accepted;
    if (skipped_out) *skipped_out = summary.skipped;
  });
}

PENH_API penh_status penh_default_train_config(char** json_out) {
  return guarded([&] {
    require(json_out, "json_out");
    *json_out = dup_string(config_to_json(TrainConfig{}).dump(2) + "\n");
  });
}

PENH_API penh_status penh_train(const char* manifest_path, const char* out_dir,
                                const char* config_json, penh_train_progress_cb progress,
                                void* user) {
  return guarded([&] {
    require(manifest_path, "manifest_path");
    require(out_dir, "out_dir");
    TrainConfig cfg = resolve_train_config(config_json);
    PairManifest manifest = load_manifest(manifest_path);
    fit(cfg, manifest, out_dir, wrap_progress(progress, user));
    emit_loss_plot(out_dir);
  });
}

PENH_API penh_status penh_train_resume(const char* checkpoint_path, const char* manifest_path,
                                       const char* out_dir, int epochs_override,
                                       penh_train_progress_cb progress, void* user) {
  return guarded([&] {
    require(checkpoint_path, "checkpoint_path");
    require(manifest_path, "manifest_path");
    require(out_dir, "out_dir");
    auto state = load_checkpoint(checkpoint_path);
    if (epochs_override > 0) state->config.epochs = epochs_override;
    PairManifest manifest = load_manifest(manifest_path);
    fit_loop(*state, manifest, out_dir, wrap_progress(progress, user));
    emit_loss_plot(out_dir);
  });
}

PENH_API penh_status penh_enhancer_open(const char* checkpoint_path, penh_enhancer** out) {
  return guarded([&] {
    require(checkpoint_path, "checkpoint_path");
    require(out, "out");
    *out = new penh_enhancer{Enhancer(checkpoint_path)};
  });
}

PENH_API void penh_enhancer_close(penh_enhancer* e) { delete e; }

PENH_API penh_status penh_enhancer_run(penh_enhancer* e, const char* input_path,
                                       const char* out_dir, int* n_written_out) {
  return guarded([&] {
    require(e, "enhancer");
    require(input_path, "input_path");
    require(out_dir, "out_dir");
    int n = e->impl.enhance_path(input_path, out_dir);
    if (n_written_out) *n_written_out = n;
  });
}

PENH_API penh_status penh_enhancer_enhance(penh_enhancer* e, const float* rgb, int height,
                                           int width, float* out_rgb) {
  return guarded([&] {
    require(e, "enhancer");
    require(rgb, "rgb");
    require(out_rgb, "out_rgb");
    if (height < 1 || width < 1)
      fail(ErrorCode::ShapeError, "image dimensions must be positive");
    ImageTensor img;
    img.height = height;
    img.width = width;
    img.data.assign(rgb, rgb + static_cast<std::size_t>(height) * width * 3);
    ImageTensor out = e->impl.enhance(img);
    std::memcpy(out_rgb, out.data.data(), out.data.size() * sizeof(float));
  });
}

PENH_API penh_status penh_evaluate(const char* checkpoint_path, const char* manifest_path,
                                   const char* out_dir, int use_cie76, char** table_out) {
  return guarded([&] {
    require(checkpoint_path, "checkpoint_path");
    require(manifest_path, "manifest_path");
    require(out_dir, "out_dir");
    Enhancer enhancer(checkpoint_path);
    PairManifest manifest = load_manifest(manifest_path);
    MetricReport report =
        evaluate_manifest(manifest, [&](const ImageTensor& img) { return enhancer.enhance(img); },
                          use_cie76 ? DeltaEVariant::Cie76 : DeltaEVariant::Ciede2000);
    std::filesystem::create_directories(out_dir);
    write_report_json(report, std::string(out_dir) + "/report.json");
    write_report_csv(report, std::string(out_dir) + "/report.csv");
    if (table_out) *table_out = dup_string(format_report_table(report));
  });
}

PENH_API penh_status penh_bench(const char* checkpoint_path, const int* resolutions,
                                int n_resolutions, int runs, const char* device_label,
                                const char* out_dir, char** table_out) {
  return guarded([&] {
    require(checkpoint_path, "checkpoint_path");
    require(out_dir, "out_dir");
    if (n_resolutions < 1 || !resolutions)
      fail(ErrorCode::ConfigError, "bench needs at least one resolution");
    Enhancer enhancer(checkpoint_path);
    std::vector<int> res(resolutions, resolutions + n_resolutions);
    BenchReport report = bench_inference(enhancer.generator(), res, runs,
                                         device_label && *device_label ? device_label : "cpu");
    std::filesystem::create_directories(out_dir);
    write_bench_csv(report, std::string(out_dir) + "/bench.csv");
    if (table_out) *table_out = dup_string(format_bench_table(report));
  });
}

}  // extern "C"
