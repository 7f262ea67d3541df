// penh — corpus synthesis, training, enhancement, evaluation, benchmarking.
// Thin shell over the C API in include/penh.h; all heavy lifting lives in the
// shared library. Exit codes: 0 success, 2 usage or input error, 3 training
// divergence.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "penh.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;

int report_failure(penh_status st) {
  std::fprintf(stderr, "error: %s\n", penh_last_error());
  return st == PENH_ERR_DIVERGENCE ? kExitDiverged : kExitUsage;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "error: cannot read config file '%s'\n", path.c_str());
    std::exit(kExitUsage);
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: config file '%s': %s\n", path.c_str(), e.what());
    std::exit(kExitUsage);
  }
}

std::string device_label() {
  const char* dev = std::getenv("PENH_DEVICE");
  return dev && *dev ? dev : "cpu";
}

void print_progress(const penh_loss_row* row, void*) {
  long long stride = row->total_steps <= 50 ? 1 : row->total_steps / 50;
  if (row->step % stride == 0 || row->step == row->total_steps)
    std::printf("step %lld/%lld  l_p=%.5f  l_r=%.5f  l_g=%.3f  d=%.3f\n", row->step,
                row->total_steps, row->l_p, row->l_r, row->l_g, row->d_loss);
}

struct SynthArgs {
  std::string src_dir, out_dir, config_path, mode;
  double sigma_max = -1, r_max = -1, brightness_threshold = -1, noise_only_sigma_max = -1;
  double train_frac = -1, val_frac = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

struct TrainArgs {
  std::string manifest, out_dir, config_path, resume, variant;
  nlohmann::json overrides = nlohmann::json::object();
  int epochs_override = 0;
  bool print_default = false;
};

// Table IV rows: which modules each named variant enables.
nlohmann::json variant_json(const std::string& name) {
  bool res = false, gate = false, rfl = false, adv = false;
  if (name == "base") {
  } else if (name == "res") {
    res = true;
  } else if (name == "res_gate") {
    res = gate = true;
  } else if (name == "res_gate_rfl") {
    res = gate = rfl = true;
  } else if (name == "full") {
    res = gate = rfl = adv = true;
  } else {
    std::fprintf(stderr, "error: unknown variant '%s'\n", name.c_str());
    std::exit(kExitUsage);
  }
  return {{"use_residual_blocks", res},
          {"use_gates", gate},
          {"use_feature_loss", rfl},
          {"use_adversarial", adv}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perceptual enhancement pipeline"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // ---- synth
  SynthArgs sy;
  CLI::App* synth = app.add_subcommand("synth", "degrade a reference corpus into training pairs");
  synth->add_option("src_dir", sy.src_dir, "reference image tree")->required();
  synth->add_option("out_dir", sy.out_dir, "degraded output tree (manifest.json lands here)")
      ->required();
  synth->add_option("--config", sy.config_path, "JSON options file (flags win)");
  synth->add_option("--seed", sy.seed)->each([&](const std::string&) { sy.seed_set = true; });
  synth->add_option("--mode", sy.mode, "full | noise_only");
  synth->add_option("--sigma-max", sy.sigma_max, "noise std upper bound, 8-bit units");
  synth->add_option("--r-max", sy.r_max, "contrast/brightness factor upper bound");
  synth->add_option("--brightness-threshold", sy.brightness_threshold, "luminance gate (eight-bit L)");
  synth->add_option("--noise-only-sigma-max", sy.noise_only_sigma_max);
  synth->add_option("--train-frac", sy.train_frac);
  synth->add_option("--val-frac", sy.val_frac);

  // ---- train
  TrainArgs tr;
  CLI::App* train = app.add_subcommand("train", "fit the generator on a synthesized manifest");
  train->add_option("manifest", tr.manifest, "manifest.json from synth");
  train->add_option("out_dir", tr.out_dir, "checkpoints + train_log.csv + loss_curve.png");
  train->add_option("--config", tr.config_path, "JSON train config (flags win)");
  train->add_option("--resume", tr.resume, "checkpoint to continue from");
  train->add_option("--epochs", [&tr](const std::vector<std::string>& v) {
    tr.overrides["epochs"] = std::stoi(v[0]);
    tr.epochs_override = std::stoi(v[0]);
    return true;
  }, "epoch count");
  train->add_option("--batch-size", [&tr](const std::vector<std::string>& v) {
    tr.overrides["batch_size"] = std::stoi(v[0]);
    return true;
  });
  train->add_option("--lr", [&tr](const std::vector<std::string>& v) {
    tr.overrides["lr"] = std::stod(v[0]);
    return true;
  });
  train->add_option("--seed", [&tr](const std::vector<std::string>& v) {
    tr.overrides["seed"] = static_cast<std::uint64_t>(std::stoull(v[0]));
    return true;
  });
  train->add_option("--crop-side", [&tr](const std::vector<std::string>& v) {
    tr.overrides["crop_side"] = std::stoi(v[0]);
    return true;
  });
  train->add_option("--checkpoint-every", [&tr](const std::vector<std::string>& v) {
    tr.overrides["checkpoint_every"] = std::stoi(v[0]);
    return true;
  });
  train->add_option("--feature-weights", [&tr](const std::vector<std::string>& v) {
    tr.overrides["feature_weights"] = v[0];
    return true;
  }, "random:<seed> | random-smooth:<seed> | path to a weight archive");
  train->add_option("--variant", tr.variant, "base | res | res_gate | res_gate_rfl | full");
  train->add_flag_callback("--deterministic",
                           [&tr] { tr.overrides["deterministic"] = true; },
                           "fixed seeds, comparable logs");
  train->add_flag("--print-default-config", tr.print_default,
                  "dump the default config JSON and exit");

  // ---- enhance
  std::string en_ckpt, en_input, en_out;
  CLI::App* enhance = app.add_subcommand("enhance", "run the generator on images");
  enhance->add_option("checkpoint", en_ckpt)->required();
  enhance->add_option("input", en_input, "image file or directory")->required();
  enhance->add_option("out_dir", en_out)->required();

  // ---- evaluate
  std::string ev_ckpt, ev_manifest, ev_out;
  bool ev_cie76 = false;
  CLI::App* evaluate = app.add_subcommand("evaluate", "PSNR / ΔE over the manifest's test split");
  evaluate->add_option("checkpoint", ev_ckpt)->required();
  evaluate->add_option("manifest", ev_manifest)->required();
  evaluate->add_option("out_dir", ev_out, "report.json + report.csv")->required();
  evaluate->add_flag("--cie76", ev_cie76, "use CIE76 instead of CIEDE2000");

  // ---- bench
  std::string be_ckpt, be_out = ".";
  std::vector<int> be_res{256, 512, 1024};
  int be_runs = 3;
  CLI::App* bench = app.add_subcommand("bench", "inference timing grid");
  bench->add_option("checkpoint", be_ckpt)->required();
  bench->add_option("--resolutions", be_res, "square sizes to time")->delimiter(',');
  bench->add_option("--runs", be_runs, "timed repetitions per size (>= 3)");
  bench->add_option("--out-dir", be_out, "where bench.csv is written");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitUsage;
  }

  if (synth->parsed()) {
    nlohmann::json opts =
        sy.config_path.empty() ? nlohmann::json::object() : load_config_file(sy.config_path);
    if (sy.seed_set) opts["seed"] = sy.seed;
    if (!sy.mode.empty()) opts["mode"] = sy.mode;
    // --sigma-max bounds the noise of whichever mode is active
    if (sy.sigma_max >= 0)
      opts[sy.mode == "noise_only" ? "noise_only_sigma_max" : "sigma_max"] = sy.sigma_max;
    if (sy.r_max >= 0) opts["r_max"] = sy.r_max;
    if (sy.brightness_threshold >= 0) opts["brightness_threshold"] = sy.brightness_threshold;
    if (sy.noise_only_sigma_max >= 0) opts["noise_only_sigma_max"] = sy.noise_only_sigma_max;
    if (sy.train_frac >= 0) opts["train_frac"] = sy.train_frac;
    if (sy.val_frac >= 0) opts["val_frac"] = sy.val_frac;
    int accepted = 0, skipped = 0;
    penh_status st =
        penh_synth(sy.src_dir.c_str(), sy.out_dir.c_str(), opts.dump().c_str(), &accepted, &skipped);
    if (st != PENH_OK) return report_failure(st);
    std::printf("accepted %d, skipped %d (luminance gate); manifest: %s/manifest.json\n", accepted,
                skipped, sy.out_dir.c_str());
    return kExitOk;
  }

  if (train->parsed()) {
    if (tr.print_default) {
      char* json = nullptr;
      if (penh_default_train_config(&json) != PENH_OK) return report_failure(PENH_ERR_INTERNAL);
      std::fputs(json, stdout);
      penh_string_free(json);
      return kExitOk;
    }
    if (tr.manifest.empty() || tr.out_dir.empty()) {
      std::fprintf(stderr, "error: train needs <manifest> <out_dir>\n");
      return kExitUsage;
    }

    penh_status st;
    if (!tr.resume.empty()) {
      st = penh_train_resume(tr.resume.c_str(), tr.manifest.c_str(), tr.out_dir.c_str(),
                             tr.epochs_override, print_progress, nullptr);
    } else {
      nlohmann::json cfg =
          tr.config_path.empty() ? nlohmann::json::object() : load_config_file(tr.config_path);
      if (!tr.variant.empty()) cfg["variant"] = variant_json(tr.variant);
      for (const auto& [k, v] : tr.overrides.items()) cfg[k] = v;
      st = penh_train(tr.manifest.c_str(), tr.out_dir.c_str(), cfg.dump().c_str(), print_progress,
                      nullptr);
    }
    if (st == PENH_ERR_DIVERGENCE) {
      std::fprintf(stderr, "error: %s\nlast good state: %s/checkpoint_last_good.ckpt\n",
                   penh_last_error(), tr.out_dir.c_str());
      return kExitDiverged;
    }
    if (st != PENH_OK) return report_failure(st);
    std::printf("done; final checkpoint: %s/checkpoint_final.ckpt\n", tr.out_dir.c_str());
    std::printf("loss curve: %s/loss_curve.png (blue l_p, red l_r, green d_loss)\n",
                tr.out_dir.c_str());
    return kExitOk;
  }

  if (enhance->parsed()) {
    penh_enhancer* e = nullptr;
    penh_status st = penh_enhancer_open(en_ckpt.c_str(), &e);
    if (st != PENH_OK) return report_failure(st);
    int n = 0;
    st = penh_enhancer_run(e, en_input.c_str(), en_out.c_str(), &n);
    penh_enhancer_close(e);
    if (st != PENH_OK) return report_failure(st);
    std::printf("wrote %d image%s to %s\n", n, n == 1 ? "" : "s", en_out.c_str());
    return kExitOk;
  }

  if (evaluate->parsed()) {
    char* table = nullptr;
    penh_status st = penh_evaluate(ev_ckpt.c_str(), ev_manifest.c_str(), ev_out.c_str(),
                                   ev_cie76 ? 1 : 0, &table);
    if (st != PENH_OK) return report_failure(st);
    std::fputs(table, stdout);
    penh_string_free(table);
    std::printf("reports: %s/report.json, %s/report.csv\n", ev_out.c_str(), ev_out.c_str());
    return kExitOk;
  }

  if (bench->parsed()) {
    char* table = nullptr;
    penh_status st = penh_bench(be_ckpt.c_str(), be_res.data(), static_cast<int>(be_res.size()),
                                be_runs, device_label().c_str(), be_out.c_str(), &table);
    if (st != PENH_OK) return report_failure(st);
    std::fputs(table, stdout);
    penh_string_free(table);
    std::printf("wrote %s/bench.csv\n", be_out.c_str());
    return kExitOk;
  }

  return kExitUsage;
}
