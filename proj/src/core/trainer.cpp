#include "core/trainer.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>

#include "core/checkpoint.hpp"
#include "core/convert.hpp"
#include "core/error.hpp"

namespace fs = std::filesystem;

namespace penh {

namespace {

constexpr double kDivergenceLimit = 1e6;

void validate(const TrainConfig& cfg) {
  if (cfg.lr <= 0.0) fail(ErrorCode::ConfigError, "lr must be positive");
  if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0)
    fail(ErrorCode::ConfigError, "betas must lie in [0, 1)");
  if (cfg.batch_size < 1) fail(ErrorCode::ConfigError, "batch_size must be >= 1");
  if (cfg.epochs < 1) fail(ErrorCode::ConfigError, "epochs must be >= 1");
  int divisor = 1 << static_cast<int>(cfg.schedule.size());
  if (cfg.crop_side < 8 || cfg.crop_side % divisor != 0 || cfg.crop_side % 8 != 0)
    fail(ErrorCode::ConfigError, "crop_side must be a positive multiple of " +
                                     std::to_string(divisor) + " (and of 8 for the feature net)");
}

}  // namespace

nlohmann::json config_to_json(const TrainConfig& cfg) {
  return {
      {"lr", cfg.lr},
      {"beta1", cfg.beta1},
      {"beta2", cfg.beta2},
      {"epochs", cfg.epochs},
      {"batch_size", cfg.batch_size},
      {"crop_side", cfg.crop_side},
      {"seed", cfg.seed},
      {"checkpoint_every", cfg.checkpoint_every},
      {"schedule", cfg.schedule},
      {"feature_weights", cfg.feature_weights},
      {"deterministic", cfg.deterministic},
      {"weights",
       {{"lambda_G", cfg.weights.lambda_G},
        {"lambda_R_feat", cfg.weights.lambda_R_feat},
        {"lambda_TV", cfg.weights.lambda_TV}}},
      {"variant",
       {{"use_residual_blocks", cfg.variant.use_residual_blocks},
        {"use_gates", cfg.variant.use_gates},
        {"use_feature_loss", cfg.variant.use_feature_loss},
        {"use_adversarial", cfg.variant.use_adversarial}}},
  };
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  try {
    cfg.lr = j.at("lr").get<double>();
    cfg.beta1 = j.at("beta1").get<double>();
    cfg.beta2 = j.at("beta2").get<double>();
    cfg.epochs = j.at("epochs").get<int>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.crop_side = j.at("crop_side").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.checkpoint_every = j.at("checkpoint_every").get<int>();
    cfg.schedule = j.at("schedule").get<std::vector<int>>();
    cfg.feature_weights = j.at("feature_weights").get<std::string>();
    cfg.deterministic = j.at("deterministic").get<bool>();
    const auto& w = j.at("weights");
    cfg.weights.lambda_G = w.at("lambda_G").get<double>();
    cfg.weights.lambda_R_feat = w.at("lambda_R_feat").get<double>();
    cfg.weights.lambda_TV = w.at("lambda_TV").get<double>();
    const auto& v = j.at("variant");
    cfg.variant.use_residual_blocks = v.at("use_residual_blocks").get<bool>();
    cfg.variant.use_gates = v.at("use_gates").get<bool>();
    cfg.variant.use_feature_loss = v.at("use_feature_loss").get<bool>();
    cfg.variant.use_adversarial = v.at("use_adversarial").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, std::string("bad train config snapshot: ") + e.what());
  }
  return cfg;
}

namespace {

void check_term(const char* name, double v, const std::string& detail) {
  if (!std::isfinite(v) || std::fabs(v) > kDivergenceLimit)
    fail(ErrorCode::DivergenceError,
         std::string("training diverged: ") + name + " = " + std::to_string(v) + " (" + detail + ")");
}

std::string breakdown_str(const LossBreakdown& b, double d_loss) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "l_r=%g l_rfl=%g l_g=%g l_p=%g d_loss=%g", b.l_r, b.l_rfl,
                b.l_g, b.l_p, d_loss);
  return buf;
}

void append_param_tensors(CheckpointData& data, const std::vector<Parameter*>& params,
                          const Adam& opt) {
  for (const Parameter* p : params) data.tensors.emplace_back(p->name, p->value);
  for (std::size_t i = 0; i < params.size(); ++i) {
    data.tensors.emplace_back("opt/" + params[i]->name + "/m", opt.m[i]);
    data.tensors.emplace_back("opt/" + params[i]->name + "/v", opt.v[i]);
  }
}

void restore_param_tensors(const CheckpointData& data, const std::vector<Parameter*>& params,
                           Adam& opt, const std::string& path) {
  auto fetch = [&](const std::string& name, std::vector<double>& dst) {
    const std::vector<double>* t = data.find(name);
    if (!t || t->size() != dst.size())
      fail(ErrorCode::FormatError,
           "checkpoint '" + path + "' " + (t ? "size mismatch on" : "missing tensor") + " '" +
               name + "'");
    dst = *t;
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    fetch(params[i]->name, params[i]->value);
    fetch("opt/" + params[i]->name + "/m", opt.m[i]);
    fetch("opt/" + params[i]->name + "/v", opt.v[i]);
  }
}

}  // namespace

TrainState::TrainState(const TrainConfig& cfg)
    : config(cfg), gen([&] {
        validate(cfg);
        GeneratorConfig g;
        g.schedule = cfg.schedule;
        g.use_residual_blocks = cfg.variant.use_residual_blocks;
        g.use_gates = cfg.variant.use_gates;
        return g;
      }(), mix_seed(cfg.seed, fnv1a64("generator"))),
      rng(mix_seed(cfg.seed, fnv1a64("loop"))) {
  if (cfg.variant.use_adversarial) {
    DiscriminatorConfig d;
    disc = std::make_unique<Discriminator>(d, mix_seed(cfg.seed, fnv1a64("discriminator")));
    d_opt = std::make_unique<Adam>(disc->parameters(), cfg.lr, cfg.beta1, cfg.beta2);
  }
  if (cfg.variant.use_feature_loss) psi = std::make_unique<FeatureExtractor>(cfg.feature_weights);
  g_opt = std::make_unique<Adam>(gen.parameters(), cfg.lr, cfg.beta1, cfg.beta2);
}

StepResult train_step(TrainState& s, const Tensor& degraded, const Tensor& reference) {
  const LossWeights& w = s.config.weights;
  StepResult r;

  Generator::Cache cache;
  Tensor out = s.gen.forward(degraded, &cache);

  if (s.disc) {
    // discriminator first: real = (reference, reference), fake = the current
    // generator output, detached (its gradient is simply never propagated)
    Discriminator::Cache cr, cf;
    Tensor real = s.disc->forward(reference, reference, &cr);
    Tensor fake = s.disc->forward(out, reference, &cf);
    r.d_loss = discriminator_loss(real, fake);
    check_term("d_loss", r.d_loss, "discriminator update not applied");
    s.d_opt->zero_grad();
    Tensor dreal(real.n, real.c, real.h, real.w), dfake(fake.n, fake.c, fake.h, fake.w);
    discriminator_loss_backward(real, fake, dreal, dfake);
    s.disc->backward(cr, dreal);
    s.disc->backward(cf, dfake);
    s.d_opt->step();
  }

  s.g_opt->zero_grad();
  LossBreakdown& b = r.losses;
  b.l_r = l1_mean(out, reference);
  Tensor dy = l1_mean_backward(out, reference);

  if (s.psi) {
    FeatureExtractor::Cache pc;
    Tensor feat_out = s.psi->forward(out, &pc);
    Tensor feat_ref = s.psi->forward(reference, nullptr);
    b.l_rfl = w.lambda_R_feat * l1_mean(feat_out, feat_ref) + w.lambda_TV * total_variation(out);
    Tensor dfeat = l1_mean_backward(feat_out, feat_ref);
    for (auto& v : dfeat.data) v *= w.lambda_R_feat;
    Tensor dpsi = s.psi->backward_data(pc, dfeat);
    Tensor dtv = total_variation_backward(out);
    for (std::size_t i = 0; i < dy.size(); ++i)
      dy.data[i] += dpsi.data[i] + w.lambda_TV * dtv.data[i];
  }

  if (s.disc) {
    // scores against the just-updated discriminator
    Discriminator::Cache dc;
    Tensor scores = s.disc->forward(out, reference, &dc);
    b.l_g = adversarial_generator_loss(scores);
    Tensor ds = adversarial_generator_loss_backward(scores);
    for (auto& v : ds.data) v *= w.lambda_G;
    Tensor dadv = s.disc->backward(dc, ds, /*want_wgrad=*/false);
    for (std::size_t i = 0; i < dy.size(); ++i) dy.data[i] += dadv.data[i];
  }

  b.l_p = combine(b.l_r, b.l_rfl, b.l_g, w);
  std::string detail = breakdown_str(b, r.d_loss);
  check_term("l_r", b.l_r, detail);
  check_term("l_rfl", b.l_rfl, detail);
  check_term("l_g", b.l_g, detail);
  check_term("l_p", b.l_p, detail);

  s.gen.backward(cache, dy);
  s.g_opt->step();
  ++s.step;

#ifndef NDEBUG
  for (const Parameter* p : s.gen.parameters())
    for (double v : p->value) assert(std::isfinite(v));
  if (s.disc)
    for (const Parameter* p : s.disc->parameters())
      for (double v : p->value) assert(std::isfinite(v));
#endif
  return r;
}

void save_checkpoint(const TrainState& s, const std::string& path) {
  CheckpointData data;
  data.header = {
      {"format", "penh-checkpoint"},
      {"kind", "train-state"},
      {"step", s.step},
      {"rng", s.rng.state()},
      {"g_opt_t", s.g_opt->t},
      {"d_opt_t", s.d_opt ? s.d_opt->t : 0},
      {"config", config_to_json(s.config)},
  };
  append_param_tensors(data, const_cast<Generator&>(s.gen).parameters(), *s.g_opt);
  if (s.disc) append_param_tensors(data, s.disc->parameters(), *s.d_opt);
  write_checkpoint_file(data, path);
}

std::unique_ptr<TrainState> load_checkpoint(const std::string& path) {
  CheckpointData data = read_checkpoint_file(path);
  if (!data.header.contains("kind") || !data.header["kind"].is_string() ||
      data.header["kind"] != "train-state")
    fail(ErrorCode::FormatError, "'" + path + "' is not a training checkpoint");
  TrainConfig cfg = config_from_json(data.header.at("config"));
  auto s = std::make_unique<TrainState>(cfg);
  try {
    s->step = data.header.at("step").get<long long>();
    s->rng.set_state(data.header.at("rng").get<std::string>());
    s->g_opt->t = data.header.at("g_opt_t").get<int>();
    if (s->d_opt) s->d_opt->t = data.header.at("d_opt_t").get<int>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, "bad checkpoint header in '" + path + "': " + e.what());
  }
  restore_param_tensors(data, s->gen.parameters(), *s->g_opt, path);
  if (s->disc) restore_param_tensors(data, s->disc->parameters(), *s->d_opt, path);
  return s;
}

std::vector<int> epoch_order(const PairManifest& manifest, std::uint64_t seed, long long epoch) {
  std::vector<int> idx = split_indices(manifest, Split::Train);
  std::uint64_t base = mix_seed(seed, static_cast<std::uint64_t>(epoch));
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    std::uint64_t ka = mix_seed(base, static_cast<std::uint64_t>(a));
    std::uint64_t kb = mix_seed(base, static_cast<std::uint64_t>(b));
    if (ka != kb) return ka < kb;
    return a < b;
  });
  return idx;
}

void fit_loop(TrainState& s, const PairManifest& manifest, const std::string& out_dir,
              const TrainProgressFn& progress) {
  const TrainConfig& cfg = s.config;
  std::vector<int> train_idx = split_indices(manifest, Split::Train);
  if (train_idx.empty()) fail(ErrorCode::EmptyCorpus, "manifest has no train entries");
  fs::create_directories(out_dir);

  long long spe = (static_cast<long long>(train_idx.size()) + cfg.batch_size - 1) / cfg.batch_size;
  long long total = static_cast<long long>(cfg.epochs) * spe;

  std::string log_path = out_dir + "/train_log.csv";
  bool fresh = !fs::exists(log_path) || fs::file_size(log_path) == 0;
  std::FILE* log = std::fopen(log_path.c_str(), "ab");
  if (!log) fail(ErrorCode::IoError, "cannot open training log: " + log_path);
  if (fresh) std::fprintf(log, "step,l_r,l_rfl,l_g,l_p,d_loss,wallclock\n");

  auto t0 = std::chrono::steady_clock::now();
  long long cached_epoch = -1;
  std::vector<int> order;
  try {
    while (s.step < total) {
      long long epoch = s.step / spe;
      long long slot = s.step % spe;
      if (epoch != cached_epoch) {
        order = epoch_order(manifest, cfg.seed, epoch);
        cached_epoch = epoch;
      }
      std::size_t lo = static_cast<std::size_t>(slot) * cfg.batch_size;
      std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
      std::vector<int> batch_idx(order.begin() + lo, order.begin() + hi);
      PairBatch pb = load_training_batch(manifest, batch_idx, cfg.crop_side);
      Tensor x = batch_to_tensor(pb.degraded);
      Tensor ref = batch_to_tensor(pb.reference);

      StepResult r = train_step(s, x, ref);

      double wall = cfg.deterministic
                        ? 0.0
                        : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                              .count();
      std::fprintf(log, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.3f\n", s.step, r.losses.l_r,
                   r.losses.l_rfl, r.losses.l_g, r.losses.l_p, r.d_loss, wall);
      std::fflush(log);

      if (cfg.checkpoint_every > 0 && s.step % cfg.checkpoint_every == 0) {
        char name[32];
        std::snprintf(name, sizeof(name), "checkpoint_%06lld.ckpt", s.step);
        save_checkpoint(s, out_dir + "/" + name);
      }
      if (progress) progress(s.step, total, r);
    }
  } catch (const Error& e) {
    std::fclose(log);
    if (e.code() == ErrorCode::DivergenceError)
      save_checkpoint(s, out_dir + "/checkpoint_last_good.ckpt");
    throw;
  }
  std::fclose(log);
  save_checkpoint(s, out_dir + "/checkpoint_final.ckpt");
}

std::unique_ptr<TrainState> fit(const TrainConfig& cfg, const PairManifest& manifest,
                                const std::string& out_dir, const TrainProgressFn& progress) {
  auto s = std::make_unique<TrainState>(cfg);
  fit_loop(*s, manifest, out_dir, progress);
  return s;
}

}  // namespace penh
