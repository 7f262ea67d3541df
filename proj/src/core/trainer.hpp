#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

#include "core/dataset.hpp"
#include "core/discriminator.hpp"
#include "core/features.hpp"
#include "core/generator.hpp"
#include "core/losses.hpp"
#include "core/nn/adam.hpp"
#include "core/rng.hpp"

namespace penh {

// Ablation toggles. Base = everything off; the full model = everything on.
struct NetVariant {
  bool use_residual_blocks = true;
  bool use_gates = true;
  bool use_feature_loss = true;
  bool use_adversarial = true;
};

struct TrainConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.99;
  int epochs = 100;
  int batch_size = 24;
  int crop_side = 128;  // training pairs are resized to this square
  LossWeights weights;
  NetVariant variant;
  std::uint64_t seed = 1;
  int checkpoint_every = 0;  // steps between periodic checkpoints; 0 = final only
  std::vector<int> schedule = {64, 96, 128, 196};
  std::string feature_weights = FeatureExtractor::kDefaultWeights;
  bool deterministic = false;  // pins the wallclock column so logs are comparable
};

struct StepResult {
  LossBreakdown losses;
  double d_loss = 0.0;
};

// Round-trippable config serialization (also the checkpoint header snapshot).
nlohmann::json config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const nlohmann::json& j);

// Owns the networks and both optimizers. Not movable: the optimizers hold
// pointers into the networks' parameter storage.
struct TrainState {
  explicit TrainState(const TrainConfig& cfg);
  TrainState(const TrainState&) = delete;
  TrainState& operator=(const TrainState&) = delete;

  TrainConfig config;
  Generator gen;
  // Never constructed when the variant disables them, so an ablated run
  // cannot depend on them even accidentally.
  std::unique_ptr<Discriminator> disc;
  std::unique_ptr<FeatureExtractor> psi;
  std::unique_ptr<Adam> g_opt, d_opt;
  Rng rng;  // reserved for stochastic augmentation; checkpointed for resume
  long long step = 0;
};

// One discriminator update (real = (reference, reference), fake =
// (generated-detached, reference)) followed by one generator update on the
// combined objective. Throws DivergenceError before applying an update whose
// losses are non-finite or above the divergence threshold.
StepResult train_step(TrainState& state, const Tensor& degraded, const Tensor& reference);

void save_checkpoint(const TrainState& state, const std::string& path);
std::unique_ptr<TrainState> load_checkpoint(const std::string& path);

// Deterministic batch order for one epoch: a keyed shuffle of the train
// entries, a pure function of (seed, epoch) so resume never replays or skips.
std::vector<int> epoch_order(const PairManifest& manifest, std::uint64_t seed, long long epoch);

using TrainProgressFn = std::function<void(long long step, long long total, const StepResult&)>;

// Runs state.step to the configured end, appending to <out_dir>/train_log.csv
// (step,l_r,l_rfl,l_g,l_p,d_loss,wallclock) and writing periodic checkpoints
// checkpoint_NNNNNN.ckpt plus checkpoint_final.ckpt. On divergence the last
// good state is saved as checkpoint_last_good.ckpt and the error rethrown.
// progress, when set, is called after every applied step.
void fit_loop(TrainState& state, const PairManifest& manifest, const std::string& out_dir,
              const TrainProgressFn& progress = nullptr);

std::unique_ptr<TrainState> fit(const TrainConfig& cfg, const PairManifest& manifest,
                                const std::string& out_dir,
                                const TrainProgressFn& progress = nullptr);

}  // namespace penh
