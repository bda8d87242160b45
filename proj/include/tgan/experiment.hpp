#pragma once

#include "tgan/evaluation.hpp"
#include "tgan/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tgan {

/// One experiment cell: dataset x novel class x contamination rate x mode,
/// run for each listed seed.
struct ExperimentConfig {
  std::string dataset = "synthetic2d";  // mnist | cifar10 | synthetic2d
  int novel_class = 0;
  double pi = 0.10;
  std::string mode = "transduct";  // transduct | vanilla
  std::vector<std::uint64_t> seeds = {1, 2, 3};

  // training
  int epochs = 0;          // 0: dataset default (synthetic 200, mnist 25, cifar10 50)
  Index batch_size = 64;
  int n_critic = 5;
  double lambda = 10.0;
  double step_size = 0.0;  // 0: dataset default (1e-4 images, 1e-3 synthetic)
  double beta1 = 0.0;
  double beta2 = 0.9;
  bool negative_branch = false;
  Index iters_per_epoch = 0;

  // prior / model
  int latent_dim = 0;  // 0: dataset default (2 synthetic, 128 images)
  double prior_separation = 3.0;
  int conv_base_channels = 32;
  Index mlp_hidden = 64;
  Index latent_critic_hidden = 64;

  // io
  std::string out_dir = "out";
  std::string data_root;  // empty: $TRANSDUCTGAN_DATA
  int checkpoint_every = 0;

  // synthetic2d sizes
  Index synth_n_neg = 2000;
  Index synth_n_unl = 1000;

  void validate() const;
  /// Fills the 0-valued dataset-dependent defaults in place.
  void apply_defaults();
  std::string resolved_data_root() const;
  /// dataset_novelclass_pi_seed artifact prefix.
  std::string run_tag(std::uint64_t seed) const;
};

/// End-to-end cell run: per seed builds the split, trains the selected mode,
/// fits the matching detector, scores the unlabeled set, computes AUROC, and
/// emits grids, metrics, checkpoints and reports under out_dir. A failing
/// seed is recorded as a diagnostic file and skipped; the remaining seeds
/// still run.
std::vector<EvalReport> run_experiment(const ExperimentConfig& cfg);

/// Stage-wise entry points over a saved checkpoint (the checkpoint embeds the
/// configuration it was trained with).
void detect_stage(const std::string& checkpoint_path, const std::string& out_dir,
                  const std::string& data_root);
EvalReport eval_stage(const std::string& checkpoint_path, const std::string& detector_path,
                      const std::string& out_dir, const std::string& data_root);
/// Training only (no detector / evaluation); returns checkpoint paths.
std::vector<std::string> train_stage(const ExperimentConfig& cfg);

void write_config_echo(const ExperimentConfig& cfg, const std::string& path);

}  // namespace tgan
