#include <CLI11.hpp>

#include "tgan/experiment.hpp"

#include <cstdio>
#include <iostream>
#include <vector>

namespace {

void add_experiment_options(CLI::App* sub, tgan::ExperimentConfig& cfg, bool with_mode) {
  sub->add_option("--dataset", cfg.dataset, "mnist | cifar10 | synthetic2d")
      ->check(CLI::IsMember({"mnist", "cifar10", "synthetic2d"}));
  sub->add_option("--novel-class", cfg.novel_class, "held-out class id (image datasets)");
  sub->add_option("--pi", cfg.pi, "contamination rate of the unlabeled set");
  if (with_mode)
    sub->add_option("--mode", cfg.mode, "transduct | vanilla")
        ->check(CLI::IsMember({"transduct", "vanilla"}));
  sub->add_option("--seed", cfg.seeds, "seeds, comma separated")->delimiter(',');
  sub->add_option("--epochs", cfg.epochs, "0 = dataset default");
  sub->add_option("--out", cfg.out_dir, "output directory");
  sub->add_flag("--negative-branch", cfg.negative_branch,
                "also train the optional negative-sample critic");
  sub->add_option("--data", cfg.data_root, "dataset root (default $TRANSDUCTGAN_DATA)");
  sub->add_option("--batch-size", cfg.batch_size);
  sub->add_option("--n-critic", cfg.n_critic);
  sub->add_option("--lambda", cfg.lambda, "gradient penalty coefficient");
  sub->add_option("--step-size", cfg.step_size, "0 = dataset default");
  sub->add_option("--latent-dim", cfg.latent_dim, "0 = dataset default");
  sub->add_option("--iters-per-epoch", cfg.iters_per_epoch, "0 = one pass over x_u");
  sub->add_option("--checkpoint-every", cfg.checkpoint_every, "epochs between checkpoints");
  sub->add_option("--synth-n-neg", cfg.synth_n_neg, "synthetic2d negative pool size");
  sub->add_option("--synth-n-unl", cfg.synth_n_unl, "synthetic2d unlabeled pool size");
  sub->add_option("--conv-base-channels", cfg.conv_base_channels);
  sub->add_option("--mlp-hidden", cfg.mlp_hidden);
}

int count_failures(const std::vector<tgan::EvalReport>& reports, std::size_t expected) {
  return int(expected) - int(reports.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transductgan: transductive novelty detection with adversarially "
               "generated counter-examples"};
  app.require_subcommand(1);

  tgan::ExperimentConfig cfg;

  auto* train = app.add_subcommand("train", "train a model and write checkpoints");
  add_experiment_options(train, cfg, true);

  auto* detect = app.add_subcommand(
      "detect", "fit the detector for a checkpoint and score the unlabeled set");
  std::string ckpt_path, detector_path, stage_out = "out", stage_data;
  detect->add_option("--checkpoint", ckpt_path, "trained checkpoint")->required();
  detect->add_option("--out", stage_out, "output directory");
  detect->add_option("--data", stage_data, "dataset root (default $TRANSDUCTGAN_DATA)");

  auto* eval = app.add_subcommand(
      "eval", "evaluate a checkpoint + detector pair: auroc, grids, report");
  eval->add_option("--checkpoint", ckpt_path, "trained checkpoint")->required();
  eval->add_option("--detector", detector_path, "detector archive")->required();
  eval->add_option("--out", stage_out, "output directory");
  eval->add_option("--data", stage_data, "dataset root (default $TRANSDUCTGAN_DATA)");

  auto* table = app.add_subcommand(
      "reproduce-table", "run the novel-class x contamination grid and emit the "
                         "aggregated results table");
  add_experiment_options(table, cfg, false);
  std::vector<double> pis = {0.05, 0.10, 0.30};
  std::vector<int> classes;
  std::vector<std::string> modes = {"transduct", "vanilla"};
  table->add_option("--pis", pis, "contamination rates")->delimiter(',');
  table->add_option("--classes", classes, "novel classes (default: all)")->delimiter(',');
  table->add_option("--modes", modes, "methods to run")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      const auto paths = tgan::train_stage(cfg);
      return paths.size() == cfg.seeds.size() ? 0 : 1;
    }
    if (detect->parsed()) {
      tgan::detect_stage(ckpt_path, stage_out, stage_data);
      return 0;
    }
    if (eval->parsed()) {
      tgan::eval_stage(ckpt_path, detector_path, stage_out, stage_data);
      return 0;
    }
    // reproduce-table
    if (classes.empty()) {
      if (cfg.dataset == "synthetic2d")
        classes = {cfg.novel_class};
      else
        classes = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    }
    std::vector<tgan::EvalReport> all;
    int failures = 0;
    for (int cls : classes) {
      for (double pi : pis) {
        for (const auto& mode : modes) {
          tgan::ExperimentConfig cell = cfg;
          cell.novel_class = cls;
          cell.pi = pi;
          cell.mode = mode;
          const auto reports = tgan::run_experiment(cell);
          failures += count_failures(reports, cell.seeds.size());
          all.insert(all.end(), reports.begin(), reports.end());
        }
      }
    }
    if (!all.empty())
      tgan::export_results_table(all, cfg.out_dir + "/" + cfg.dataset + "_table.csv");
    std::cout << "table cells: " << all.size() << " runs, " << failures << " failures\n";
    return failures == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
