#include "tgan/experiment.hpp"

#include "tgan/checkpoint.hpp"
#include "tgan/data_pipeline.hpp"
#include "tgan/detector.hpp"
#include "tgan/training.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace tgan {

namespace {

std::string fmt_g(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%g", v);
  return b;
}

std::uint64_t stream_seed(std::uint64_t seed, const char* tag) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char* c = tag; *c; ++c) h = (h ^ std::uint64_t(*c)) * 1099511628211ull;
  std::uint64_t s = seed ^ h;
  return detail::splitmix64(s);
}

bool is_image_dataset(const std::string& d) { return d == "mnist" || d == "cifar10"; }

// --- config <-> checkpoint meta ---------------------------------------------

std::map<std::string, std::string> to_meta(const ExperimentConfig& c, std::uint64_t seed,
                                           const char* scalar) {
  std::map<std::string, std::string> m;
  m["config_version"] = "1";
  m["dataset"] = c.dataset;
  m["novel_class"] = std::to_string(c.novel_class);
  m["pi"] = fmt_g(c.pi);
  m["mode"] = c.mode;
  m["seed"] = std::to_string(seed);
  m["epochs"] = std::to_string(c.epochs);
  m["batch_size"] = std::to_string(c.batch_size);
  m["n_critic"] = std::to_string(c.n_critic);
  m["lambda"] = fmt_g(c.lambda);
  m["step_size"] = fmt_g(c.step_size);
  m["beta1"] = fmt_g(c.beta1);
  m["beta2"] = fmt_g(c.beta2);
  m["negative_branch"] = c.negative_branch ? "1" : "0";
  m["iters_per_epoch"] = std::to_string(c.iters_per_epoch);
  m["latent_dim"] = std::to_string(c.latent_dim);
  m["prior_separation"] = fmt_g(c.prior_separation);
  m["conv_base_channels"] = std::to_string(c.conv_base_channels);
  m["mlp_hidden"] = std::to_string(c.mlp_hidden);
  m["latent_critic_hidden"] = std::to_string(c.latent_critic_hidden);
  m["synth_n_neg"] = std::to_string(c.synth_n_neg);
  m["synth_n_unl"] = std::to_string(c.synth_n_unl);
  m["scalar"] = scalar;
  return m;
}

std::uint64_t config_from_meta(const std::map<std::string, std::string>& m,
                               ExperimentConfig& c) {
  const auto need = [&](const std::string& k) -> const std::string& {
    auto it = m.find(k);
    check_state(it != m.end(), "checkpoint: missing config key " + k);
    return it->second;
  };
  c.dataset = need("dataset");
  c.novel_class = std::stoi(need("novel_class"));
  c.pi = std::stod(need("pi"));
  c.mode = need("mode");
  c.epochs = std::stoi(need("epochs"));
  c.batch_size = std::stol(need("batch_size"));
  c.n_critic = std::stoi(need("n_critic"));
  c.lambda = std::stod(need("lambda"));
  c.step_size = std::stod(need("step_size"));
  c.beta1 = std::stod(need("beta1"));
  c.beta2 = std::stod(need("beta2"));
  c.negative_branch = need("negative_branch") == "1";
  c.iters_per_epoch = std::stol(need("iters_per_epoch"));
  c.latent_dim = std::stoi(need("latent_dim"));
  c.prior_separation = std::stod(need("prior_separation"));
  c.conv_base_channels = std::stoi(need("conv_base_channels"));
  c.mlp_hidden = std::stol(need("mlp_hidden"));
  c.latent_critic_hidden = std::stol(need("latent_critic_hidden"));
  c.synth_n_neg = std::stol(need("synth_n_neg"));
  c.synth_n_unl = std::stol(need("synth_n_unl"));
  c.seeds = {std::stoull(need("seed"))};
  return c.seeds[0];
}

// --- per-scalar pipeline ------------------------------------------------------

template <typename Scalar>
struct SeedRun {
  const ExperimentConfig& cfg;  // defaults already applied
  std::uint64_t seed;
  const LabeledImageStore<Scalar>* store;  // null for synthetic2d

  std::string tag() const { return cfg.run_tag(seed); }
  std::string path(const std::string& suffix) const {
    return cfg.out_dir + "/" + tag() + "_" + suffix;
  }

  ImageShape image_shape() const {
    if (cfg.dataset == "synthetic2d") return {1, 1, 2};
    return store->train.shape;
  }

  PriorConfig prior() const {
    return PriorConfig::symmetric(cfg.latent_dim, cfg.pi, cfg.prior_separation);
  }

  NoveltySplit<Scalar> split() const {
    if (cfg.dataset == "synthetic2d")
      return make_synthetic_2d<Scalar>(cfg.synth_n_neg, cfg.synth_n_unl, cfg.pi, seed);
    return make_novelty_split<Scalar>(*store, cfg.novel_class, cfg.pi, seed);
  }

  NetworkSet<Scalar> nets() const {
    Rng rng(stream_seed(seed, "nets"));
    if (cfg.dataset == "synthetic2d")
      return build_synthetic_nets<Scalar>(cfg.latent_dim, cfg.mlp_hidden,
                                          cfg.negative_branch, rng);
    return build_conv_nets<Scalar>(image_shape(), cfg.latent_dim, cfg.conv_base_channels,
                                   cfg.latent_critic_hidden, cfg.negative_branch, rng);
  }

  TrainConfig<Scalar> tcfg() const {
    TrainConfig<Scalar> t;
    t.batch_size = cfg.batch_size;
    t.n_critic = cfg.n_critic;
    t.lambda = Scalar(cfg.lambda);
    t.pi = cfg.pi;
    t.epochs = cfg.epochs;
    t.iters_per_epoch = cfg.iters_per_epoch;
    t.optimizer = AdamConfig{cfg.step_size, cfg.beta1, cfg.beta2, 1e-8};
    t.seed = seed;
    t.negative_branch_enabled = cfg.negative_branch;
    t.validate();
    return t;
  }

  void save_checkpoint(NetworkSet<Scalar>& n, const std::string& file) const {
    Archive a;
    a.meta = to_meta(cfg, seed, sizeof(Scalar) == 4 ? "f32" : "f64");
    // the imposed prior travels with the parameters
    std::ostringstream mu_n, mu_p, s_n, s_p;
    const PriorConfig p = prior();
    for (Index i = 0; i < p.latent_dim; ++i) {
      mu_n << (i ? " " : "") << fmt_g(p.mu_n(i));
      mu_p << (i ? " " : "") << fmt_g(p.mu_p(i));
      s_n << (i ? " " : "") << fmt_g(p.sigma_n(i));
      s_p << (i ? " " : "") << fmt_g(p.sigma_p(i));
    }
    a.meta["prior_mu_n"] = mu_n.str();
    a.meta["prior_mu_p"] = mu_p.str();
    a.meta["prior_sigma_n"] = s_n.str();
    a.meta["prior_sigma_p"] = s_p.str();
    if (cfg.mode == "transduct") {
      put_network_set(a, n);
    } else {
      put_net(a, "generator", n.generator.net);
      put_net(a, "d_xu", n.d_xu.net);
    }
    a.save(file);
  }

  void load_checkpoint(const Archive& a, NetworkSet<Scalar>& n) const {
    if (cfg.mode == "transduct") {
      get_network_set(a, n);
    } else {
      get_net(a, "generator", n.generator.net);
      get_net(a, "d_xu", n.d_xu.net);
    }
  }

  // training stage; returns the checkpoint path
  std::string train(NetworkSet<Scalar>& n, const NoveltySplit<Scalar>& sp,
                    EvalReport& report) const {
    const TrainConfig<Scalar> t = tcfg();
    const PriorConfig p = prior();
    Rng rng(stream_seed(seed, "train"));

    std::ofstream metrics(path("metrics.csv"));
    check_state(bool(metrics), "cannot write metrics csv");
    const bool vanilla = cfg.mode == "vanilla";
    if (vanilla)
      metrics << "iteration,adv_g,d_xu\n";
    else
      metrics << "iteration,rec_u,reg_u,d_zu,rec_n,reg_n,d_zn,adv_g,d_xu,adv_g_neg,d_xn\n";
    char line[512];
    IterationSink sink = [&](long it, const PhaseLosses& ph) {
      if (vanilla) {
        std::snprintf(line, sizeof line, "%ld,%.6g,%.6g\n", it, ph.adv_g, ph.d_xu);
      } else {
        std::snprintf(line, sizeof line,
                      "%ld,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n", it,
                      ph.rec_u, ph.reg_u, ph.d_zu, ph.rec_n, ph.reg_n, ph.d_zn, ph.adv_g,
                      ph.d_xu, ph.adv_g_neg, ph.d_xn);
      }
      metrics << line;
    };

    EpochMetrics last{};
    if (vanilla) {
      VanillaState<Scalar> state(t.optimizer);
      Vector<double> mu = Vector<double>::Zero(cfg.latent_dim);
      Vector<double> sigma = Vector<double>::Ones(cfg.latent_dim);
      for (int e = 0; e < t.epochs; ++e) {
        last = vanilla_epoch(n.generator, n.d_xu, sp.x_n(), sp.x_u(), mu, sigma, t, state,
                             rng, e, sink);
        if (cfg.checkpoint_every > 0 && (e + 1) % cfg.checkpoint_every == 0 &&
            e + 1 < t.epochs)
          save_checkpoint(n, path("checkpoint_ep" + std::to_string(e + 1) + ".tgc"));
      }
      report.loss_summary = {{"adv_g", last.mean.adv_g}, {"d_xu", last.mean.d_xu}};
    } else {
      TrainerState<Scalar> state(t.optimizer);
      for (int e = 0; e < t.epochs; ++e) {
        last = transduct_epoch(n, sp.x_n(), sp.x_u(), p, t, state, rng, e, sink);
        if (cfg.checkpoint_every > 0 && (e + 1) % cfg.checkpoint_every == 0 &&
            e + 1 < t.epochs)
          save_checkpoint(n, path("checkpoint_ep" + std::to_string(e + 1) + ".tgc"));
      }
      report.loss_summary = {{"rec_u", last.mean.rec_u}, {"reg_u", last.mean.reg_u},
                             {"d_zu", last.mean.d_zu},   {"rec_n", last.mean.rec_n},
                             {"reg_n", last.mean.reg_n}, {"d_zn", last.mean.d_zn},
                             {"adv_g", last.mean.adv_g}, {"d_xu", last.mean.d_xu}};
      if (cfg.negative_branch) {
        report.loss_summary.push_back({"adv_g_neg", last.mean.adv_g_neg});
        report.loss_summary.push_back({"d_xn", last.mean.d_xn});
      }
    }
    const std::string ckpt = path("checkpoint.tgc");
    save_checkpoint(n, ckpt);
    report.artifact_paths.push_back(ckpt);
    report.artifact_paths.push_back(path("metrics.csv"));
    return ckpt;
  }

  DetectorModel fit_detector(NetworkSet<Scalar>& n, const NoveltySplit<Scalar>& sp) const {
    Rng rng(stream_seed(seed, "detector"));
    if (cfg.mode == "vanilla") {
      Vector<double> mu = Vector<double>::Zero(cfg.latent_dim);
      Vector<double> sigma = Vector<double>::Ones(cfg.latent_dim);
      return fit_vanilla_detector(n.generator, sp.x_n(), mu, sigma, rng);
    }
    return fit_latent_detector(n, sp.x_n(), prior(), rng);
  }

  Vector<double> score(const DetectorModel& model, NetworkSet<Scalar>& n,
                       const NoveltySplit<Scalar>& sp) const {
    if (cfg.mode == "vanilla") return score_batch<Scalar>(model, nullptr, sp.x_u());
    return score_batch(model, &n.encoder, sp.x_u());
  }

  void write_scores(const Vector<double>& s, const std::string& file) const {
    std::ofstream out(file);
    check_state(bool(out), "cannot write " + file);
    out << "row,score\n";
    char b[64];
    for (Index i = 0; i < s.size(); ++i) {
      std::snprintf(b, sizeof b, "%lld,%.9g\n", (long long)i, s(i));
      out << b;
    }
  }

  // evaluation-stage artifacts: grids + per-seed report
  void emit_grids_and_report(NetworkSet<Scalar>& n, const NoveltySplit<Scalar>& sp,
                             EvalReport& report) const {
    // real novel images, ground truth used here in the evaluation stage only
    const auto& labels = sp.hidden_labels(EvalAccess::key());
    std::vector<Index> novel_rows;
    for (Index i = 0; i < Index(labels.size()); ++i)
      if (labels[std::size_t(i)] == +1) novel_rows.push_back(i);
    const auto grid_side = [](Index count) {
      int k = int(std::floor(std::sqrt(double(count))));
      return std::max(1, std::min(8, k));
    };
    if (image_shape().channels == 1 || image_shape().channels == 3) {
      const int kr = grid_side(Index(novel_rows.size()));
      ImageBatch<Scalar> real{Matrix<Scalar>(Index(kr) * kr, sp.x_u().data.cols()),
                              sp.x_u().shape};
      for (Index i = 0; i < Index(kr) * kr; ++i)
        real.data.row(i) = sp.x_u().data.row(novel_rows[std::size_t(i)]);
      export_image_grid(real, kr, kr, path("real_novel.png"));
      report.artifact_paths.push_back(path("real_novel.png"));

      Rng grng(stream_seed(seed, "grid"));
      const Index want = 64;
      Matrix<Scalar> z;
      if (cfg.mode == "vanilla") {
        z = sample_gaussian<Scalar>(Vector<double>::Zero(cfg.latent_dim),
                                    Vector<double>::Ones(cfg.latent_dim), want, grng);
      } else {
        z = sample_positive<Scalar>(prior(), want, grng).codes;
      }
      ImageBatch<Scalar> fake{n.generator.net.forward(z), n.generator.output_shape};
      const int kf = grid_side(want);
      export_image_grid(fake, kf, kf, path("fake_novel.png"));
      report.artifact_paths.push_back(path("fake_novel.png"));
    }

    std::ofstream rep(path("report.txt"));
    check_state(bool(rep), "cannot write report");
    rep << "dataset " << report.dataset << "\n"
        << "mode " << report.mode << "\n"
        << "novel_class " << report.novel_class << "\n"
        << "pi_requested " << fmt_g(report.pi_requested) << "\n"
        << "pi_actual " << fmt_g(report.pi_actual) << "\n"
        << "seed " << report.seed << "\n"
        << "auroc " << fmt_g(report.auroc) << "\n";
    for (const auto& [k, v] : report.loss_summary) rep << "loss_" << k << " " << fmt_g(v) << "\n";
    report.artifact_paths.push_back(path("report.txt"));
  }

  EvalReport run_all() const {
    EvalReport report;
    report.dataset = cfg.dataset;
    report.mode = cfg.mode;
    report.novel_class = cfg.novel_class;
    report.pi_requested = cfg.pi;
    report.seed = seed;

    NoveltySplit<Scalar> sp = split();
    report.pi_actual = sp.pi_actual();
    save_split_manifest(sp, path("split.txt"));
    report.artifact_paths.push_back(path("split.txt"));

    NetworkSet<Scalar> n = nets();
    train(n, sp, report);

    DetectorModel model = fit_detector(n, sp);
    {
      Archive da;
      da.meta = to_meta(cfg, seed, sizeof(Scalar) == 4 ? "f32" : "f64");
      put_detector(da, model);
      da.save(path("detector.tgc"));
      report.artifact_paths.push_back(path("detector.tgc"));
    }
    Vector<double> s = score(model, n, sp);
    write_scores(s, path("scores.csv"));
    report.artifact_paths.push_back(path("scores.csv"));

    report.auroc = auroc_of_split(sp, s);
    emit_grids_and_report(n, sp, report);
    return report;
  }
};

template <typename Scalar>
std::vector<EvalReport> run_cell(const ExperimentConfig& cfg,
                                 const LabeledImageStore<Scalar>* store) {
  std::vector<EvalReport> reports;
  for (std::uint64_t seed : cfg.seeds) {
    SeedRun<Scalar> run{cfg, seed, store};
    try {
      reports.push_back(run.run_all());
      std::cout << "[" << run.tag() << "] auroc " << fmt_g(reports.back().auroc) << "\n";
    } catch (const std::exception& e) {
      std::ofstream err(cfg.out_dir + "/" + run.tag() + "_error.txt");
      err << e.what() << "\n";
      std::cerr << "[" << run.tag() << "] failed: " << e.what() << "\n";
    }
  }
  if (!reports.empty())
    export_results_table(reports, cfg.out_dir + "/" + cfg.dataset + "_" +
                                      std::to_string(cfg.novel_class) + "_" +
                                      fmt_g(cfg.pi) + "_summary.csv");
  return reports;
}

template <typename Scalar>
LabeledImageStore<Scalar> load_store(const ExperimentConfig& cfg) {
  const std::string root = cfg.resolved_data_root();
  check_arg(!root.empty(),
            "dataset root not set: pass --data or export TRANSDUCTGAN_DATA");
  if (cfg.dataset == "mnist") return load_mnist<Scalar>(root + "/mnist");
  return load_cifar10<Scalar>(root + "/cifar10");
}

}  // namespace

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  check_arg(dataset == "mnist" || dataset == "cifar10" || dataset == "synthetic2d",
            "config: unknown dataset " + dataset);
  check_arg(mode == "transduct" || mode == "vanilla", "config: unknown mode " + mode);
  check_arg(!seeds.empty(), "config: seeds must be non-empty");
  check_arg(pi > 0.0 && pi < 1.0, "config: pi must lie in (0, 1)");
  if (is_image_dataset(dataset)) {
    const int classes = 10;
    check_arg(novel_class >= 0 && novel_class < classes,
              "config: novel_class out of range");
  }
}

void ExperimentConfig::apply_defaults() {
  const bool synthetic = dataset == "synthetic2d";
  if (epochs == 0) epochs = synthetic ? 200 : (dataset == "mnist" ? 25 : 50);
  if (latent_dim == 0) latent_dim = synthetic ? 2 : 128;
  if (step_size == 0.0) step_size = synthetic ? 1e-3 : 1e-4;
}

std::string ExperimentConfig::resolved_data_root() const {
  if (!data_root.empty()) return data_root;
  const char* env = std::getenv("TRANSDUCTGAN_DATA");
  return env ? env : "";
}

std::string ExperimentConfig::run_tag(std::uint64_t seed) const {
  return dataset + "_" + std::to_string(novel_class) + "_" + fmt_g(pi) + "_" +
         std::to_string(seed) + "_" + mode;
}

std::vector<EvalReport> run_experiment(const ExperimentConfig& raw) {
  ExperimentConfig cfg = raw;
  cfg.apply_defaults();
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  write_config_echo(cfg, cfg.out_dir + "/" + cfg.dataset + "_" +
                             std::to_string(cfg.novel_class) + "_" + fmt_g(cfg.pi) + "_" +
                             cfg.mode + "_config.ini");

  if (cfg.dataset == "synthetic2d") return run_cell<double>(cfg, nullptr);
  const LabeledImageStore<float> store = load_store<float>(cfg);
  return run_cell<float>(cfg, &store);
}

std::vector<std::string> train_stage(const ExperimentConfig& raw) {
  ExperimentConfig cfg = raw;
  cfg.apply_defaults();
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  write_config_echo(cfg, cfg.out_dir + "/" + cfg.dataset + "_" +
                             std::to_string(cfg.novel_class) + "_" + fmt_g(cfg.pi) + "_" +
                             cfg.mode + "_config.ini");

  std::vector<std::string> paths;
  auto run_typed = [&](auto scalar_tag, auto* store) {
    using Scalar = decltype(scalar_tag);
    for (std::uint64_t seed : cfg.seeds) {
      SeedRun<Scalar> run{cfg, seed, store};
      try {
        NoveltySplit<Scalar> sp = run.split();
        save_split_manifest(sp, run.path("split.txt"));
        NetworkSet<Scalar> n = run.nets();
        EvalReport scratch;
        scratch.dataset = cfg.dataset;
        paths.push_back(run.train(n, sp, scratch));
        std::cout << "[" << run.tag() << "] checkpoint " << paths.back() << "\n";
      } catch (const std::exception& e) {
        std::ofstream err(cfg.out_dir + "/" + run.tag() + "_error.txt");
        err << e.what() << "\n";
        std::cerr << "[" << run.tag() << "] failed: " << e.what() << "\n";
      }
    }
  };
  if (cfg.dataset == "synthetic2d") {
    run_typed(double{}, (const LabeledImageStore<double>*)nullptr);
  } else {
    const LabeledImageStore<float> store = load_store<float>(cfg);
    run_typed(float{}, &store);
  }
  return paths;
}

namespace {

template <typename Scalar>
EvalReport stage_over_checkpoint(const Archive& a, const ExperimentConfig& cfg,
                                 std::uint64_t seed, const std::string& detector_path,
                                 bool do_eval) {
  const LabeledImageStore<Scalar> store_holder =
      is_image_dataset(cfg.dataset) ? load_store<Scalar>(cfg) : LabeledImageStore<Scalar>{};
  SeedRun<Scalar> run{cfg, seed, is_image_dataset(cfg.dataset) ? &store_holder : nullptr};

  NoveltySplit<Scalar> sp = run.split();
  NetworkSet<Scalar> n = run.nets();
  run.load_checkpoint(a, n);

  EvalReport report;
  report.dataset = cfg.dataset;
  report.mode = cfg.mode;
  report.novel_class = cfg.novel_class;
  report.pi_requested = cfg.pi;
  report.pi_actual = sp.pi_actual();
  report.seed = seed;

  if (!do_eval) {
    DetectorModel model = run.fit_detector(n, sp);
    Archive da;
    da.meta = to_meta(cfg, seed, sizeof(Scalar) == 4 ? "f32" : "f64");
    put_detector(da, model);
    da.save(run.path("detector.tgc"));
    Vector<double> s = run.score(model, n, sp);
    run.write_scores(s, run.path("scores.csv"));
    std::cout << "[" << run.tag() << "] detector " << run.path("detector.tgc") << "\n";
    return report;
  }

  DetectorModel model = get_detector(Archive::load(detector_path));
  Vector<double> s = run.score(model, n, sp);
  run.write_scores(s, run.path("scores.csv"));
  report.auroc = auroc_of_split(sp, s);
  run.emit_grids_and_report(n, sp, report);
  std::cout << "[" << run.tag() << "] auroc " << fmt_g(report.auroc) << "\n";
  return report;
}

std::pair<ExperimentConfig, std::uint64_t> config_of_checkpoint(const Archive& a,
                                                                const std::string& out_dir,
                                                                const std::string& data_root) {
  ExperimentConfig cfg;
  const std::uint64_t seed = config_from_meta(a.meta, cfg);
  cfg.out_dir = out_dir;
  cfg.data_root = data_root;
  cfg.apply_defaults();
  cfg.validate();
  return {cfg, seed};
}

}  // namespace

void detect_stage(const std::string& checkpoint_path, const std::string& out_dir,
                  const std::string& data_root) {
  const Archive a = Archive::load(checkpoint_path);
  auto [cfg, seed] = config_of_checkpoint(a, out_dir, data_root);
  std::filesystem::create_directories(cfg.out_dir);
  if (a.meta.at("scalar") == "f64")
    stage_over_checkpoint<double>(a, cfg, seed, "", false);
  else
    stage_over_checkpoint<float>(a, cfg, seed, "", false);
}

EvalReport eval_stage(const std::string& checkpoint_path, const std::string& detector_path,
                      const std::string& out_dir, const std::string& data_root) {
  const Archive a = Archive::load(checkpoint_path);
  auto [cfg, seed] = config_of_checkpoint(a, out_dir, data_root);
  std::filesystem::create_directories(cfg.out_dir);
  if (a.meta.at("scalar") == "f64")
    return stage_over_checkpoint<double>(a, cfg, seed, detector_path, true);
  return stage_over_checkpoint<float>(a, cfg, seed, detector_path, true);
}

void write_config_echo(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  check_state(bool(out), "cannot write config echo " + path);
  out << "[experiment]\n"
      << "dataset = " << cfg.dataset << "\n"
      << "novel_class = " << cfg.novel_class << "\n"
      << "pi = " << fmt_g(cfg.pi) << "\n"
      << "mode = " << cfg.mode << "\n"
      << "out_dir = " << cfg.out_dir << "\n"
      << "checkpoint_every = " << cfg.checkpoint_every << "\n";
  out << "seeds =";
  for (auto s : cfg.seeds) out << " " << s;
  out << "\n";
  if (cfg.dataset == "synthetic2d")
    out << "synth_n_neg = " << cfg.synth_n_neg << "\n"
        << "synth_n_unl = " << cfg.synth_n_unl << "\n";
  out << "\n[train]\n"
      << "epochs = " << cfg.epochs << "\n"
      << "batch_size = " << cfg.batch_size << "\n"
      << "n_critic = " << cfg.n_critic << "\n"
      << "lambda = " << fmt_g(cfg.lambda) << "\n"
      << "step_size = " << fmt_g(cfg.step_size) << "\n"
      << "beta1 = " << fmt_g(cfg.beta1) << "\n"
      << "beta2 = " << fmt_g(cfg.beta2) << "\n"
      << "negative_branch = " << (cfg.negative_branch ? 1 : 0) << "\n"
      << "iters_per_epoch = " << cfg.iters_per_epoch << "\n"
      << "conv_base_channels = " << cfg.conv_base_channels << "\n"
      << "mlp_hidden = " << cfg.mlp_hidden << "\n"
      << "latent_critic_hidden = " << cfg.latent_critic_hidden << "\n";
  const PriorConfig p = PriorConfig::symmetric(
      cfg.latent_dim ? cfg.latent_dim : 2, cfg.pi, cfg.prior_separation);
  out << "\n[prior]\n"
      << "latent_dim = " << p.latent_dim << "\n"
      << "pi = " << fmt_g(p.pi) << "\n";
  const auto vec = [&](const char* name, const Vector<double>& v) {
    out << name << " =";
    for (Index i = 0; i < v.size(); ++i) out << " " << fmt_g(v(i));
    out << "\n";
  };
  vec("mu_n", p.mu_n);
  vec("mu_p", p.mu_p);
  vec("sigma_n", p.sigma_n);
  vec("sigma_p", p.sigma_p);
  check_state(bool(out), "write failure on " + path);
}

}  // namespace tgan
