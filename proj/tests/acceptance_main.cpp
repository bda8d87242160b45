// Acceptance suite: runs every gate criterion and prints one PASS/FAIL line
// per criterion. Dataset-bound criteria run when the datasets are present
// under $TRANSDUCTGAN_DATA (or --data); otherwise they are reported as SKIP
// with the reason. Exit code is nonzero iff any executed criterion fails.

#include "oracles.hpp"
#include "tgan/checkpoint.hpp"
#include "tgan/data_pipeline.hpp"
#include "tgan/detector.hpp"
#include "tgan/experiment.hpp"
#include "tgan/training.hpp"

#include <chrono>
#include <cstring>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

using namespace tgan;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail = "") {
  std::printf("%-58s %s%s%s\n", name.c_str(), pass ? "PASS" : "FAIL",
              detail.empty() ? "" : "  ", detail.c_str());
  if (!pass) ++g_failures;
}

void report_skip(const std::string& name, const std::string& reason) {
  std::printf("%-58s SKIP  %s\n", name.c_str(), reason.c_str());
}

std::string data_root_or_empty(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--data") return argv[i + 1];
  const char* env = std::getenv("TRANSDUCTGAN_DATA");
  return env ? env : "";
}

bool dataset_present(const std::string& root, const std::string& name) {
  if (root.empty()) return false;
  if (name == "mnist") return fs::exists(fs::path(root) / "mnist" / "train-images-idx3-ubyte");
  return fs::exists(fs::path(root) / "cifar10" / "data_batch_1.bin");
}

double mean_of(const std::vector<EvalReport>& reports) {
  double acc = 0;
  for (const auto& r : reports) acc += r.auroc;
  return acc / double(reports.size());
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4f", v);
  return b;
}

// --- criterion 1: exact property suite --------------------------------------

Critic<double> linear_critic(Index dim, const Vector<double>& w, double b) {
  Rng rng(1);
  Critic<double> c;
  c.domain = CriticDomain::image;
  c.input_dim = dim;
  c.net.emplace<Dense<double>>(dim, 1, 1.0, rng);
  auto ps = c.net.params();
  *ps[0].value = w.transpose();
  (*ps[1].value)(0, 0) = b;
  return c;
}

void criterion_gradient_penalty() {
  Rng rng(3);
  Matrix<double> real(6, 3), fake(6, 3);
  rng.fill_normal(real);
  rng.fill_normal(fake);
  Vector<double> unit(3);
  unit << 1 / std::sqrt(3.0), 1 / std::sqrt(3.0), 1 / std::sqrt(3.0);
  auto c_unit = linear_critic(3, unit, 0.5);
  const double p0 = gradient_penalty(c_unit, real, fake, 10.0, rng);
  Vector<double> slope2 = Vector<double>::Zero(3);
  slope2(0) = 2.0;
  auto c2 = linear_critic(3, slope2, 0.0);
  const double p1 = gradient_penalty(c2, real, fake, 10.0, rng);
  auto c_const = linear_critic(3, Vector<double>::Zero(3), 7.0);
  const double p2 = gradient_penalty(c_const, real, fake, 10.0, rng);
  const bool ok = std::abs(p0 - 0.0) < 1e-6 && std::abs(p1 - 10.0) < 1e-6 &&
                  std::abs(p2 - 10.0) < 1e-6;
  report("1a gradient_penalty analytic cases (1e-6)", ok,
         fmt(p0) + " " + fmt(p1) + " " + fmt(p2));
}

void criterion_reconstruction() {
  Matrix<double> x(1, 2), xh(1, 2);
  x << 0, 0;
  xh << 3, 4;
  Matrix<double> a(2, 2), b(2, 2);
  a << 0, 0, 0, 0;
  b << 3, 4, 5, 12;
  const double v0 = reconstruction_loss(x, x);
  const double v1 = reconstruction_loss(x, xh);
  const double v2 = reconstruction_loss(a, b);
  const bool ok =
      std::abs(v0) < 1e-6 && std::abs(v1 - 5.0) < 1e-6 && std::abs(v2 - 9.0) < 1e-6;
  report("1b reconstruction_loss hand cases (1e-6)", ok,
         fmt(v0) + " " + fmt(v1) + " " + fmt(v2));
}

void criterion_mixer() {
  Rng nrng(3);
  auto nets = build_synthetic_nets<double>(2, 8, false, nrng);
  auto prior = PriorConfig::symmetric(2, 0.3);
  ImageBatch<double> pool{Matrix<double>(100, 2), {1, 1, 2}};
  Rng prng(5);
  prng.fill_normal(pool.data);
  Rng rng(11);
  bool ok = true;
  ok &= build_contaminated_batch(pool, nets.generator, prior, 64, 0.10, rng).fake_count == 6;
  ok &= build_contaminated_batch(pool, nets.generator, prior, 10, 0.30, rng).fake_count == 3;
  bool guarded = false;
  try {
    build_contaminated_batch(pool, nets.generator, prior, 10, 0.05, rng);
  } catch (const std::invalid_argument&) {
    guarded = true;
  }
  report("1c contaminated-batch counts and zero-fake guard", ok && guarded);
}

void criterion_auroc_oracle() {
  Rng rng(2024);
  bool ok = true;
  for (int rep = 0; rep < 100 && ok; ++rep) {
    const Index n = Index(2 + rng.below(199));
    std::vector<double> scores(static_cast<std::size_t>(n));
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      scores[std::size_t(i)] = double(rng.below(8)) / 4.0;  // ties guaranteed
      labels[std::size_t(i)] = rng.uniform() < 0.5 ? +1 : -1;
    }
    labels[0] = +1;
    labels[std::size_t(n - 1)] = -1;
    Vector<double> s(n);
    for (Index i = 0; i < n; ++i) s(i) = scores[std::size_t(i)];
    ok &= std::abs(auroc(s, labels) - oracles::pairwise_auroc(scores, labels)) < 1e-12;
  }
  report("1d auroc matches the O(n^2) pairwise oracle (100 runs)", ok);
}

void criterion_prior_moments() {
  auto cfg = PriorConfig::symmetric(2, 0.25);
  Rng rng(42);
  const Index n = 100000;
  auto neg = sample_negative<double>(cfg, n, rng);
  auto unl = sample_unlabeled<double>(cfg, n, rng);
  const double se1 = 1.0 / std::sqrt(double(n));
  bool ok = std::abs(neg.codes.col(0).mean() - (-3.0)) < 3 * se1 &&
            std::abs(neg.codes.col(1).mean()) < 3 * se1;
  const double mix_mean = 0.25 * 3.0 + 0.75 * (-3.0);
  const double mix_var = 1.0 + 0.25 * 0.75 * 36.0;
  ok &= std::abs(unl.codes.col(0).mean() - mix_mean) < 3 * std::sqrt(mix_var / double(n));
  report("1e prior sampler moments within 3 standard errors (100k)", ok);
}

void criterion_phase_accounting() {
  auto split = make_synthetic_2d<double>(256, 128, 0.3, 7);
  Rng nrng(8);
  auto nets = build_synthetic_nets<double>(2, 16, true, nrng);
  TrainConfig<double> cfg;
  cfg.batch_size = 16;
  cfg.n_critic = 5;
  cfg.pi = 0.3;
  cfg.epochs = 1;
  cfg.iters_per_epoch = 1;
  cfg.negative_branch_enabled = true;
  TrainerState<double> state(cfg.optimizer);
  Rng rng(21);
  const double fp_dxn_before = parameter_fingerprint(nets.d_xn->net);
  transduct_epoch(nets, split.x_n(), split.x_u(), PriorConfig::symmetric(2, 0.3), cfg,
                  state, rng);
  bool ok = state.adam_dzu.steps() == 5 && state.adam_dzn.steps() == 5 &&
            state.adam_dxu.steps() == 5 && state.adam_dxn.steps() == 5 &&
            state.adam_g.steps() == 4 && state.adam_e.steps() == 4;
  ok &= parameter_fingerprint(nets.d_xn->net) != fp_dxn_before;
  report("1f phase accounting: n_critic updates per critic per iteration", ok);
}

void criterion_checkpoint_roundtrip(const fs::path& tmp) {
  Rng rng(3);
  auto nets = build_conv_nets<float>({1, 28, 28}, 8, 4, 16, false, rng);
  Matrix<float> z(3, 8);
  Rng drng(5);
  drng.fill_normal(z);
  const Matrix<float> before = nets.generator.net.forward(z);
  Archive a;
  put_network_set(a, nets);
  const std::string p = (tmp / "roundtrip.tgc").string();
  a.save(p);
  Rng rng2(99);
  auto other = build_conv_nets<float>({1, 28, 28}, 8, 4, 16, false, rng2);
  get_network_set(Archive::load(p), other);
  const bool ok = other.generator.net.forward(z) == before;
  report("1g checkpoint round-trip is bit-exact", ok);
}

// --- criterion 2: synthetic end-to-end ---------------------------------------

void criterion_synthetic_e2e(const fs::path& tmp) {
  ExperimentConfig cfg;
  cfg.dataset = "synthetic2d";
  cfg.pi = 0.30;
  cfg.mode = "transduct";
  cfg.seeds = {1, 2, 3};
  cfg.out_dir = (tmp / "synthetic").string();
  const auto t0 = std::chrono::steady_clock::now();
  const auto reports = run_experiment(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string detail = "aurocs:";
  for (const auto& r : reports) detail += " " + fmt(r.auroc);
  const double mean = reports.empty() ? 0.0 : mean_of(reports);
  detail += " mean " + fmt(mean) + ", " + fmt(secs / 3.0) + " s/seed";
  const bool ok = reports.size() == 3 && mean >= 0.95 && secs <= 3 * 300.0;
  report("2  synthetic-2D transduct, 3 seeds, mean AUROC >= 0.95", ok, detail);
}

void criterion_energy_distance() {
  // one direct training run; the encoded negatives must end nearer the
  // negative prior mode than the positive one in energy distance
  auto split = make_synthetic_2d<double>(2000, 1000, 0.3, 5);
  auto prior = PriorConfig::symmetric(2, 0.3);
  Rng nrng(6);
  auto nets = build_synthetic_nets<double>(2, 64, false, nrng);
  TrainConfig<double> cfg;
  cfg.batch_size = 64;
  cfg.pi = 0.3;
  cfg.epochs = 60;
  cfg.optimizer.step_size = 1e-3;
  TrainerState<double> state(cfg.optimizer);
  Rng rng(7);
  for (int e = 0; e < cfg.epochs; ++e)
    transduct_epoch(nets, split.x_n(), split.x_u(), prior, cfg, state, rng, e);

  Matrix<double> codes = nets.encoder.net.forward(split.x_n().data);
  Rng prng(8);
  auto ref_n = sample_negative<double>(prior, codes.rows(), prng);
  auto ref_p = sample_positive<double>(prior, codes.rows(), prng);
  const double d_n = oracles::energy_distance(codes, ref_n.codes);
  const double d_p = oracles::energy_distance(codes, ref_p.codes);
  report("2b encoded negatives match the negative prior (energy dist)", d_n < d_p,
         fmt(d_n) + " vs " + fmt(d_p));
}

void criterion_run_determinism(const fs::path& tmp) {
  auto run = [&](const std::string& dir) {
    ExperimentConfig cfg;
    cfg.dataset = "synthetic2d";
    cfg.pi = 0.30;
    cfg.mode = "transduct";
    cfg.seeds = {11};
    cfg.epochs = 3;
    cfg.out_dir = (tmp / dir).string();
    auto r = run_experiment(cfg);
    std::ifstream f(cfg.out_dir + "/" + cfg.run_tag(11) + "_scores.csv");
    std::stringstream ss;
    ss << f.rdbuf();
    return std::pair{r.empty() ? -1.0 : r[0].auroc, ss.str()};
  };
  auto a = run("det_a");
  auto b = run("det_b");
  const bool ok = a.first == b.first && !a.second.empty() && a.second == b.second;
  report("2c rerun with identical config gives identical artifacts", ok);
}

// --- criteria 3-5: dataset-bound reproductions -------------------------------

std::vector<EvalReport> run_mnist_cell(const std::string& root, double pi,
                                       const std::string& mode, const fs::path& tmp,
                                       int epochs) {
  ExperimentConfig cfg;
  cfg.dataset = "mnist";
  cfg.novel_class = 0;
  cfg.pi = pi;
  cfg.mode = mode;
  cfg.seeds = {1, 2, 3};
  cfg.epochs = epochs;
  cfg.data_root = root;
  cfg.out_dir = (tmp / ("mnist_" + mode + "_" + fmt(pi))).string();
  return run_experiment(cfg);
}

void criteria_mnist(const std::string& root, const fs::path& tmp) {
  if (!dataset_present(root, "mnist")) {
    report_skip("3  MNIST novel '0', pi 0.10, mean AUROC >= 0.95",
                "dataset not found under " + (root.empty() ? "$TRANSDUCTGAN_DATA" : root));
    report_skip("4  MNIST monotonicity across pi (0.05/0.10/0.30)", "dataset not found");
    return;
  }
  const int epochs = 0;  // dataset default
  const auto r10 = run_mnist_cell(root, 0.10, "transduct", tmp, epochs);
  const double m10 = r10.empty() ? 0.0 : mean_of(r10);
  report("3  MNIST novel '0', pi 0.10, mean AUROC >= 0.95",
         r10.size() == 3 && m10 >= 0.95, "mean " + fmt(m10));

  const auto r05 = run_mnist_cell(root, 0.05, "transduct", tmp, epochs);
  const auto r30 = run_mnist_cell(root, 0.30, "transduct", tmp, epochs);
  const double m05 = r05.empty() ? 0.0 : mean_of(r05);
  const double m30 = r30.empty() ? 0.0 : mean_of(r30);
  const bool mono = m30 >= m10 - 0.005 && m10 >= m05 - 0.005;
  report("4  MNIST monotonicity across pi (0.05/0.10/0.30)",
         !r05.empty() && !r30.empty() && mono,
         fmt(m05) + " <= " + fmt(m10) + " <= " + fmt(m30) + " (0.005 slack)");
}

void criterion_cifar(const std::string& root, const fs::path& tmp) {
  const std::string name = "5  CIFAR10 'ship' pi 0.10: transduct >= vanilla - 0.01";
  if (!dataset_present(root, "cifar10")) {
    report_skip(name, "dataset not found (optional, long-running)");
    return;
  }
  if (std::getenv("TGAN_RUN_LONG") == nullptr) {
    report_skip(name, "optional long-running criterion; set TGAN_RUN_LONG=1 to execute");
    return;
  }
  ExperimentConfig cfg;
  cfg.dataset = "cifar10";
  cfg.novel_class = 8;  // ship
  cfg.pi = 0.10;
  cfg.seeds = {1, 2, 3};
  cfg.data_root = root;
  cfg.mode = "transduct";
  cfg.out_dir = (tmp / "cifar_transduct").string();
  const auto rt = run_experiment(cfg);
  cfg.mode = "vanilla";
  cfg.out_dir = (tmp / "cifar_vanilla").string();
  const auto rv = run_experiment(cfg);
  const double mt = rt.empty() ? 0.0 : mean_of(rt);
  const double mv = rv.empty() ? 0.0 : mean_of(rv);
  report(name, !rt.empty() && !rv.empty() && mt >= mv - 0.01,
         "transduct " + fmt(mt) + " vanilla " + fmt(mv));
}

// --- criterion 6: visual artifacts over the real pipeline --------------------

void write_idx_fixture(const fs::path& dir) {
  fs::create_directories(dir / "mnist");
  Rng rng(123);
  auto write_images = [&](const fs::path& p, int count) {
    std::ofstream f(p, std::ios::binary);
    auto be =
        [&](std::uint32_t v) {
          const char b[4] = {char(v >> 24), char(v >> 16), char(v >> 8), char(v)};
          f.write(b, 4);
        };
    be(2051);
    be(std::uint32_t(count));
    be(28);
    be(28);
    for (int i = 0; i < count * 28 * 28; ++i) {
      const char px = char(rng.below(256));
      f.write(&px, 1);
    }
  };
  auto write_labels = [&](const fs::path& p, int count) {
    std::ofstream f(p, std::ios::binary);
    auto be =
        [&](std::uint32_t v) {
          const char b[4] = {char(v >> 24), char(v >> 16), char(v >> 8), char(v)};
          f.write(b, 4);
        };
    be(2049);
    be(std::uint32_t(count));
    for (int i = 0; i < count; ++i) {
      const char y = char(i % 10);
      f.write(&y, 1);
    }
  };
  write_images(dir / "mnist" / "train-images-idx3-ubyte", 400);
  write_labels(dir / "mnist" / "train-labels-idx1-ubyte", 400);
  write_images(dir / "mnist" / "t10k-images-idx3-ubyte", 200);
  write_labels(dir / "mnist" / "t10k-labels-idx1-ubyte", 200);
}

bool png_ok(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) return false;
  unsigned char sig[8];
  f.read(reinterpret_cast<char*>(sig), 8);
  static const unsigned char want[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return f && std::memcmp(sig, want, 8) == 0;
}

void criterion_grids(const fs::path& tmp) {
  // structurally valid generated IDX data drives the real loader -> training
  // -> table pipeline; the criterion checks artifact existence and format,
  // not image content
  const fs::path data = tmp / "fixture_data";
  write_idx_fixture(data);
  std::vector<EvalReport> all;
  bool ok = true;
  std::string detail;
  for (double pi : {0.05, 0.10, 0.30}) {
    ExperimentConfig cfg;
    cfg.dataset = "mnist";
    cfg.novel_class = 3;
    cfg.pi = pi;
    cfg.mode = "transduct";
    cfg.seeds = {1};
    cfg.epochs = 1;
    cfg.latent_dim = 8;
    cfg.conv_base_channels = 4;
    cfg.data_root = data.string();
    cfg.out_dir = (tmp / "grids").string();
    const auto reports = run_experiment(cfg);
    ok &= reports.size() == 1;
    all.insert(all.end(), reports.begin(), reports.end());
    const std::string tag = cfg.run_tag(1);
    for (const char* kind : {"real_novel.png", "fake_novel.png"}) {
      const fs::path p = fs::path(cfg.out_dir) / (tag + "_" + kind);
      if (!png_ok(p)) {
        ok = false;
        detail += " missing " + p.filename().string();
      }
    }
  }
  if (ok && !all.empty()) {
    const fs::path table = tmp / "grids" / "table.csv";
    export_results_table(all, table.string());
    ok &= fs::exists(table);
  }
  report("6  reproduce-table grid artifacts exist per (class, pi)", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string root = data_root_or_empty(argc, argv);
  const fs::path tmp = fs::temp_directory_path() / "tgan_acceptance";
  fs::remove_all(tmp);  // stale artifacts must not mask emission failures
  fs::create_directories(tmp);

  std::printf("== property suite ==\n");
  criterion_gradient_penalty();
  criterion_reconstruction();
  criterion_mixer();
  criterion_auroc_oracle();
  criterion_prior_moments();
  criterion_phase_accounting();
  criterion_checkpoint_roundtrip(tmp);

  std::printf("== scaled reproductions ==\n");
  criterion_synthetic_e2e(tmp);
  criterion_energy_distance();
  criterion_run_determinism(tmp);
  criteria_mnist(root, tmp);
  criterion_cifar(root, tmp);
  criterion_grids(tmp);

  std::printf("== %s (%d failure%s) ==\n", g_failures == 0 ? "ALL EXECUTED CRITERIA PASS" : "FAILURES",
              g_failures, g_failures == 1 ? "" : "s");
  return g_failures == 0 ? 0 : 1;
}
