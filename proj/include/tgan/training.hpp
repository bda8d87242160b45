#pragma once

#include "tgan/detector.hpp"
#include "tgan/latent_prior.hpp"
#include "tgan/losses.hpp"
#include "tgan/model_core.hpp"
#include "tgan/net.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

namespace tgan {

template <typename Scalar>
struct TrainConfig {
  Index batch_size = 64;
  int n_critic = 5;
  Scalar lambda = Scalar(10);
  double pi = 0.0;
  int epochs = 1;
  Index iters_per_epoch = 0;  // 0: one pass over x_u at batch_size
  AdamConfig optimizer{};     // defaults: step 1e-4, betas (0, 0.9)
  std::uint64_t seed = 0;
  bool negative_branch_enabled = false;

  /// Count of generated entries in a contaminated batch: int(pi * m), plain
  /// truncation.
  Index fake_count() const { return Index(pi * double(batch_size)); }

  void validate() const {
    check_arg(batch_size >= 1, "TrainConfig: batch_size must be >= 1");
    check_arg(n_critic >= 1, "TrainConfig: n_critic must be >= 1");
    check_arg(lambda >= Scalar(0), "TrainConfig: lambda must be non-negative");
    check_arg(pi > 0.0 && pi <= 1.0, "TrainConfig: pi must lie in (0, 1]");
    check_arg(epochs >= 1, "TrainConfig: epochs must be >= 1");
    check_arg(fake_count() >= 1,
              "TrainConfig: int(pi * batch_size) must be >= 1, a contaminated batch "
              "needs at least one generated sample");
  }
};

/// Contaminated batch: int(pi*m) generated entries concatenated with real
/// negatives, generated rows first.
template <typename Scalar>
struct MixedBatch {
  ImageBatch<Scalar> images;
  Index fake_count = 0;
  std::vector<Index> fake_indices;
};

template <typename Scalar>
MixedBatch<Scalar> build_contaminated_batch(const ImageBatch<Scalar>& x_n_pool,
                                            Generator<Scalar>& g, const PriorConfig& prior,
                                            Index m, double pi, Rng& rng) {
  x_n_pool.validate();
  check_arg(x_n_pool.shape == g.output_shape,
            "build_contaminated_batch: pool shape does not match generator output");
  const Index fake = Index(pi * double(m));
  check_arg(fake >= 1, "build_contaminated_batch: int(pi*m) = 0, no generated sample");
  const Index real = m - fake;
  check_arg(x_n_pool.count() >= real,
            "build_contaminated_batch: pool smaller than required real count");

  auto z_p = sample_positive<Scalar>(prior, fake, rng);
  ImageBatch<Scalar> fakes = generate(g, z_p);

  MixedBatch<Scalar> out;
  out.fake_count = fake;
  out.images.shape = x_n_pool.shape;
  out.images.data.resize(m, x_n_pool.shape.pixels());
  out.images.data.topRows(fake) = fakes.data;
  if (real > 0) {
    std::vector<Index> idx(std::size_t(x_n_pool.count()));
    std::iota(idx.begin(), idx.end(), Index(0));
    rng.shuffle(idx);
    for (Index i = 0; i < real; ++i)
      out.images.data.row(fake + i) = x_n_pool.data.row(idx[std::size_t(i)]);
  }
  out.fake_indices.resize(std::size_t(fake));
  std::iota(out.fake_indices.begin(), out.fake_indices.end(), Index(0));
  return out;
}

// ---------------------------------------------------------------------------

/// Seeded reshuffling index stream over [0, n).
class BatchCycler {
 public:
  BatchCycler(Index n, Rng rng) : rng_(rng), order_(std::size_t(n)) {
    check_arg(n >= 1, "BatchCycler: empty pool");
    std::iota(order_.begin(), order_.end(), Index(0));
    rng_.shuffle(order_);
  }

  std::vector<Index> next(Index m) {
    std::vector<Index> out;
    out.reserve(std::size_t(m));
    while (Index(out.size()) < m) {
      if (pos_ == order_.size()) {
        rng_.shuffle(order_);
        pos_ = 0;
      }
      out.push_back(order_[pos_++]);
    }
    return out;
  }

 private:
  Rng rng_;
  std::vector<Index> order_;
  std::size_t pos_ = 0;
};

template <typename Scalar>
Matrix<Scalar> take_rows(const Matrix<Scalar>& src, const std::vector<Index>& idx) {
  Matrix<Scalar> out(Index(idx.size()), src.cols());
  for (Index i = 0; i < Index(idx.size()); ++i) out.row(i) = src.row(idx[std::size_t(i)]);
  return out;
}

/// Per-iteration phase losses. Critic phases record the mean critic objective
/// across their n_critic updates.
struct PhaseLosses {
  double rec_u = 0, reg_u = 0, d_zu = 0;
  double rec_n = 0, reg_n = 0, d_zn = 0;
  double adv_g = 0, d_xu = 0;
  double adv_g_neg = 0, d_xn = 0;
  bool has_negative_branch = false;

  bool finite() const {
    for (double v : {rec_u, reg_u, d_zu, rec_n, reg_n, d_zn, adv_g, d_xu})
      if (!std::isfinite(v)) return false;
    if (has_negative_branch)
      for (double v : {adv_g_neg, d_xn})
        if (!std::isfinite(v)) return false;
    return true;
  }
};

struct EpochMetrics {
  int epoch = 0;
  Index iterations = 0;
  PhaseLosses mean;
};

using IterationSink = std::function<void(long iteration, const PhaseLosses&)>;

/// Optimizer moments and data cyclers carried across epochs.
template <typename Scalar>
struct TrainerState {
  Adam<Scalar> adam_e, adam_g, adam_dzu, adam_dzn, adam_dxu, adam_dxn;
  std::optional<BatchCycler> xu_rec, xu_adv, xn_rec, xn_adv;
  long iteration = 0;
  int nonfinite_streak = 0;

  explicit TrainerState(const AdamConfig& opt)
      : adam_e(opt), adam_g(opt), adam_dzu(opt), adam_dzn(opt), adam_dxu(opt),
        adam_dxn(opt) {}
};

namespace detail {

/// Encoder regularization step: push encoded batch scores up under the frozen
/// latent critic. Returns the encoder-side objective value.
template <typename Scalar>
double encoder_reg_step(Encoder<Scalar>& enc, Critic<Scalar>& d, const Matrix<Scalar>& x,
                        Adam<Scalar>& adam) {
  Matrix<Scalar> z = enc.net.forward(x);
  Matrix<Scalar> dz;
  const double loss = double(generator_objective_grad(d, z, dz));
  enc.net.backward(dz, true);
  adam.step(enc.net);
  return loss;
}

template <typename Scalar>
double reconstruction_step(Encoder<Scalar>& enc, Generator<Scalar>& gen,
                           const Matrix<Scalar>& x, Adam<Scalar>& adam_e,
                           Adam<Scalar>& adam_g) {
  Matrix<Scalar> z = enc.net.forward(x);
  Matrix<Scalar> xh = gen.net.forward(z);
  Matrix<Scalar> dxh;
  const double loss = double(reconstruction_loss_grad(x, xh, dxh));
  Matrix<Scalar> dz = gen.net.backward(dxh, true);
  enc.net.backward(dz, true);
  adam_g.step(gen.net);
  adam_e.step(enc.net);
  return loss;
}

template <typename Scalar>
void raise_divergence(long iteration, const char* phase) {
  std::ostringstream msg;
  msg << "training diverged: non-finite losses for 10 consecutive iterations "
      << "(iteration " << iteration << ", last phase " << phase << ")";
  throw std::runtime_error(msg.str());
}

}  // namespace detail

/// One epoch of the six-phase training loop over a negative pool x_n and an
/// unlabeled pool x_u. Phase order per iteration:
///   (1) reconstruction on an x_u batch (E, G),
///   (2) latent regularization on the same batch (E), then n_critic d_zu
///       updates against unlabeled-prior draws,
///   (3)-(4) the x_n counterparts with d_zn and negative-prior draws,
///   (5) adversarial: one generator update against d_xu on a fresh
///       contaminated batch, then n_critic d_xu updates, each with a fresh
///       contaminated batch and a fresh real x_u batch,
///   (6) when the negative branch is enabled: generator update against d_xn
///       on generated negatives, then n_critic d_xn updates against x_n.
template <typename Scalar>
EpochMetrics transduct_epoch(NetworkSet<Scalar>& nets, const ImageBatch<Scalar>& x_n,
                             const ImageBatch<Scalar>& x_u, const PriorConfig& prior,
                             const TrainConfig<Scalar>& cfg, TrainerState<Scalar>& state,
                             Rng& rng, int epoch_index = 0,
                             const IterationSink& sink = nullptr) {
  cfg.validate();
  prior.validate();
  x_n.validate();
  x_u.validate();
  check_arg(x_n.shape == x_u.shape, "transduct_epoch: pool shape mismatch");
  if (cfg.negative_branch_enabled)
    check_arg(nets.d_xn.has_value(),
              "transduct_epoch: negative branch enabled but d_xn is absent");

  const Index m = cfg.batch_size;
  if (!state.xu_rec) {
    state.xu_rec.emplace(x_u.count(), rng.child());
    state.xu_adv.emplace(x_u.count(), rng.child());
    state.xn_rec.emplace(x_n.count(), rng.child());
    state.xn_adv.emplace(x_n.count(), rng.child());
  }
  const Index iters =
      cfg.iters_per_epoch > 0 ? cfg.iters_per_epoch : std::max<Index>(1, x_u.count() / m);
  const GpConfig<Scalar> gp{cfg.lambda};

  EpochMetrics metrics;
  metrics.epoch = epoch_index;
  metrics.iterations = iters;
  metrics.mean.has_negative_branch = cfg.negative_branch_enabled;

  for (Index it = 0; it < iters; ++it) {
    PhaseLosses ph;
    ph.has_negative_branch = cfg.negative_branch_enabled;

    // (1)-(2): unlabeled batch
    Matrix<Scalar> xu_batch = take_rows(x_u.data, state.xu_rec->next(m));
    ph.rec_u = detail::reconstruction_step(nets.encoder, nets.generator, xu_batch,
                                           state.adam_e, state.adam_g);
    ph.reg_u = detail::encoder_reg_step(nets.encoder, nets.d_zu, xu_batch, state.adam_e);
    for (int i = 0; i < cfg.n_critic; ++i) {
      auto z_prior = sample_unlabeled<Scalar>(prior, m, rng);
      Matrix<Scalar> z_enc = nets.encoder.net.forward(xu_batch);
      ph.d_zu += double(
          critic_objective_accumulate(nets.d_zu, z_enc, z_prior.codes, gp, rng));
      state.adam_dzu.step(nets.d_zu.net);
    }
    ph.d_zu /= cfg.n_critic;

    // (3)-(4): negative batch
    Matrix<Scalar> xn_batch = take_rows(x_n.data, state.xn_rec->next(m));
    ph.rec_n = detail::reconstruction_step(nets.encoder, nets.generator, xn_batch,
                                           state.adam_e, state.adam_g);
    ph.reg_n = detail::encoder_reg_step(nets.encoder, nets.d_zn, xn_batch, state.adam_e);
    for (int i = 0; i < cfg.n_critic; ++i) {
      auto z_prior = sample_negative<Scalar>(prior, m, rng);
      Matrix<Scalar> z_enc = nets.encoder.net.forward(xn_batch);
      ph.d_zn += double(
          critic_objective_accumulate(nets.d_zn, z_enc, z_prior.codes, gp, rng));
      state.adam_dzn.step(nets.d_zn.net);
    }
    ph.d_zn /= cfg.n_critic;

    // (5): adversarial phase on the contaminated batch
    {
      auto mixed = build_contaminated_batch(x_n, nets.generator, prior, m, cfg.pi, rng);
      Matrix<Scalar> d_batch;
      ph.adv_g = double(generator_objective_grad(nets.d_xu, mixed.images.data, d_batch));
      // only the generated rows carry generator gradient; the generator's
      // forward caches still hold the fake-row pass from the mixer, so the
      // backward below must run before any other generator forward
      Matrix<Scalar> d_fake = d_batch.topRows(mixed.fake_count);
      nets.generator.net.backward(d_fake, true);
      state.adam_g.step(nets.generator.net);
    }
    for (int i = 0; i < cfg.n_critic; ++i) {
      auto mixed = build_contaminated_batch(x_n, nets.generator, prior, m, cfg.pi, rng);
      Matrix<Scalar> real = take_rows(x_u.data, state.xu_adv->next(m));
      ph.d_xu +=
          double(critic_objective_accumulate(nets.d_xu, mixed.images.data, real, gp, rng));
      state.adam_dxu.step(nets.d_xu.net);
    }
    ph.d_xu /= cfg.n_critic;

    // (6): optional negative-sample branch
    if (cfg.negative_branch_enabled) {
      auto& d_xn = *nets.d_xn;
      {
        auto z_n = sample_negative<Scalar>(prior, m, rng);
        Matrix<Scalar> fake = nets.generator.net.forward(z_n.codes);
        Matrix<Scalar> d_batch;
        ph.adv_g_neg = double(generator_objective_grad(d_xn, fake, d_batch));
        nets.generator.net.backward(d_batch, true);
        state.adam_g.step(nets.generator.net);
      }
      for (int i = 0; i < cfg.n_critic; ++i) {
        auto z_n = sample_negative<Scalar>(prior, m, rng);
        Matrix<Scalar> fake = nets.generator.net.forward(z_n.codes);
        Matrix<Scalar> real = take_rows(x_n.data, state.xn_adv->next(m));
        ph.d_xn += double(critic_objective_accumulate(d_xn, fake, real, gp, rng));
        state.adam_dxn.step(d_xn.net);
      }
      ph.d_xn /= cfg.n_critic;
    }

    ++state.iteration;
    if (!ph.finite()) {
      if (++state.nonfinite_streak >= 10)
        detail::raise_divergence<Scalar>(state.iteration, "transduct");
    } else {
      state.nonfinite_streak = 0;
    }
    if (sink) sink(state.iteration, ph);

    metrics.mean.rec_u += ph.rec_u;
    metrics.mean.reg_u += ph.reg_u;
    metrics.mean.d_zu += ph.d_zu;
    metrics.mean.rec_n += ph.rec_n;
    metrics.mean.reg_n += ph.reg_n;
    metrics.mean.d_zn += ph.d_zn;
    metrics.mean.adv_g += ph.adv_g;
    metrics.mean.d_xu += ph.d_xu;
    metrics.mean.adv_g_neg += ph.adv_g_neg;
    metrics.mean.d_xn += ph.d_xn;
  }

  const double k = double(iters);
  metrics.mean.rec_u /= k;
  metrics.mean.reg_u /= k;
  metrics.mean.d_zu /= k;
  metrics.mean.rec_n /= k;
  metrics.mean.reg_n /= k;
  metrics.mean.d_zn /= k;
  metrics.mean.adv_g /= k;
  metrics.mean.d_xu /= k;
  metrics.mean.adv_g_neg /= k;
  metrics.mean.d_xn /= k;
  return metrics;
}

/// State for the vanilla (image-space only) model.
template <typename Scalar>
struct VanillaState {
  Adam<Scalar> adam_g, adam_dxu;
  std::optional<BatchCycler> xu_adv;
  long iteration = 0;
  int nonfinite_streak = 0;

  explicit VanillaState(const AdamConfig& opt) : adam_g(opt), adam_dxu(opt) {}
};

/// One epoch of the vanilla loop: the adversarial phase alone, driven by a
/// single unimodal latent prior; no encoder, no latent critics, no
/// reconstruction.
template <typename Scalar>
EpochMetrics vanilla_epoch(Generator<Scalar>& gen, Critic<Scalar>& d_xu,
                           const ImageBatch<Scalar>& x_n, const ImageBatch<Scalar>& x_u,
                           const Vector<double>& mu, const Vector<double>& sigma,
                           const TrainConfig<Scalar>& cfg, VanillaState<Scalar>& state,
                           Rng& rng, int epoch_index = 0, const IterationSink& sink = nullptr) {
  cfg.validate();
  x_n.validate();
  x_u.validate();
  check_arg(mu.size() == gen.latent_dim && sigma.size() == gen.latent_dim,
            "vanilla_epoch: prior dimension mismatch");

  // the unimodal prior, expressed as a PriorConfig usable by the shared mixer
  PriorConfig prior;
  prior.latent_dim = int(mu.size());
  prior.mu_p = mu;
  prior.sigma_p = sigma;
  prior.mu_n = mu;
  prior.mu_n(0) += 1.0;  // unused mode; kept distinct to satisfy validation
  prior.sigma_n = sigma;
  prior.pi = cfg.pi;

  const Index m = cfg.batch_size;
  if (!state.xu_adv) state.xu_adv.emplace(x_u.count(), rng.child());
  const Index iters =
      cfg.iters_per_epoch > 0 ? cfg.iters_per_epoch : std::max<Index>(1, x_u.count() / m);
  const GpConfig<Scalar> gp{cfg.lambda};

  EpochMetrics metrics;
  metrics.epoch = epoch_index;
  metrics.iterations = iters;

  for (Index it = 0; it < iters; ++it) {
    PhaseLosses ph;
    {
      auto mixed = build_contaminated_batch(x_n, gen, prior, m, cfg.pi, rng);
      Matrix<Scalar> d_batch;
      ph.adv_g = double(generator_objective_grad(d_xu, mixed.images.data, d_batch));
      Matrix<Scalar> d_fake = d_batch.topRows(mixed.fake_count);
      gen.net.backward(d_fake, true);
      state.adam_g.step(gen.net);
    }
    for (int i = 0; i < cfg.n_critic; ++i) {
      auto mixed = build_contaminated_batch(x_n, gen, prior, m, cfg.pi, rng);
      Matrix<Scalar> real = take_rows(x_u.data, state.xu_adv->next(m));
      ph.d_xu += double(critic_objective_accumulate(d_xu, mixed.images.data, real, gp, rng));
      state.adam_dxu.step(d_xu.net);
    }
    ph.d_xu /= cfg.n_critic;

    ++state.iteration;
    if (!std::isfinite(ph.adv_g) || !std::isfinite(ph.d_xu)) {
      if (++state.nonfinite_streak >= 10)
        detail::raise_divergence<Scalar>(state.iteration, "vanilla");
    } else {
      state.nonfinite_streak = 0;
    }
    if (sink) sink(state.iteration, ph);
    metrics.mean.adv_g += ph.adv_g;
    metrics.mean.d_xu += ph.d_xu;
  }
  metrics.mean.adv_g /= double(iters);
  metrics.mean.d_xu /= double(iters);
  return metrics;
}

}  // namespace tgan
