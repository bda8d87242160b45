#pragma once

#include "tgan/rng.hpp"
#include "tgan/types.hpp"

#include <cmath>

namespace tgan {

/// The imposed bimodal latent prior: two diagonal Gaussians and the mixture
/// weight of the positive mode.
struct PriorConfig {
  int latent_dim = 0;
  Vector<double> mu_n;     // negative mode mean
  Vector<double> mu_p;     // positive mode mean
  Vector<double> sigma_n;  // diagonal covariance (variances, not stddevs)
  Vector<double> sigma_p;
  double pi = 0.0;  // positive-class weight in the unlabeled mixture, (0, 1]

  void validate() const {
    check_arg(latent_dim >= 1, "PriorConfig: latent_dim must be >= 1");
    check_arg(mu_n.size() == latent_dim && mu_p.size() == latent_dim &&
                  sigma_n.size() == latent_dim && sigma_p.size() == latent_dim,
              "PriorConfig: vector lengths must equal latent_dim");
    check_arg((sigma_n.array() > 0).all() && (sigma_p.array() > 0).all(),
              "PriorConfig: covariance entries must be strictly positive");
    check_arg((mu_n - mu_p).norm() > 0, "PriorConfig: mu_n and mu_p must differ");
    check_arg(pi > 0.0 && pi <= 1.0, "PriorConfig: pi must lie in (0, 1]");
  }

  /// Default placement: modes at (-c, 0, ..., 0) and (+c, 0, ..., 0) with unit
  /// variances, well separated along the first axis.
  static PriorConfig symmetric(int latent_dim, double pi, double c = 3.0) {
    PriorConfig cfg;
    cfg.latent_dim = latent_dim;
    cfg.mu_n = Vector<double>::Zero(latent_dim);
    cfg.mu_p = Vector<double>::Zero(latent_dim);
    cfg.mu_n(0) = -c;
    cfg.mu_p(0) = +c;
    cfg.sigma_n = Vector<double>::Ones(latent_dim);
    cfg.sigma_p = Vector<double>::Ones(latent_dim);
    cfg.pi = pi;
    cfg.validate();
    return cfg;
  }
};

/// count draws from N(mu, diag(sigma)); sigma holds variances.
template <typename Scalar>
Matrix<Scalar> sample_gaussian(const Vector<double>& mu, const Vector<double>& sigma,
                               Index count, Rng& rng) {
  check_arg(count >= 1, "sample_gaussian: count must be >= 1");
  check_arg(mu.size() == sigma.size(), "sample_gaussian: mu/sigma length mismatch");
  const Index n = mu.size();
  Matrix<Scalar> out(count, n);
  for (Index i = 0; i < count; ++i)
    for (Index j = 0; j < n; ++j)
      out(i, j) = Scalar(mu(j) + std::sqrt(sigma(j)) * rng.normal());
  return out;
}

template <typename Scalar>
LatentBatch<Scalar> sample_negative(const PriorConfig& cfg, Index count, Rng& rng) {
  cfg.validate();
  return {sample_gaussian<Scalar>(cfg.mu_n, cfg.sigma_n, count, rng),
          LatentOrigin::negative_prior};
}

template <typename Scalar>
LatentBatch<Scalar> sample_positive(const PriorConfig& cfg, Index count, Rng& rng) {
  cfg.validate();
  return {sample_gaussian<Scalar>(cfg.mu_p, cfg.sigma_p, count, rng),
          LatentOrigin::positive_prior};
}

/// Per-sample Bernoulli(pi) mixture of the two modes: each row independently
/// comes from the positive prior with probability pi, else the negative one.
template <typename Scalar>
LatentBatch<Scalar> sample_unlabeled(const PriorConfig& cfg, Index count, Rng& rng) {
  cfg.validate();
  check_arg(count >= 1, "sample_unlabeled: count must be >= 1");
  const Index n = cfg.latent_dim;
  Matrix<Scalar> out(count, n);
  for (Index i = 0; i < count; ++i) {
    const bool positive = rng.uniform() < cfg.pi;
    const auto& mu = positive ? cfg.mu_p : cfg.mu_n;
    const auto& sigma = positive ? cfg.sigma_p : cfg.sigma_n;
    for (Index j = 0; j < n; ++j)
      out(i, j) = Scalar(mu(j) + std::sqrt(sigma(j)) * rng.normal());
  }
  return {std::move(out), LatentOrigin::unlabeled_prior};
}

}  // namespace tgan
