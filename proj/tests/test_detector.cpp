#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tgan/detector.hpp"
#include "tgan/evaluation.hpp"

using namespace tgan;

namespace {

/// Encoder/generator pair that passes 2-vectors through unchanged, so latent
/// features coincide with the data.
NetworkSet<double> identity_stub() {
  Rng rng(1);
  auto nets = build_synthetic_nets<double>(2, 4, false, rng);
  auto make_identity = [](Net<double>& net) {
    Net<double> id;
    Rng r(2);
    id.emplace<Dense<double>>(2, 2, 1.0, r);
    auto ps = id.params();
    ps[0].value->setIdentity();
    ps[1].value->setZero();
    net = std::move(id);
  };
  make_identity(nets.encoder.net);
  make_identity(nets.generator.net);
  return nets;
}

ImageBatch<double> gaussian_pool(const Vector<double>& mu, Index count, std::uint64_t seed) {
  ImageBatch<double> pool{Matrix<double>(count, 2), {1, 1, 2}};
  Rng rng(seed);
  rng.fill_normal(pool.data);
  pool.data.rowwise() += mu.transpose();
  return pool;
}

}  // namespace

TEST_CASE("linear svm separates well-separated blobs") {
  Rng rng(3);
  Matrix<double> x(200, 2);
  std::vector<int> y(200);
  for (Index i = 0; i < 200; ++i) {
    const bool pos = i < 100;
    x(i, 0) = rng.normal() + (pos ? 3.0 : -3.0);
    x(i, 1) = rng.normal();
    y[std::size_t(i)] = pos ? +1 : -1;
  }
  Rng frng(4);
  auto model = fit_linear_svm(x, y, SvmConfig{}, frng);
  int correct = 0;
  for (Index i = 0; i < 200; ++i)
    if ((model.decision(x.row(i).transpose()) > 0) == (y[std::size_t(i)] > 0)) ++correct;
  CHECK(correct >= 198);
}

TEST_CASE("svm rejects degenerate and single-class inputs") {
  Matrix<double> same = Matrix<double>::Ones(8, 3);
  std::vector<int> y(8, -1);
  for (int i = 0; i < 4; ++i) y[std::size_t(i)] = +1;
  Rng rng(5);
  CHECK_THROWS_AS(fit_linear_svm(same, y, SvmConfig{}, rng), std::invalid_argument);

  Matrix<double> x(8, 3);
  Rng drng(6);
  drng.fill_normal(x);
  std::vector<int> ones(8, +1);
  CHECK_THROWS_AS(fit_linear_svm(x, ones, SvmConfig{}, rng), std::invalid_argument);
  CHECK_THROWS_AS(fit_rbf_svm(x, ones, SvmConfig{}, rng), std::invalid_argument);
}

TEST_CASE("rbf svm separates two disjoint 2-D blobs") {
  Rng rng(7);
  Matrix<double> x(300, 2);
  std::vector<int> y(300);
  for (Index i = 0; i < 300; ++i) {
    const bool pos = i % 3 == 0;
    x(i, 0) = 0.3 * rng.normal() + (pos ? 2.5 : -2.5);
    x(i, 1) = 0.3 * rng.normal() + (pos ? 2.5 : -2.5);
    y[std::size_t(i)] = pos ? +1 : -1;
  }
  Rng frng(8);
  auto model = fit_rbf_svm(x, y, SvmConfig{}, frng);
  int correct = 0;
  for (Index i = 0; i < 300; ++i)
    if ((model.decision(x.row(i).transpose()) > 0) == (y[std::size_t(i)] > 0)) ++correct;
  CHECK(double(correct) / 300.0 > 0.99);

  // batch decision agrees with the per-row path
  auto batch = model.decision_batch(x.topRows(10));
  for (Index i = 0; i < 10; ++i)
    CHECK(batch(i) == doctest::Approx(model.decision(x.row(i).transpose())).epsilon(1e-9));
}

TEST_CASE("latent detector on an identity stub is near-perfect") {
  auto nets = identity_stub();
  auto prior = PriorConfig::symmetric(2, 0.3);
  // negatives drawn from the negative prior mode, so E(G(z_p)) and E(x_n)
  // are two well-separated Gaussians
  auto pool = gaussian_pool(prior.mu_n, 6000, 11);
  Rng rng(12);
  auto model = fit_latent_detector(nets, pool, prior, rng);
  CHECK(model.kind == DetectorKind::latent_linear);
  CHECK(model.feature_dim == 2);
  CHECK(model.train_pos_count == 5000);
  CHECK(model.train_neg_count == 5000);

  // training-style accuracy on fresh draws from the same construction
  Rng eval_rng(13);
  auto z_p = sample_positive<double>(prior, 1000, eval_rng);
  auto pos_scores = score_batch(model, &nets.encoder,
                                ImageBatch<double>{z_p.codes, {1, 1, 2}});
  auto neg_pool = gaussian_pool(prior.mu_n, 1000, 14);
  auto neg_scores = score_batch(model, &nets.encoder, neg_pool);
  int correct = 0;
  for (Index i = 0; i < 1000; ++i) {
    if (pos_scores(i) > 0) ++correct;
    if (neg_scores(i) <= 0) ++correct;
  }
  CHECK(double(correct) / 2000.0 > 0.99);
  // margin consistency
  CHECK(pos_scores.mean() > neg_scores.mean());
}

TEST_CASE("latent detector draws negatives with replacement from a small pool") {
  auto nets = identity_stub();
  auto prior = PriorConfig::symmetric(2, 0.3);
  auto pool = gaussian_pool(prior.mu_n, 137, 15);  // < 5000
  Rng rng(16);
  auto model = fit_latent_detector(nets, pool, prior, rng);
  CHECK(model.train_neg_count == 5000);
  CHECK(model.feature_dim == 2);
}

TEST_CASE("vanilla detector trains on raw image vectors") {
  Rng nrng(17);
  auto nets = build_synthetic_nets<double>(2, 8, false, nrng);
  auto pool = gaussian_pool(Vector<double>::Zero(2), 6000, 18);
  Vector<double> mu = Vector<double>::Zero(2), sigma = Vector<double>::Ones(2);
  Rng rng(19);
  auto model = fit_vanilla_detector(nets.generator, pool, mu, sigma, rng);
  CHECK(model.kind == DetectorKind::image_rbf);
  CHECK(model.feature_dim == 2);  // flattened image width
  CHECK(model.train_pos_count == 5000);
  CHECK(model.train_neg_count == 5000);

  // scoring requires no encoder
  auto scores = score_batch<double>(model, nullptr, pool);
  CHECK(scores.size() == pool.count());
}

TEST_CASE("latent scoring requires an encoder") {
  auto nets = identity_stub();
  auto prior = PriorConfig::symmetric(2, 0.3);
  auto pool = gaussian_pool(prior.mu_n, 5000, 20);
  Rng rng(21);
  auto model = fit_latent_detector(nets, pool, prior, rng);
  CHECK_THROWS_AS(score_batch<double>(model, nullptr, pool), std::invalid_argument);
  CHECK(score_batch(model, &nets.encoder, pool).size() == pool.count());
}

TEST_CASE("auroc is invariant to positive affine rescaling of scores") {
  auto nets = identity_stub();
  auto prior = PriorConfig::symmetric(2, 0.3);
  auto pool = gaussian_pool(prior.mu_n, 5000, 22);
  Rng rng(23);
  auto model = fit_latent_detector(nets, pool, prior, rng);

  Rng mix_rng(24);
  Matrix<double> mix(400, 2);
  std::vector<int> labels(400);
  for (Index i = 0; i < 400; ++i) {
    const bool novel = mix_rng.uniform() < 0.4;
    mix(i, 0) = mix_rng.normal() + (novel ? prior.mu_p(0) : prior.mu_n(0));
    mix(i, 1) = mix_rng.normal();
    labels[std::size_t(i)] = novel ? +1 : -1;
  }
  auto scores = score_batch(model, &nets.encoder, ImageBatch<double>{mix, {1, 1, 2}});
  Vector<double> rescaled = 2.0 * scores.array() + 7.0;
  CHECK(auroc(scores, labels) == doctest::Approx(auroc(rescaled, labels)).epsilon(1e-12));
}

TEST_CASE("detector fits are deterministic given the seed") {
  auto fit = [](std::uint64_t seed) {
    auto nets = identity_stub();
    auto prior = PriorConfig::symmetric(2, 0.3);
    auto pool = gaussian_pool(prior.mu_n, 6000, 25);
    Rng rng(seed);
    return fit_latent_detector(nets, pool, prior, rng).linear.w;
  };
  CHECK(fit(31) == fit(31));
  CHECK(fit(31) != fit(32));
}
