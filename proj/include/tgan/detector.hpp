#pragma once

#include "tgan/latent_prior.hpp"
#include "tgan/model_core.hpp"
#include "tgan/svm.hpp"

#include <vector>

namespace tgan {

/// Samples drawn per class when fitting a detector.
inline constexpr Index kDetectorClassSamples = 5000;

enum class DetectorKind { latent_linear, image_rbf };

/// Downstream novelty classifier. Scores are signed margins, higher = more
/// novel; the generated-positive class carries label +1 during fitting.
struct DetectorModel {
  DetectorKind kind = DetectorKind::latent_linear;
  Index feature_dim = 0;
  Index train_pos_count = 0;  // generated-positive features seen at fit time
  Index train_neg_count = 0;
  LinearSvmModel linear;
  RbfSvmModel rbf;
};

namespace detail {

/// Picks `want` rows: without replacement when the pool is large enough,
/// with replacement otherwise.
template <typename Scalar>
Matrix<Scalar> draw_rows(const Matrix<Scalar>& pool, Index want, Rng& rng) {
  Matrix<Scalar> out(want, pool.cols());
  if (pool.rows() >= want) {
    std::vector<Index> idx(std::size_t(pool.rows()));
    std::iota(idx.begin(), idx.end(), Index(0));
    rng.shuffle(idx);
    for (Index i = 0; i < want; ++i) out.row(i) = pool.row(idx[std::size_t(i)]);
  } else {
    for (Index i = 0; i < want; ++i)
      out.row(i) = pool.row(Index(rng.below(std::uint64_t(pool.rows()))));
  }
  return out;
}

/// Runs a net forward in bounded chunks; keeps peak memory flat for the
/// 5000-sample detector batches.
template <typename Scalar>
Matrix<Scalar> forward_chunked(Net<Scalar>& net, const Matrix<Scalar>& x, Index out_width,
                               Index chunk = 256) {
  Matrix<Scalar> out(x.rows(), out_width);
  for (Index at = 0; at < x.rows(); at += chunk) {
    const Index n = std::min(chunk, x.rows() - at);
    out.middleRows(at, n) = net.forward(x.middleRows(at, n));
  }
  return out;
}

}  // namespace detail

/// Latent-feature detector: encoded generated positives (+1) against encoded
/// pool negatives (-1), linear max-margin fit on the codes.
template <typename Scalar>
DetectorModel fit_latent_detector(NetworkSet<Scalar>& nets, const ImageBatch<Scalar>& x_n_pool,
                                  const PriorConfig& prior, Rng& rng) {
  x_n_pool.validate();
  check_arg(x_n_pool.shape == nets.encoder.input_shape,
            "fit_latent_detector: pool shape does not match encoder input");
  const Index n = kDetectorClassSamples;
  auto z_p = sample_positive<Scalar>(prior, n, rng);
  Matrix<Scalar> fakes = detail::forward_chunked(nets.generator.net, z_p.codes,
                                                 nets.generator.output_shape.pixels());
  Matrix<Scalar> pos = detail::forward_chunked(nets.encoder.net, fakes,
                                               Index(nets.encoder.latent_dim));
  Matrix<Scalar> negs = detail::draw_rows(x_n_pool.data, n, rng);
  Matrix<Scalar> neg = detail::forward_chunked(nets.encoder.net, negs,
                                               Index(nets.encoder.latent_dim));

  Matrix<double> feats(2 * n, nets.encoder.latent_dim);
  feats.topRows(n) = pos.template cast<double>();
  feats.bottomRows(n) = neg.template cast<double>();
  std::vector<int> labels(std::size_t(2 * n), -1);
  std::fill(labels.begin(), labels.begin() + n, +1);

  DetectorModel model;
  model.kind = DetectorKind::latent_linear;
  model.feature_dim = nets.encoder.latent_dim;
  model.train_pos_count = n;
  model.train_neg_count = n;
  model.linear = fit_linear_svm(feats, labels, SvmConfig{}, rng);
  return model;
}

/// Image-space detector for the vanilla model: generated samples from a
/// single Gaussian prior (+1) against pool negatives (-1), rbf kernel fit on
/// raw flattened images.
template <typename Scalar>
DetectorModel fit_vanilla_detector(Generator<Scalar>& g, const ImageBatch<Scalar>& x_n_pool,
                                   const Vector<double>& mu, const Vector<double>& sigma,
                                   Rng& rng) {
  x_n_pool.validate();
  check_arg(x_n_pool.shape == g.output_shape,
            "fit_vanilla_detector: pool shape does not match generator output");
  check_arg(mu.size() == g.latent_dim && sigma.size() == g.latent_dim,
            "fit_vanilla_detector: prior dimension mismatch");
  const Index n = kDetectorClassSamples;
  Matrix<Scalar> z = sample_gaussian<Scalar>(mu, sigma, n, rng);
  Matrix<Scalar> fakes = detail::forward_chunked(g.net, z, g.output_shape.pixels());
  Matrix<Scalar> negs = detail::draw_rows(x_n_pool.data, n, rng);

  Matrix<double> feats(2 * n, x_n_pool.shape.pixels());
  feats.topRows(n) = fakes.template cast<double>();
  feats.bottomRows(n) = negs.template cast<double>();
  std::vector<int> labels(std::size_t(2 * n), -1);
  std::fill(labels.begin(), labels.begin() + n, +1);

  DetectorModel model;
  model.kind = DetectorKind::image_rbf;
  model.feature_dim = x_n_pool.shape.pixels();
  model.train_pos_count = n;
  model.train_neg_count = n;
  model.rbf = fit_rbf_svm(feats, labels, SvmConfig{}, rng);
  return model;
}

/// One decision value per sample, monotone in novelty confidence. The
/// latent-linear detector encodes first (encoder required); the image-rbf
/// detector scores raw pixels and never sees the encoder.
template <typename Scalar>
Vector<double> score_batch(const DetectorModel& model, Encoder<Scalar>* encoder,
                           const ImageBatch<Scalar>& x_u) {
  x_u.validate();
  check_arg(x_u.count() >= 1, "score_batch: empty batch");
  if (model.kind == DetectorKind::latent_linear) {
    check_arg(encoder != nullptr, "score_batch: latent detector requires an encoder");
    check_arg(x_u.shape == encoder->input_shape, "score_batch: shape mismatch");
    Matrix<Scalar> codes = detail::forward_chunked(encoder->net, x_u.data,
                                                   Index(encoder->latent_dim));
    check_state(codes.cols() == model.feature_dim,
                "score_batch: encoder width does not match detector");
    Vector<double> out(x_u.count());
    for (Index i = 0; i < codes.rows(); ++i)
      out(i) = model.linear.decision(codes.row(i).transpose().template cast<double>());
    return out;
  }
  check_arg(x_u.shape.pixels() == model.feature_dim,
            "score_batch: image width does not match detector");
  return model.rbf.decision_batch(x_u.data.template cast<double>());
}

}  // namespace tgan
