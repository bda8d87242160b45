#pragma once

#include "tgan/rng.hpp"
#include "tgan/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tgan {

/// Raw dataset bytes as read from disk, before normalization.
struct RawImageStore {
  ImageShape shape;
  std::vector<std::uint8_t> train_pixels;  // count * pixels, CHW per sample
  std::vector<int> train_labels;
  std::vector<std::uint8_t> test_pixels;
  std::vector<int> test_labels;
  int num_classes = 10;
};

/// IDX-format pair loader (big-endian, magic 2051 for images, 2049 for
/// labels). Expects the canonical file names under `dir`:
///   train-images-idx3-ubyte  train-labels-idx1-ubyte
///   t10k-images-idx3-ubyte   t10k-labels-idx1-ubyte
RawImageStore load_mnist_raw(const std::string& dir);

/// CIFAR10 binary batches under `dir`: data_batch_1..5.bin and
/// test_batch.bin, records of 1 label byte + 3072 channel-planar pixel bytes.
RawImageStore load_cifar10_raw(const std::string& dir);

/// Labeled image store with pixels rescaled to [-1, 1] (0 -> -1, 255 -> +1).
template <typename Scalar>
struct LabeledImageStore {
  ImageBatch<Scalar> train;
  std::vector<int> train_labels;
  ImageBatch<Scalar> test;
  std::vector<int> test_labels;
  int num_classes = 10;
};

template <typename Scalar>
LabeledImageStore<Scalar> normalize_store(const RawImageStore& raw) {
  LabeledImageStore<Scalar> out;
  out.num_classes = raw.num_classes;
  const Index px = raw.shape.pixels();
  const Index ntr = Index(raw.train_labels.size());
  const Index nte = Index(raw.test_labels.size());
  out.train.shape = raw.shape;
  out.test.shape = raw.shape;
  out.train.data.resize(ntr, px);
  out.test.data.resize(nte, px);
  const auto rescale = [](std::uint8_t b) { return double(b) / 127.5 - 1.0; };
  for (Index i = 0; i < ntr; ++i)
    for (Index j = 0; j < px; ++j)
      out.train.data(i, j) = Scalar(rescale(raw.train_pixels[std::size_t(i * px + j)]));
  for (Index i = 0; i < nte; ++i)
    for (Index j = 0; j < px; ++j)
      out.test.data(i, j) = Scalar(rescale(raw.test_pixels[std::size_t(i * px + j)]));
  out.train_labels = raw.train_labels;
  out.test_labels = raw.test_labels;
  return out;
}

template <typename Scalar>
LabeledImageStore<Scalar> load_mnist(const std::string& dir) {
  return normalize_store<Scalar>(load_mnist_raw(dir));
}

template <typename Scalar>
LabeledImageStore<Scalar> load_cifar10(const std::string& dir) {
  return normalize_store<Scalar>(load_cifar10_raw(dir));
}

// ---------------------------------------------------------------------------

/// Passkey for the hidden labels; constructible only through EvalAccess in
/// the evaluation module, so training- and detector-stage code cannot read
/// ground truth.
class EvalLabelKey {
  EvalLabelKey() = default;
  friend class EvalAccess;
};

/// The transductive experiment data contract: an uncontaminated negative set
/// and an unlabeled set whose ground-truth labels are reachable only through
/// the evaluation passkey.
template <typename Scalar>
class NoveltySplit {
 public:
  const ImageBatch<Scalar>& x_n() const { return x_n_; }
  const ImageBatch<Scalar>& x_u() const { return x_u_; }
  int novel_class() const { return novel_class_; }
  double pi_requested() const { return pi_requested_; }
  double pi_actual() const { return pi_actual_; }

  /// Source row indices into the originating store, for manifests.
  const std::vector<Index>& x_n_source() const { return xn_src_; }
  const std::vector<Index>& x_u_source() const { return xu_src_; }

  /// +1 novel / -1 inlier, aligned with x_u rows. Evaluation stage only.
  const std::vector<int>& hidden_labels(EvalLabelKey) const { return y_u_; }

 private:
  template <typename S>
  friend struct SplitAssembler;

  ImageBatch<Scalar> x_n_, x_u_;
  std::vector<int> y_u_;
  std::vector<Index> xn_src_, xu_src_;
  int novel_class_ = -1;
  double pi_requested_ = 0.0, pi_actual_ = 0.0;
};

template <typename Scalar>
struct SplitAssembler {
  ImageBatch<Scalar> x_n, x_u;
  std::vector<int> y_u;
  std::vector<Index> xn_src, xu_src;
  int novel_class = -1;
  double pi_requested = 0.0, pi_actual = 0.0;

  NoveltySplit<Scalar> finish() && {
    NoveltySplit<Scalar> s;
    s.x_n_ = std::move(x_n);
    s.x_u_ = std::move(x_u);
    s.y_u_ = std::move(y_u);
    s.xn_src_ = std::move(xn_src);
    s.xu_src_ = std::move(xu_src);
    s.novel_class_ = novel_class;
    s.pi_requested_ = pi_requested;
    s.pi_actual_ = pi_actual;
    return s;
  }
};

/// One-class-held-out transductive split. x_n holds every training image of
/// the non-novel classes. x_u keeps all inlier test images and subsamples the
/// novel class to hit pi; when too few novel images exist, all of them are
/// kept and the inliers are subsampled instead. pi_actual reports the
/// realized rate either way.
template <typename Scalar>
NoveltySplit<Scalar> make_novelty_split(const LabeledImageStore<Scalar>& store,
                                        int novel_class, double pi, std::uint64_t seed) {
  check_arg(pi > 0.0 && pi < 1.0, "make_novelty_split: pi must lie in (0, 1)");
  store.train.validate();
  store.test.validate();
  check_arg(store.train.count() == Index(store.train_labels.size()) &&
                store.test.count() == Index(store.test_labels.size()),
            "make_novelty_split: label count mismatch");

  std::vector<Index> inlier_test, novel_test, inlier_train;
  for (Index i = 0; i < Index(store.test_labels.size()); ++i)
    (store.test_labels[std::size_t(i)] == novel_class ? novel_test : inlier_test)
        .push_back(i);
  for (Index i = 0; i < Index(store.train_labels.size()); ++i)
    if (store.train_labels[std::size_t(i)] != novel_class) inlier_train.push_back(i);

  check_arg(!novel_test.empty(),
            "make_novelty_split: novel class absent from the test store");
  check_arg(!inlier_test.empty() && !inlier_train.empty(),
            "make_novelty_split: no inlier data");

  Rng rng(seed);
  const Index n_inlier = Index(inlier_test.size());
  const Index needed = Index(std::llround(pi / (1.0 - pi) * double(n_inlier)));
  check_arg(needed >= 1, "make_novelty_split: requested pi is unattainable (would "
                         "select zero novel images)");

  std::vector<Index> novel_pick = novel_test;
  std::vector<Index> inlier_pick = inlier_test;
  if (needed <= Index(novel_test.size())) {
    rng.shuffle(novel_pick);
    novel_pick.resize(std::size_t(needed));
  } else {
    // keep the whole novel pool, subsample inliers to restore the rate
    const Index keep =
        Index(std::llround(double(novel_test.size()) * (1.0 - pi) / pi));
    check_arg(keep >= 1, "make_novelty_split: requested pi leaves no inliers");
    rng.shuffle(inlier_pick);
    inlier_pick.resize(std::size_t(keep));
  }

  SplitAssembler<Scalar> a;
  a.novel_class = novel_class;
  a.pi_requested = pi;

  const Index px = store.train.shape.pixels();
  a.x_n.shape = store.train.shape;
  a.x_n.data.resize(Index(inlier_train.size()), px);
  for (Index i = 0; i < Index(inlier_train.size()); ++i)
    a.x_n.data.row(i) = store.train.data.row(inlier_train[std::size_t(i)]);
  a.xn_src = std::move(inlier_train);

  std::vector<std::pair<Index, int>> entries;  // (test row, label)
  entries.reserve(inlier_pick.size() + novel_pick.size());
  for (Index i : inlier_pick) entries.push_back({i, -1});
  for (Index i : novel_pick) entries.push_back({i, +1});
  rng.shuffle(entries);

  a.x_u.shape = store.test.shape;
  a.x_u.data.resize(Index(entries.size()), px);
  a.y_u.resize(entries.size());
  a.xu_src.resize(entries.size());
  Index novel_count = 0;
  for (Index i = 0; i < Index(entries.size()); ++i) {
    a.x_u.data.row(i) = store.test.data.row(entries[std::size_t(i)].first);
    a.y_u[std::size_t(i)] = entries[std::size_t(i)].second;
    a.xu_src[std::size_t(i)] = entries[std::size_t(i)].first;
    if (entries[std::size_t(i)].second == +1) ++novel_count;
  }
  a.pi_actual = double(novel_count) / double(entries.size());
  return std::move(a).finish();
}

/// Desk-scale 2-D benchmark: negatives ~ N((0,0), I), novelties ~ N((4,4), I),
/// novel count fixed at round(pi * n_unl). "Images" are 2-vectors of shape
/// (1, 1, 2).
template <typename Scalar>
NoveltySplit<Scalar> make_synthetic_2d(Index n_neg, Index n_unl, double pi,
                                       std::uint64_t seed) {
  check_arg(n_neg >= 1 && n_unl >= 1, "make_synthetic_2d: sizes must be >= 1");
  check_arg(pi > 0.0 && pi < 1.0, "make_synthetic_2d: pi must lie in (0, 1)");
  const Index n_novel = Index(std::llround(pi * double(n_unl)));
  check_arg(n_novel >= 1 && n_novel < n_unl,
            "make_synthetic_2d: pi leaves an empty class in the unlabeled set");

  Rng rng(seed);
  const ImageShape shape{1, 1, 2};
  SplitAssembler<Scalar> a;
  a.novel_class = 1;
  a.pi_requested = pi;
  a.pi_actual = double(n_novel) / double(n_unl);

  a.x_n.shape = shape;
  a.x_n.data.resize(n_neg, 2);
  rng.fill_normal(a.x_n.data);
  a.xn_src.resize(std::size_t(n_neg));
  std::iota(a.xn_src.begin(), a.xn_src.end(), Index(0));

  std::vector<int> labels(std::size_t(n_unl), -1);
  std::fill(labels.begin(), labels.begin() + n_novel, +1);
  rng.shuffle(labels);
  a.x_u.shape = shape;
  a.x_u.data.resize(n_unl, 2);
  rng.fill_normal(a.x_u.data);
  for (Index i = 0; i < n_unl; ++i)
    if (labels[std::size_t(i)] == +1) a.x_u.data.row(i).array() += Scalar(4);
  a.y_u = std::move(labels);
  a.xu_src.resize(std::size_t(n_unl));
  std::iota(a.xu_src.begin(), a.xu_src.end(), Index(0));
  return std::move(a).finish();
}

/// Index manifest for exact split reproducibility (indices only, no labels).
void save_split_manifest(const std::vector<Index>& xn_source,
                         const std::vector<Index>& xu_source, int novel_class,
                         double pi_requested, double pi_actual, const std::string& path);

template <typename Scalar>
void save_split_manifest(const NoveltySplit<Scalar>& split, const std::string& path) {
  save_split_manifest(split.x_n_source(), split.x_u_source(), split.novel_class(),
                      split.pi_requested(), split.pi_actual(), path);
}

}  // namespace tgan
