#pragma once

#include "tgan/rng.hpp"
#include "tgan/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace tgan {

/// Max-margin binary classifiers trained by dual coordinate descent on the
/// L1-loss SVM dual. The bias is absorbed by augmenting features (linear) or
/// the kernel (rbf) with a constant, so the dual has box constraints only.
struct SvmConfig {
  double c = 1.0;
  double tol = 1e-3;
  int max_epochs = 1000;
};

struct LinearSvmModel {
  Vector<double> w;  // last entry is the bias weight
  double decision(const Eigen::Ref<const Vector<double>>& x) const {
    return w.head(w.size() - 1).dot(x) + w(w.size() - 1);
  }
};

struct RbfSvmModel {
  Matrix<double> support;   // rows with alpha > 0
  Vector<double> alpha_y;   // alpha_i * y_i for the support rows
  double gamma = 0.0;

  double decision(const Eigen::Ref<const Vector<double>>& x) const {
    double acc = 0.0;
    for (Index i = 0; i < support.rows(); ++i) {
      const double d2 = (support.row(i).transpose() - x).squaredNorm();
      acc += alpha_y(i) * (std::exp(-gamma * d2) + 1.0);
    }
    return acc;
  }

  /// Batch decision values via one Gram product.
  Vector<double> decision_batch(const Matrix<double>& q) const {
    Vector<double> sq_s(support.rows()), sq_q(q.rows());
    for (Index i = 0; i < support.rows(); ++i) sq_s(i) = support.row(i).squaredNorm();
    for (Index i = 0; i < q.rows(); ++i) sq_q(i) = q.row(i).squaredNorm();
    Matrix<double> cross = q * support.transpose();  // (nq, nsv)
    Vector<double> out(q.rows());
    for (Index i = 0; i < q.rows(); ++i) {
      double acc = 0.0;
      for (Index j = 0; j < support.rows(); ++j) {
        const double d2 = std::max(0.0, sq_q(i) + sq_s(j) - 2.0 * cross(i, j));
        acc += alpha_y(j) * (std::exp(-gamma * d2) + 1.0);
      }
      out(i) = acc;
    }
    return out;
  }
};

namespace detail {

inline void check_svm_inputs(const Matrix<double>& x, const std::vector<int>& y) {
  check_arg(x.rows() == Index(y.size()), "svm: feature/label count mismatch");
  check_arg(x.rows() >= 2, "svm: need at least two samples");
  bool pos = false, neg = false;
  for (int v : y) {
    check_arg(v == 1 || v == -1, "svm: labels must be +1/-1");
    pos |= v == 1;
    neg |= v == -1;
  }
  check_arg(pos && neg, "svm: both classes must be present");
  // degenerate feature set: every sample identical
  bool any_diff = false;
  for (Index i = 1; i < x.rows() && !any_diff; ++i)
    any_diff = (x.row(i) - x.row(0)).cwiseAbs().maxCoeff() > 0;
  check_arg(any_diff, "svm: all feature vectors are identical");
}

}  // namespace detail

inline LinearSvmModel fit_linear_svm(const Matrix<double>& x, const std::vector<int>& y,
                                     const SvmConfig& cfg, Rng& rng) {
  detail::check_svm_inputs(x, y);
  const Index n = x.rows();
  const Index d = x.cols();
  Vector<double> w = Vector<double>::Zero(d + 1);
  Vector<double> alpha = Vector<double>::Zero(n);
  Vector<double> qii(n);
  for (Index i = 0; i < n; ++i) qii(i) = x.row(i).squaredNorm() + 1.0;

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double max_violation = 0.0;
    for (Index i : order) {
      const double yi = y[std::size_t(i)];
      const double g = yi * (w.head(d).dot(x.row(i)) + w(d)) - 1.0;
      double pg = g;
      if (alpha(i) <= 0.0)
        pg = std::min(g, 0.0);
      else if (alpha(i) >= cfg.c)
        pg = std::max(g, 0.0);
      max_violation = std::max(max_violation, std::abs(pg));
      if (std::abs(pg) < 1e-12) continue;
      const double a_new = std::min(std::max(alpha(i) - g / qii(i), 0.0), cfg.c);
      const double delta = (a_new - alpha(i)) * yi;
      alpha(i) = a_new;
      w.head(d) += delta * x.row(i).transpose();
      w(d) += delta;
    }
    if (max_violation < cfg.tol) break;
  }
  return {std::move(w)};
}

/// Median-heuristic kernel width: gamma = 1 / (2 median^2) over pairwise
/// distances; the median is taken on a seeded subsample of at most 1024 rows
/// when the set is larger.
inline double rbf_gamma_median_heuristic(const Matrix<double>& x, Rng& rng) {
  const Index cap = 1024;
  Matrix<double> s;
  if (x.rows() <= cap) {
    s = x;
  } else {
    std::vector<Index> idx(std::size_t(x.rows()));
    std::iota(idx.begin(), idx.end(), Index(0));
    rng.shuffle(idx);
    s.resize(cap, x.cols());
    for (Index i = 0; i < cap; ++i) s.row(i) = x.row(idx[std::size_t(i)]);
  }
  std::vector<double> dists;
  dists.reserve(std::size_t(s.rows()) * std::size_t(s.rows() - 1) / 2);
  for (Index i = 0; i < s.rows(); ++i)
    for (Index j = i + 1; j < s.rows(); ++j) dists.push_back((s.row(i) - s.row(j)).norm());
  std::nth_element(dists.begin(), dists.begin() + Index(dists.size()) / 2, dists.end());
  const double med = dists[dists.size() / 2];
  check_state(med > 0.0, "rbf kernel: median pairwise distance is zero");
  return 1.0 / (2.0 * med * med);
}

inline RbfSvmModel fit_rbf_svm(const Matrix<double>& x, const std::vector<int>& y,
                               const SvmConfig& cfg, Rng& rng, double gamma = 0.0) {
  detail::check_svm_inputs(x, y);
  const Index n = x.rows();
  check_arg(n <= 20000, "rbf svm: training set too large for a dense kernel matrix");
  if (gamma <= 0.0) gamma = rbf_gamma_median_heuristic(x, rng);

  // Dense Gram in float to halve memory; K'(i,j) = K(i,j) + 1 absorbs the bias.
  Vector<double> sq(n);
  for (Index i = 0; i < n; ++i) sq(i) = x.row(i).squaredNorm();
  Matrix<float> k(n, n);
  {
    Matrix<double> gram = x * x.transpose();
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        const double d2 = std::max(0.0, sq(i) + sq(j) - 2.0 * gram(i, j));
        k(i, j) = float(std::exp(-gamma * d2) + 1.0);
      }
  }

  Vector<double> alpha = Vector<double>::Zero(n);
  Vector<double> f = Vector<double>::Zero(n);  // f_i = sum_j alpha_j y_j K'(j,i)
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double max_violation = 0.0;
    for (Index i : order) {
      const double yi = y[std::size_t(i)];
      const double g = yi * f(i) - 1.0;
      double pg = g;
      if (alpha(i) <= 0.0)
        pg = std::min(g, 0.0);
      else if (alpha(i) >= cfg.c)
        pg = std::max(g, 0.0);
      max_violation = std::max(max_violation, std::abs(pg));
      if (std::abs(pg) < 1e-12) continue;
      const double a_new = std::min(std::max(alpha(i) - g / double(k(i, i)), 0.0), cfg.c);
      const double delta = (a_new - alpha(i)) * yi;
      alpha(i) = a_new;
      f += delta * k.row(i).transpose().cast<double>();
    }
    if (max_violation < cfg.tol) break;
  }

  // keep support rows only
  Index n_sv = 0;
  for (Index i = 0; i < n; ++i)
    if (alpha(i) > 0.0) ++n_sv;
  RbfSvmModel model;
  model.gamma = gamma;
  model.support.resize(n_sv, x.cols());
  model.alpha_y.resize(n_sv);
  Index at = 0;
  for (Index i = 0; i < n; ++i) {
    if (alpha(i) <= 0.0) continue;
    model.support.row(at) = x.row(i);
    model.alpha_y(at) = alpha(i) * y[std::size_t(i)];
    ++at;
  }
  return model;
}

}  // namespace tgan
