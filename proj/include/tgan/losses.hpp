#pragma once

#include "tgan/model_core.hpp"
#include "tgan/rng.hpp"

#include <cmath>

namespace tgan {

template <typename Scalar>
struct GpConfig {
  Scalar lambda = Scalar(10);
};

// ---------------------------------------------------------------------------
// Reconstruction: batch mean of per-sample unsquared Euclidean distance over
// flattened samples. Zero iff the batches are equal; symmetric.

template <typename Scalar>
Scalar reconstruction_loss(const Matrix<Scalar>& x, const Matrix<Scalar>& x_hat) {
  check_arg(x.rows() == x_hat.rows() && x.cols() == x_hat.cols(),
            "reconstruction_loss: shape mismatch");
  check_arg(x.rows() >= 1, "reconstruction_loss: empty batch");
  Scalar acc = 0;
  for (Index i = 0; i < x.rows(); ++i) acc += (x.row(i) - x_hat.row(i)).norm();
  return acc / Scalar(x.rows());
}

/// Loss value plus gradient with respect to x_hat. The distance is not
/// differentiable at x_hat == x; that row's gradient is taken as zero.
template <typename Scalar>
Scalar reconstruction_loss_grad(const Matrix<Scalar>& x, const Matrix<Scalar>& x_hat,
                                Matrix<Scalar>& d_xhat) {
  check_arg(x.rows() == x_hat.rows() && x.cols() == x_hat.cols(),
            "reconstruction_loss: shape mismatch");
  const Index b = x.rows();
  d_xhat.setZero(b, x.cols());
  Scalar acc = 0;
  for (Index i = 0; i < b; ++i) {
    const Scalar d = (x.row(i) - x_hat.row(i)).norm();
    acc += d;
    if (d > Scalar(1e-12)) d_xhat.row(i) = (x_hat.row(i) - x.row(i)) / (d * Scalar(b));
  }
  return acc / Scalar(b);
}

// ---------------------------------------------------------------------------
// Gradient penalty: one interpolate per (real, fake) pair, uniform along the
// segment, two-sided unit-norm target on the per-sample input gradient.

template <typename Scalar>
Matrix<Scalar> gp_interpolates(const Matrix<Scalar>& real, const Matrix<Scalar>& fake,
                               Rng& rng) {
  check_arg(real.rows() == fake.rows() && real.cols() == fake.cols(),
            "gradient_penalty: real/fake shape mismatch");
  Matrix<Scalar> x(real.rows(), real.cols());
  for (Index i = 0; i < real.rows(); ++i) {
    const Scalar t = Scalar(rng.uniform());
    x.row(i) = t * real.row(i) + (Scalar(1) - t) * fake.row(i);
  }
  return x;
}

namespace detail {

template <typename Scalar>
Scalar gp_core(Critic<Scalar>& d, const Matrix<Scalar>& real, const Matrix<Scalar>& fake,
               Scalar lambda, Rng& rng, bool accumulate) {
  check_arg(real.cols() == d.input_dim, "gradient_penalty: batch not in critic domain");
  check_arg(lambda >= Scalar(0), "gradient_penalty: lambda must be non-negative");
  const Matrix<Scalar> x = gp_interpolates(real, fake, rng);
  const Index b = x.rows();
  Matrix<Scalar> scores = d.net.forward(x);
  check_state(scores.cols() == 1, "gradient_penalty: critic must emit scalar scores");
  auto [grad_in, trace] = d.net.backward_trace(Matrix<Scalar>::Ones(b, 1));
  Scalar value = 0;
  Matrix<Scalar> tangent;
  if (accumulate) tangent.setZero(b, x.cols());
  for (Index i = 0; i < b; ++i) {
    const Scalar r = grad_in.row(i).norm();
    value += (r - Scalar(1)) * (r - Scalar(1));
    if (accumulate && r > Scalar(1e-12))
      tangent.row(i) = (Scalar(2) * lambda / Scalar(b)) * (r - Scalar(1)) / r * grad_in.row(i);
  }
  value = lambda * value / Scalar(b);
  if (accumulate && lambda > Scalar(0)) d.net.penalty_backward(trace, std::move(tangent));
  return value;
}

}  // namespace detail

/// Penalty value only.
template <typename Scalar>
Scalar gradient_penalty(Critic<Scalar>& d, const Matrix<Scalar>& real,
                        const Matrix<Scalar>& fake, Scalar lambda, Rng& rng) {
  return detail::gp_core(d, real, fake, lambda, rng, false);
}

/// Penalty value; also accumulates d penalty / d critic params.
template <typename Scalar>
Scalar gradient_penalty_accumulate(Critic<Scalar>& d, const Matrix<Scalar>& real,
                                   const Matrix<Scalar>& fake, Scalar lambda, Rng& rng) {
  return detail::gp_core(d, real, fake, lambda, rng, true);
}

// ---------------------------------------------------------------------------
// Critic and generator objectives. The critic minimizes
//   mean d(fake_or_mixed) - mean d(real) + penalty,
// so real scores exceed fake scores at the optimum; the generator minimizes
// -mean d(fake_or_mixed).

template <typename Scalar>
Scalar critic_objective(Critic<Scalar>& d, const Matrix<Scalar>& fake_or_mixed,
                        const Matrix<Scalar>& real, const GpConfig<Scalar>& gp, Rng& rng) {
  check_arg(fake_or_mixed.cols() == d.input_dim && real.cols() == d.input_dim,
            "critic_objective: batch not in critic domain");
  const Scalar mf = criticize(d, fake_or_mixed).mean();
  const Scalar mr = criticize(d, real).mean();
  return mf - mr + gradient_penalty(d, real, fake_or_mixed, gp.lambda, rng);
}

/// Objective value; accumulates the critic's full gradient (mean terms plus
/// penalty) into its parameter grads.
template <typename Scalar>
Scalar critic_objective_accumulate(Critic<Scalar>& d, const Matrix<Scalar>& fake_or_mixed,
                                   const Matrix<Scalar>& real, const GpConfig<Scalar>& gp,
                                   Rng& rng) {
  check_arg(fake_or_mixed.cols() == d.input_dim && real.cols() == d.input_dim,
            "critic_objective: batch not in critic domain");
  const Index bf = fake_or_mixed.rows();
  const Index br = real.rows();
  Matrix<Scalar> sf = d.net.forward(fake_or_mixed);
  const Scalar mf = sf.mean();
  d.net.backward(Matrix<Scalar>::Constant(bf, 1, Scalar(1) / Scalar(bf)), true);
  Matrix<Scalar> sr = d.net.forward(real);
  const Scalar mr = sr.mean();
  d.net.backward(Matrix<Scalar>::Constant(br, 1, Scalar(-1) / Scalar(br)), true);
  const Scalar pen = gradient_penalty_accumulate(d, real, fake_or_mixed, gp.lambda, rng);
  return mf - mr + pen;
}

template <typename Scalar>
Scalar generator_objective(Critic<Scalar>& d, const Matrix<Scalar>& fake_or_mixed) {
  check_arg(fake_or_mixed.cols() == d.input_dim,
            "generator_objective: batch not in critic domain");
  return -criticize(d, fake_or_mixed).mean();
}

/// Objective value plus its gradient with respect to the batch; the critic's
/// own parameters are left untouched. Only the generated rows of a mixed
/// batch should be propagated further by the caller.
template <typename Scalar>
Scalar generator_objective_grad(Critic<Scalar>& d, const Matrix<Scalar>& fake_or_mixed,
                                Matrix<Scalar>& d_batch) {
  check_arg(fake_or_mixed.cols() == d.input_dim,
            "generator_objective: batch not in critic domain");
  const Index b = fake_or_mixed.rows();
  Matrix<Scalar> s = d.net.forward(fake_or_mixed);
  d_batch = d.net.backward(Matrix<Scalar>::Constant(b, 1, Scalar(-1) / Scalar(b)), false);
  return -s.mean();
}

}  // namespace tgan
