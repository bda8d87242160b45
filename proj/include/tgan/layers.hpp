#pragma once

#include "tgan/rng.hpp"
#include "tgan/types.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <vector>

namespace tgan {

template <typename Scalar>
struct ParamSlot {
  std::string name;
  Matrix<Scalar>* value;
  Matrix<Scalar>* grad;
};

/// One differentiable map in a sequential stack. Batches are (count, width)
/// with one flattened sample per row; image layers interpret rows in CHW
/// order. forward() caches what the other passes need, so the call contract
/// is: forward first, then any number of backward/jvp/penalty_* calls against
/// that same cached point.
///
/// The penalty_* hooks exist for the gradient-penalty second sweep. Writing
/// the input-gradient computation g = J1^T J2^T ... Jl^T 1 as a graph, a
/// penalty P(g) needs d P / d params, which decomposes per layer into
///   (a) the use of the parameters inside the VJP op itself
///       (penalty_param_grad), and
///   (b) the dependence of the local Jacobian on the forward input, nonzero
///       only for non-piecewise-linear activations (penalty_curvature).
template <typename Scalar>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string kind() const = 0;
  /// VJP at the cached point; accumulates parameter gradients when asked.
  virtual Matrix<Scalar> backward(const Matrix<Scalar>& grad_out, bool accumulate) = 0;
  virtual Matrix<Scalar> forward(const Matrix<Scalar>& x) = 0;
  /// Pushes a tangent through the bias-free linearization at the cached point.
  virtual Matrix<Scalar> jvp(const Matrix<Scalar>& tangent) const = 0;
  /// upstream: VJP input at this layer's output; tangent: second-sweep value
  /// at this layer's input.
  virtual void penalty_param_grad(const Matrix<Scalar>& upstream,
                                  const Matrix<Scalar>& tangent) = 0;
  /// Adjoint injected at this layer's input node, or empty when the local
  /// Jacobian does not depend on the input.
  virtual Matrix<Scalar> penalty_curvature(const Matrix<Scalar>& /*upstream*/,
                                           const Matrix<Scalar>& /*tangent*/) const {
    return {};
  }
  virtual void params(std::vector<ParamSlot<Scalar>>& out, const std::string& prefix) = 0;
};

// ---------------------------------------------------------------------------

template <typename Scalar>
class Dense : public Layer<Scalar> {
 public:
  /// Fan-in-scaled normal init: w ~ N(0, (gain/sqrt(in))^2), b = 0.
  Dense(Index in, Index out, Scalar gain, Rng& rng)
      : w_(out, in), b_(Matrix<Scalar>::Zero(1, out)) {
    rng.fill_normal(w_);
    w_ *= gain / std::sqrt(Scalar(in));
    dw_ = Matrix<Scalar>::Zero(out, in);
    db_ = Matrix<Scalar>::Zero(1, out);
  }

  std::string kind() const override { return "dense"; }

  Matrix<Scalar> forward(const Matrix<Scalar>& x) override {
    x_ = x;
    Matrix<Scalar> y = x * w_.transpose();
    y.rowwise() += b_.row(0);
    return y;
  }

  Matrix<Scalar> backward(const Matrix<Scalar>& g, bool accumulate) override {
    if (accumulate) {
      dw_.noalias() += g.transpose() * x_;
      db_.row(0) += g.colwise().sum();
    }
    return g * w_;
  }

  Matrix<Scalar> jvp(const Matrix<Scalar>& t) const override { return t * w_.transpose(); }

  void penalty_param_grad(const Matrix<Scalar>& upstream,
                          const Matrix<Scalar>& tangent) override {
    // VJP op is g_in = g_out * W; its W-gradient against the tangent adjoint.
    dw_.noalias() += upstream.transpose() * tangent;
  }

  void params(std::vector<ParamSlot<Scalar>>& out, const std::string& prefix) override {
    out.push_back({prefix + ".W", &w_, &dw_});
    out.push_back({prefix + ".b", &b_, &db_});
  }

 private:
  Matrix<Scalar> w_, b_, dw_, db_, x_;
};

// ---------------------------------------------------------------------------

enum class Act { relu, leaky_relu, tanh_ };

template <typename Scalar>
class Activation : public Layer<Scalar> {
 public:
  explicit Activation(Act kind, Scalar leaky_slope = Scalar(0.2))
      : kind_(kind), slope_(leaky_slope) {}

  std::string kind() const override {
    switch (kind_) {
      case Act::relu: return "relu";
      case Act::leaky_relu: return "leaky_relu";
      case Act::tanh_: return "tanh";
    }
    return "?";
  }

  Matrix<Scalar> forward(const Matrix<Scalar>& x) override {
    z_ = x;
    switch (kind_) {
      case Act::relu:
        return x.cwiseMax(Scalar(0));
      case Act::leaky_relu:
        return x.array().max(x.array() * slope_).matrix();
      case Act::tanh_:
        return x.array().tanh().matrix();
    }
    return x;
  }

  Matrix<Scalar> backward(const Matrix<Scalar>& g, bool) override {
    return g.cwiseProduct(dact());
  }

  Matrix<Scalar> jvp(const Matrix<Scalar>& t) const override {
    return t.cwiseProduct(dact());
  }

  void penalty_param_grad(const Matrix<Scalar>&, const Matrix<Scalar>&) override {}

  Matrix<Scalar> penalty_curvature(const Matrix<Scalar>& upstream,
                                   const Matrix<Scalar>& tangent) const override {
    if (kind_ != Act::tanh_) return {};  // piecewise linear: zero curvature a.e.
    // phi'' = -2 tanh (1 - tanh^2)
    auto t = z_.array().tanh();
    Matrix<Scalar> d2 = (Scalar(-2) * t * (Scalar(1) - t.square())).matrix();
    return d2.cwiseProduct(upstream).cwiseProduct(tangent);
  }

  void params(std::vector<ParamSlot<Scalar>>&, const std::string&) override {}

 private:
  Matrix<Scalar> dact() const {
    switch (kind_) {
      case Act::relu:
        return (z_.array() > 0).template cast<Scalar>().matrix();
      case Act::leaky_relu:
        return ((z_.array() > 0).template cast<Scalar>() * (Scalar(1) - slope_) + slope_)
            .matrix();
      case Act::tanh_:
        return (Scalar(1) - z_.array().tanh().square()).matrix();
    }
    return Matrix<Scalar>();
  }

  Act kind_;
  Scalar slope_;
  Matrix<Scalar> z_;
};

// ---------------------------------------------------------------------------

/// Shared convolution geometry. "in" is the convolution's input plane and
/// "out" the plane of sliding-window positions; a transposed convolution uses
/// the same geometry with its own output acting as "in".
struct ConvGeom {
  int in_c, in_h, in_w;
  int out_c, out_h, out_w;
  int k, stride, pad;

  static ConvGeom conv(const ImageShape& in, int out_c, int k, int stride, int pad) {
    ConvGeom g{in.channels, in.height, in.width, out_c, 0, 0, k, stride, pad};
    g.out_h = (in.height + 2 * pad - k) / stride + 1;
    g.out_w = (in.width + 2 * pad - k) / stride + 1;
    check_arg(g.out_h > 0 && g.out_w > 0, "ConvGeom: kernel larger than padded input");
    return g;
  }

  Index patch_rows() const { return Index(in_c) * k * k; }
  Index out_cols() const { return Index(out_h) * out_w; }
};

namespace detail {

// col is (in_c*k*k, out_h*out_w); out-of-bounds taps read as zero.
template <typename Scalar>
void im2col(const Scalar* x, const ConvGeom& g, Matrix<Scalar>& col) {
  col.setZero(g.patch_rows(), g.out_cols());
  for (int c = 0; c < g.in_c; ++c) {
    const Scalar* plane = x + Index(c) * g.in_h * g.in_w;
    for (int di = 0; di < g.k; ++di) {
      for (int dj = 0; dj < g.k; ++dj) {
        const Index row = (Index(c) * g.k + di) * g.k + dj;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * g.stride - g.pad + di;
          if (iy < 0 || iy >= g.in_h) continue;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int ix = ox * g.stride - g.pad + dj;
            if (ix < 0 || ix >= g.in_w) continue;
            col(row, Index(oy) * g.out_w + ox) = plane[Index(iy) * g.in_w + ix];
          }
        }
      }
    }
  }
}

template <typename Scalar>
void col2im_add(const Matrix<Scalar>& col, const ConvGeom& g, Scalar* x) {
  for (int c = 0; c < g.in_c; ++c) {
    Scalar* plane = x + Index(c) * g.in_h * g.in_w;
    for (int di = 0; di < g.k; ++di) {
      for (int dj = 0; dj < g.k; ++dj) {
        const Index row = (Index(c) * g.k + di) * g.k + dj;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * g.stride - g.pad + di;
          if (iy < 0 || iy >= g.in_h) continue;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int ix = ox * g.stride - g.pad + dj;
            if (ix < 0 || ix >= g.in_w) continue;
            plane[Index(iy) * g.in_w + ix] += col(row, Index(oy) * g.out_w + ox);
          }
        }
      }
    }
  }
}

}  // namespace detail

template <typename Scalar>
class Conv2d : public Layer<Scalar> {
 public:
  Conv2d(const ImageShape& in, int out_c, int k, int stride, int pad, Scalar gain, Rng& rng)
      : geom_(ConvGeom::conv(in, out_c, k, stride, pad)),
        w_(out_c, geom_.patch_rows()),
        b_(Matrix<Scalar>::Zero(1, out_c)) {
    rng.fill_normal(w_);
    w_ *= gain / std::sqrt(Scalar(geom_.patch_rows()));
    dw_ = Matrix<Scalar>::Zero(w_.rows(), w_.cols());
    db_ = Matrix<Scalar>::Zero(1, out_c);
  }

  std::string kind() const override { return "conv2d"; }

  ImageShape out_shape() const { return {geom_.out_c, geom_.out_h, geom_.out_w}; }

  Matrix<Scalar> forward(const Matrix<Scalar>& x) override {
    const Index b = x.rows();
    cols_.resize(std::size_t(b));
    Matrix<Scalar> y(b, Index(geom_.out_c) * geom_.out_cols());
    for (Index i = 0; i < b; ++i) {
      detail::im2col(x.row(i).data(), geom_, cols_[std::size_t(i)]);
      Eigen::Map<Matrix<Scalar>> ym(y.row(i).data(), geom_.out_c, geom_.out_cols());
      ym.noalias() = w_ * cols_[std::size_t(i)];
      ym.colwise() += b_.row(0).transpose();
    }
    return y;
  }

  Matrix<Scalar> backward(const Matrix<Scalar>& g, bool accumulate) override {
    const Index b = g.rows();
    Matrix<Scalar> gx = Matrix<Scalar>::Zero(b, Index(geom_.in_c) * geom_.in_h * geom_.in_w);
    for (Index i = 0; i < b; ++i) {
      Eigen::Map<const Matrix<Scalar>> gm(g.row(i).data(), geom_.out_c, geom_.out_cols());
      if (accumulate) {
        dw_.noalias() += gm * cols_[std::size_t(i)].transpose();
        db_.row(0).transpose() += gm.rowwise().sum();
      }
      Matrix<Scalar> gcol = w_.transpose() * gm;
      detail::col2im_add(gcol, geom_, gx.row(i).data());
    }
    return gx;
  }

  Matrix<Scalar> jvp(const Matrix<Scalar>& t) const override {
    const Index b = t.rows();
    Matrix<Scalar> y(b, Index(geom_.out_c) * geom_.out_cols());
    Matrix<Scalar> col;
    for (Index i = 0; i < b; ++i) {
      detail::im2col(t.row(i).data(), geom_, col);
      Eigen::Map<Matrix<Scalar>> ym(y.row(i).data(), geom_.out_c, geom_.out_cols());
      ym.noalias() = w_ * col;
    }
    return y;
  }

  void penalty_param_grad(const Matrix<Scalar>& upstream,
                          const Matrix<Scalar>& tangent) override {
    // Same contraction as the weight gradient, with the tangent in the input
    // role and the VJP upstream in the output-gradient role.
    Matrix<Scalar> col;
    for (Index i = 0; i < upstream.rows(); ++i) {
      detail::im2col(tangent.row(i).data(), geom_, col);
      Eigen::Map<const Matrix<Scalar>> um(upstream.row(i).data(), geom_.out_c,
                                          geom_.out_cols());
      dw_.noalias() += um * col.transpose();
    }
  }

  void params(std::vector<ParamSlot<Scalar>>& out, const std::string& prefix) override {
    out.push_back({prefix + ".W", &w_, &dw_});
    out.push_back({prefix + ".b", &b_, &db_});
  }

 private:
  ConvGeom geom_;
  Matrix<Scalar> w_, b_, dw_, db_;
  std::vector<Matrix<Scalar>> cols_;
};

template <typename Scalar>
class ConvTranspose2d : public Layer<Scalar> {
 public:
  /// Maps (in_c, in_h, in_w) to the plane whose strided convolution would
  /// produce the input; with k=4, stride=2, pad=1 this doubles H and W.
  ConvTranspose2d(const ImageShape& in, int out_c, int k, int stride, int pad, Scalar gain,
                  Rng& rng)
      : in_shape_(in) {
    const int out_h = (in.height - 1) * stride - 2 * pad + k;
    const int out_w = (in.width - 1) * stride - 2 * pad + k;
    geom_ = ConvGeom::conv({out_c, out_h, out_w}, in.channels, k, stride, pad);
    check_arg(geom_.out_h == in.height && geom_.out_w == in.width,
              "ConvTranspose2d: geometry does not invert");
    w_ = Matrix<Scalar>(in.channels, geom_.patch_rows());
    rng.fill_normal(w_);
    w_ *= gain / std::sqrt(Scalar(Index(in.channels) * k * k));
    b_ = Matrix<Scalar>::Zero(1, out_c);
    dw_ = Matrix<Scalar>::Zero(w_.rows(), w_.cols());
    db_ = Matrix<Scalar>::Zero(1, out_c);
  }

  std::string kind() const override { return "conv_transpose2d"; }

  ImageShape out_shape() const { return {geom_.in_c, geom_.in_h, geom_.in_w}; }

  Matrix<Scalar> forward(const Matrix<Scalar>& x) override {
    x_ = x;
    const Index b = x.rows();
    const Index out_px = Index(geom_.in_c) * geom_.in_h * geom_.in_w;
    Matrix<Scalar> y = Matrix<Scalar>::Zero(b, out_px);
    for (Index i = 0; i < b; ++i) {
      Eigen::Map<const Matrix<Scalar>> xm(x.row(i).data(), in_shape_.channels,
                                          geom_.out_cols());
      Matrix<Scalar> col = w_.transpose() * xm;
      detail::col2im_add(col, geom_, y.row(i).data());
      Eigen::Map<Matrix<Scalar>> ym(y.row(i).data(), geom_.in_c,
                                    Index(geom_.in_h) * geom_.in_w);
      ym.colwise() += b_.row(0).transpose();
    }
    return y;
  }

  Matrix<Scalar> backward(const Matrix<Scalar>& g, bool accumulate) override {
    const Index b = g.rows();
    Matrix<Scalar> gx(b, Index(in_shape_.channels) * in_shape_.height * in_shape_.width);
    Matrix<Scalar> col;
    for (Index i = 0; i < b; ++i) {
      detail::im2col(g.row(i).data(), geom_, col);
      Eigen::Map<Matrix<Scalar>> gm(gx.row(i).data(), in_shape_.channels, geom_.out_cols());
      gm.noalias() = w_ * col;
      if (accumulate) {
        Eigen::Map<const Matrix<Scalar>> xm(x_.row(i).data(), in_shape_.channels,
                                            geom_.out_cols());
        dw_.noalias() += xm * col.transpose();
        Eigen::Map<const Matrix<Scalar>> gom(g.row(i).data(), geom_.in_c,
                                             Index(geom_.in_h) * geom_.in_w);
        db_.row(0).transpose() += gom.rowwise().sum();
      }
    }
    return gx;
  }

  Matrix<Scalar> jvp(const Matrix<Scalar>& t) const override {
    const Index b = t.rows();
    const Index out_px = Index(geom_.in_c) * geom_.in_h * geom_.in_w;
    Matrix<Scalar> y = Matrix<Scalar>::Zero(b, out_px);
    for (Index i = 0; i < b; ++i) {
      Eigen::Map<const Matrix<Scalar>> tm(t.row(i).data(), in_shape_.channels,
                                          geom_.out_cols());
      Matrix<Scalar> col = w_.transpose() * tm;
      detail::col2im_add(col, geom_, y.row(i).data());
    }
    return y;
  }

  void penalty_param_grad(const Matrix<Scalar>& upstream,
                          const Matrix<Scalar>& tangent) override {
    Matrix<Scalar> col;
    for (Index i = 0; i < upstream.rows(); ++i) {
      detail::im2col(upstream.row(i).data(), geom_, col);
      Eigen::Map<const Matrix<Scalar>> vm(tangent.row(i).data(), in_shape_.channels,
                                          geom_.out_cols());
      dw_.noalias() += vm * col.transpose();
    }
  }

  void params(std::vector<ParamSlot<Scalar>>& out, const std::string& prefix) override {
    out.push_back({prefix + ".W", &w_, &dw_});
    out.push_back({prefix + ".b", &b_, &db_});
  }

 private:
  ImageShape in_shape_;
  ConvGeom geom_;  // geometry of the underlying forward convolution
  Matrix<Scalar> w_, b_, dw_, db_, x_;
};

}  // namespace tgan
