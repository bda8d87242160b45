#pragma once

#include "tgan/layers.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace tgan {

/// Sequential stack of layers mapping (count, in_width) to (count, out_width),
/// each row independently.
template <typename Scalar>
class Net {
 public:
  Net() = default;
  Net(Net&&) noexcept = default;
  Net& operator=(Net&&) noexcept = default;

  template <typename L, typename... Args>
  L& emplace(Args&&... args) {
    auto l = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *l;
    layers_.push_back(std::move(l));
    return ref;
  }

  std::size_t size() const { return layers_.size(); }
  bool empty() const { return layers_.empty(); }

  Matrix<Scalar> forward(const Matrix<Scalar>& x) {
    Matrix<Scalar> h = x;
    for (auto& l : layers_) h = l->forward(h);
    return h;
  }

  /// VJP through the whole stack at the last forward point.
  Matrix<Scalar> backward(const Matrix<Scalar>& grad_out, bool accumulate = true) {
    Matrix<Scalar> g = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
      g = (*it)->backward(g, accumulate);
    return g;
  }

  /// VJP recording the gradient entering each layer's output.
  /// Returns {input_grad, per_layer_output_grads}; out[k] is the upstream at
  /// layer k's output (so out.back() == seed).
  std::pair<Matrix<Scalar>, std::vector<Matrix<Scalar>>> backward_trace(
      const Matrix<Scalar>& seed) {
    std::vector<Matrix<Scalar>> out(layers_.size());
    Matrix<Scalar> g = seed;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      out[k] = g;
      g = layers_[k]->backward(g, false);
    }
    return {std::move(g), std::move(out)};
  }

  /// Second sweep of the gradient-penalty backprop. `trace` comes from
  /// backward_trace over this net at the current cached point; `tangent` is
  /// the penalty's adjoint with respect to the per-sample input gradient.
  /// Accumulates d penalty / d params into the layer gradients.
  void penalty_backward(const std::vector<Matrix<Scalar>>& trace, Matrix<Scalar> tangent) {
    std::vector<Matrix<Scalar>> stashes(layers_.size());
    bool any_curvature = false;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      layers_[k]->penalty_param_grad(trace[k], tangent);
      Matrix<Scalar> s = layers_[k]->penalty_curvature(trace[k], tangent);
      if (s.size() > 0) {
        stashes[k] = std::move(s);
        any_curvature = true;
      }
      if (k + 1 < layers_.size()) tangent = layers_[k]->jvp(tangent);
    }
    if (!any_curvature) return;
    // Curvature stashes are adjoints of forward activations; flush them down
    // the forward chain with a standard accumulating backward.
    Matrix<Scalar> g;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      if (g.size() > 0) g = layers_[k]->backward(g, true);
      if (stashes[k].size() > 0) {
        if (g.size() > 0)
          g += stashes[k];
        else
          g = std::move(stashes[k]);
      }
    }
  }

  std::vector<ParamSlot<Scalar>> params(const std::string& prefix = "") {
    std::vector<ParamSlot<Scalar>> out;
    for (std::size_t k = 0; k < layers_.size(); ++k)
      layers_[k]->params(out, prefix + "l" + std::to_string(k));
    return out;
  }

  void zero_grads() {
    for (auto& p : params()) p.grad->setZero();
  }

  Index parameter_count() {
    Index n = 0;
    for (auto& p : params()) n += p.value->size();
    return n;
  }

 private:
  std::vector<std::unique_ptr<Layer<Scalar>>> layers_;
};

/// Order-stable digest of all parameter values; used to assert which nets a
/// training phase touched.
template <typename Scalar>
double parameter_fingerprint(Net<Scalar>& net) {
  double acc = 0.0;
  int k = 1;
  for (auto& p : net.params()) {
    const auto* d = p.value->data();
    for (Index i = 0; i < p.value->size(); ++i, ++k)
      acc += double(d[i]) * std::sin(double(k));
    acc += 1e-3 * double(p.value->size());
  }
  return acc;
}

struct AdamConfig {
  double step_size = 1e-4;
  double beta1 = 0.0;
  double beta2 = 0.9;
  double eps = 1e-8;
};

/// Adaptive moment optimizer bound to one net; moments persist across steps.
template <typename Scalar>
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  long steps() const { return t_; }

  /// Applies accumulated gradients and zeroes them.
  void step(Net<Scalar>& net) {
    auto ps = net.params();
    if (m_.empty()) {
      for (auto& p : ps) {
        m_.push_back(Matrix<Scalar>::Zero(p.value->rows(), p.value->cols()));
        v_.push_back(Matrix<Scalar>::Zero(p.value->rows(), p.value->cols()));
      }
    }
    check_state(m_.size() == ps.size(), "Adam: bound net changed shape");
    ++t_;
    const Scalar b1 = Scalar(cfg_.beta1), b2 = Scalar(cfg_.beta2);
    const Scalar c1 = Scalar(1) - Scalar(std::pow(cfg_.beta1, double(t_)));
    const Scalar c2 = Scalar(1) - Scalar(std::pow(cfg_.beta2, double(t_)));
    const Scalar lr = Scalar(cfg_.step_size);
    const Scalar eps = Scalar(cfg_.eps);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      auto& g = *ps[i].grad;
      m_[i] = b1 * m_[i] + (Scalar(1) - b1) * g;
      v_[i] = (b2 * v_[i].array() + (Scalar(1) - b2) * g.array().square()).matrix();
      ps[i].value->array() -=
          lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps);
      g.setZero();
    }
  }

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<Matrix<Scalar>> m_, v_;
};

}  // namespace tgan
