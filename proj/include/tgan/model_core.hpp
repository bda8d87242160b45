#pragma once

#include "tgan/net.hpp"
#include "tgan/types.hpp"

#include <optional>
#include <string>

namespace tgan {

/// E: image batch -> latent codes.
template <typename Scalar>
struct Encoder {
  Net<Scalar> net;
  ImageShape input_shape;
  int latent_dim = 0;
};

/// G: latent codes -> image batch. Bounded generators end in tanh and emit
/// values in [-1, 1]; the synthetic-2D generator is unbounded because its
/// targets live outside that range.
template <typename Scalar>
struct Generator {
  Net<Scalar> net;
  int latent_dim = 0;
  ImageShape output_shape;
  bool bounded = true;
};

enum class CriticDomain { latent, image };

/// Wasserstein critic: unbounded scalar score per sample, no output
/// nonlinearity, differentiable in its input.
template <typename Scalar>
struct Critic {
  Net<Scalar> net;
  CriticDomain domain = CriticDomain::latent;
  Index input_dim = 0;
  ImageShape image_shape;  // meaningful only for image critics
};

template <typename Scalar>
struct NetworkSet {
  Encoder<Scalar> encoder;
  Generator<Scalar> generator;
  Critic<Scalar> d_zu;
  Critic<Scalar> d_zn;
  Critic<Scalar> d_xu;
  std::optional<Critic<Scalar>> d_xn;  // present only when the negative branch is on
};

// ---------------------------------------------------------------------------
// Checked forward ops.

template <typename Scalar>
LatentBatch<Scalar> encode(Encoder<Scalar>& e, const ImageBatch<Scalar>& x) {
  x.validate();
  check_arg(x.shape == e.input_shape, "encode: batch shape " + x.shape.str() +
                                          " does not match encoder input " +
                                          e.input_shape.str());
  check_arg(x.count() >= 1, "encode: empty batch");
  Matrix<Scalar> z = e.net.forward(x.data);
  check_state(z.cols() == e.latent_dim, "encode: encoder head width mismatch");
  return {std::move(z), LatentOrigin::encoded};
}

template <typename Scalar>
ImageBatch<Scalar> generate(Generator<Scalar>& g, const LatentBatch<Scalar>& z) {
  check_arg(z.dim() == g.latent_dim, "generate: latent width " + std::to_string(z.dim()) +
                                         " does not match generator latent_dim " +
                                         std::to_string(g.latent_dim));
  check_arg(z.count() >= 1, "generate: empty batch");
  ImageBatch<Scalar> out{g.net.forward(z.codes), g.output_shape};
  out.validate();
  return out;
}

template <typename Scalar>
Vector<Scalar> criticize(Critic<Scalar>& d, const Matrix<Scalar>& batch) {
  check_arg(batch.cols() == d.input_dim, "criticize: input width " +
                                             std::to_string(batch.cols()) +
                                             " does not match critic domain width " +
                                             std::to_string(d.input_dim));
  Matrix<Scalar> s = d.net.forward(batch);
  check_state(s.cols() == 1, "criticize: critic must emit one score per sample");
  return s.col(0);
}

template <typename Scalar>
Vector<Scalar> criticize(Critic<Scalar>& d, const LatentBatch<Scalar>& z) {
  check_arg(d.domain == CriticDomain::latent, "criticize: latent batch fed to image critic");
  return criticize(d, z.codes);
}

template <typename Scalar>
Vector<Scalar> criticize(Critic<Scalar>& d, const ImageBatch<Scalar>& x) {
  check_arg(d.domain == CriticDomain::image, "criticize: image batch fed to latent critic");
  check_arg(x.shape == d.image_shape, "criticize: image shape mismatch");
  return criticize(d, x.data);
}

// ---------------------------------------------------------------------------
// Architecture builders. Critics use leaky-relu stacks (piecewise linear, as
// the gradient-penalty machinery expects); generators use relu hidden layers.

template <typename Scalar>
Net<Scalar> mlp(Index in, std::initializer_list<Index> hidden, Index out, Act act,
                Rng& rng, bool tanh_head = false) {
  Net<Scalar> net;
  Index prev = in;
  const Scalar gain = act == Act::tanh_ ? Scalar(1) : Scalar(std::sqrt(2.0));
  for (Index h : hidden) {
    net.template emplace<Dense<Scalar>>(prev, h, gain, rng);
    net.template emplace<Activation<Scalar>>(act);
    prev = h;
  }
  net.template emplace<Dense<Scalar>>(prev, out, Scalar(1), rng);
  if (tanh_head) net.template emplace<Activation<Scalar>>(Act::tanh_);
  return net;
}

template <typename Scalar>
Critic<Scalar> make_latent_critic(int latent_dim, Index hidden, Rng& rng) {
  Critic<Scalar> c;
  c.domain = CriticDomain::latent;
  c.input_dim = latent_dim;
  c.net = mlp<Scalar>(latent_dim, {hidden, hidden}, 1, Act::leaky_relu, rng);
  return c;
}

/// Fully connected model family for the 2-D benchmark: three-layer maps with
/// the given hidden width, linear generator output.
template <typename Scalar>
NetworkSet<Scalar> build_synthetic_nets(int latent_dim, Index hidden, bool negative_branch,
                                        Rng& rng) {
  check_arg(latent_dim >= 1, "build_synthetic_nets: latent_dim >= 1");
  const ImageShape shape{1, 1, 2};
  NetworkSet<Scalar> nets;
  nets.encoder.input_shape = shape;
  nets.encoder.latent_dim = latent_dim;
  nets.encoder.net = mlp<Scalar>(shape.pixels(), {hidden, hidden}, latent_dim,
                                 Act::leaky_relu, rng);
  nets.generator.latent_dim = latent_dim;
  nets.generator.output_shape = shape;
  nets.generator.bounded = false;
  nets.generator.net = mlp<Scalar>(latent_dim, {hidden, hidden}, shape.pixels(),
                                   Act::relu, rng);
  nets.d_zu = make_latent_critic<Scalar>(latent_dim, hidden, rng);
  nets.d_zn = make_latent_critic<Scalar>(latent_dim, hidden, rng);
  nets.d_xu.domain = CriticDomain::image;
  nets.d_xu.input_dim = shape.pixels();
  nets.d_xu.image_shape = shape;
  nets.d_xu.net = mlp<Scalar>(shape.pixels(), {hidden, hidden}, 1, Act::leaky_relu, rng);
  if (negative_branch) {
    Critic<Scalar> d_xn;
    d_xn.domain = CriticDomain::image;
    d_xn.input_dim = shape.pixels();
    d_xn.image_shape = shape;
    d_xn.net = mlp<Scalar>(shape.pixels(), {hidden, hidden}, 1, Act::leaky_relu, rng);
    nets.d_xn = std::move(d_xn);
  }
  return nets;
}

/// Convolutional model family for image datasets. Strided conv critics with a
/// linear score head, mirrored transposed-conv generator with a tanh head,
/// encoder sharing the critic topology with a latent linear head. base_c
/// scales the channel widths.
template <typename Scalar>
Net<Scalar> conv_critic_trunk(const ImageShape& in, int base_c, Index head_out, Rng& rng) {
  check_arg(in.height % 4 == 0 && in.width % 4 == 0,
            "conv trunk expects H and W divisible by 4");
  Net<Scalar> net;
  const Scalar g = Scalar(std::sqrt(2.0));
  auto& c1 = net.template emplace<Conv2d<Scalar>>(in, base_c, 4, 2, 1, g, rng);
  net.template emplace<Activation<Scalar>>(Act::leaky_relu);
  auto& c2 = net.template emplace<Conv2d<Scalar>>(c1.out_shape(), base_c * 2, 4, 2, 1, g, rng);
  net.template emplace<Activation<Scalar>>(Act::leaky_relu);
  const ImageShape s2 = c2.out_shape();
  net.template emplace<Dense<Scalar>>(s2.pixels(), head_out, Scalar(1), rng);
  return net;
}

template <typename Scalar>
NetworkSet<Scalar> build_conv_nets(const ImageShape& image, int latent_dim, int base_c,
                                   Index latent_hidden, bool negative_branch, Rng& rng) {
  check_arg(image.pixels() >= latent_dim,
            "build_conv_nets: input dimension must not be smaller than latent_dim");
  NetworkSet<Scalar> nets;
  nets.encoder.input_shape = image;
  nets.encoder.latent_dim = latent_dim;
  nets.encoder.net = conv_critic_trunk<Scalar>(image, base_c, latent_dim, rng);

  // Generator: dense projection to a (2*base_c, H/4, W/4) seed, two upsampling
  // transposed convolutions back to the image plane, tanh output.
  const ImageShape seed{base_c * 2, image.height / 4, image.width / 4};
  nets.generator.latent_dim = latent_dim;
  nets.generator.output_shape = image;
  nets.generator.bounded = true;
  {
    Net<Scalar> g;
    const Scalar gn = Scalar(std::sqrt(2.0));
    g.template emplace<Dense<Scalar>>(latent_dim, seed.pixels(), gn, rng);
    g.template emplace<Activation<Scalar>>(Act::relu);
    auto& t1 = g.template emplace<ConvTranspose2d<Scalar>>(seed, base_c, 4, 2, 1, gn, rng);
    g.template emplace<Activation<Scalar>>(Act::relu);
    auto& t2 = g.template emplace<ConvTranspose2d<Scalar>>(t1.out_shape(), image.channels,
                                                           4, 2, 1, Scalar(1), rng);
    check_state(t2.out_shape() == image, "build_conv_nets: generator does not reach " +
                                             image.str() + " from seed " + seed.str());
    g.template emplace<Activation<Scalar>>(Act::tanh_);
    nets.generator.net = std::move(g);
  }

  nets.d_zu = make_latent_critic<Scalar>(latent_dim, latent_hidden, rng);
  nets.d_zn = make_latent_critic<Scalar>(latent_dim, latent_hidden, rng);
  nets.d_xu.domain = CriticDomain::image;
  nets.d_xu.input_dim = image.pixels();
  nets.d_xu.image_shape = image;
  nets.d_xu.net = conv_critic_trunk<Scalar>(image, base_c, 1, rng);
  if (negative_branch) {
    Critic<Scalar> d_xn;
    d_xn.domain = CriticDomain::image;
    d_xn.input_dim = image.pixels();
    d_xn.image_shape = image;
    d_xn.net = conv_critic_trunk<Scalar>(image, base_c, 1, rng);
    nets.d_xn = std::move(d_xn);
  }
  return nets;
}

}  // namespace tgan
