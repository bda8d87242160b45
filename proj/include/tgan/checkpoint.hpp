#pragma once

#include "tgan/detector.hpp"
#include "tgan/model_core.hpp"

#include <cstring>
#include <map>
#include <string>
#include <vector>

namespace tgan {

/// Little-endian binary archive: magic + meta text entries + named tensors +
/// trailing CRC32. Loads verify the checksum before parsing and validate all
/// shapes before touching any destination, so a failed load changes nothing.
struct Archive {
  static constexpr int kFormatVersion = 1;

  enum DType : std::uint8_t { f32 = 0, f64 = 1 };

  struct Tensor {
    DType dtype = f32;
    Index rows = 0, cols = 0;
    std::vector<std::uint8_t> bytes;
  };

  std::map<std::string, std::string> meta;
  std::map<std::string, Tensor> tensors;

  void save(const std::string& path) const;
  static Archive load(const std::string& path);

  template <typename Scalar>
  void put(const std::string& name, const Matrix<Scalar>& m) {
    Tensor t;
    t.dtype = sizeof(Scalar) == 4 ? f32 : f64;
    t.rows = m.rows();
    t.cols = m.cols();
    t.bytes.resize(std::size_t(m.size()) * sizeof(Scalar));
    std::memcpy(t.bytes.data(), m.data(), t.bytes.size());
    tensors[name] = std::move(t);
  }

  template <typename Scalar>
  Matrix<Scalar> get(const std::string& name) const {
    auto it = tensors.find(name);
    check_state(it != tensors.end(), "checkpoint: missing tensor " + name);
    const Tensor& t = it->second;
    check_state(t.dtype == (sizeof(Scalar) == 4 ? f32 : f64),
                "checkpoint: dtype mismatch for " + name);
    Matrix<Scalar> m(t.rows, t.cols);
    check_state(t.bytes.size() == std::size_t(m.size()) * sizeof(Scalar),
                "checkpoint: payload size mismatch for " + name);
    std::memcpy(m.data(), t.bytes.data(), t.bytes.size());
    return m;
  }
};

// ---------------------------------------------------------------------------

template <typename Scalar>
void put_net(Archive& a, const std::string& prefix, Net<Scalar>& net) {
  for (auto& p : net.params(prefix + ".")) a.put(p.name, *p.value);
}

/// Restores parameters by name into an already-built net; every tensor is
/// shape-checked before any value is written.
template <typename Scalar>
void get_net(const Archive& a, const std::string& prefix, Net<Scalar>& net) {
  auto slots = net.params(prefix + ".");
  std::vector<Matrix<Scalar>> staged;
  staged.reserve(slots.size());
  for (auto& p : slots) {
    Matrix<Scalar> m = a.template get<Scalar>(p.name);
    check_state(m.rows() == p.value->rows() && m.cols() == p.value->cols(),
                "checkpoint: shape mismatch for " + p.name + " (" +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    " stored vs " + std::to_string(p.value->rows()) + "x" +
                    std::to_string(p.value->cols()) + " expected)");
    staged.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < slots.size(); ++i) *slots[i].value = std::move(staged[i]);
}

template <typename Scalar>
void put_network_set(Archive& a, NetworkSet<Scalar>& nets) {
  put_net(a, "encoder", nets.encoder.net);
  put_net(a, "generator", nets.generator.net);
  put_net(a, "d_zu", nets.d_zu.net);
  put_net(a, "d_zn", nets.d_zn.net);
  put_net(a, "d_xu", nets.d_xu.net);
  a.meta["has_d_xn"] = nets.d_xn ? "1" : "0";
  if (nets.d_xn) put_net(a, "d_xn", nets.d_xn->net);
}

template <typename Scalar>
void get_network_set(const Archive& a, NetworkSet<Scalar>& nets) {
  get_net(a, "encoder", nets.encoder.net);
  get_net(a, "generator", nets.generator.net);
  get_net(a, "d_zu", nets.d_zu.net);
  get_net(a, "d_zn", nets.d_zn.net);
  get_net(a, "d_xu", nets.d_xu.net);
  auto it = a.meta.find("has_d_xn");
  const bool stored_xn = it != a.meta.end() && it->second == "1";
  check_state(stored_xn == nets.d_xn.has_value(),
              "checkpoint: negative-branch critic presence mismatch");
  if (nets.d_xn) get_net(a, "d_xn", nets.d_xn->net);
}

inline void put_detector(Archive& a, const DetectorModel& model) {
  a.meta["detector_kind"] =
      model.kind == DetectorKind::latent_linear ? "latent_linear" : "image_rbf";
  a.meta["detector_feature_dim"] = std::to_string(model.feature_dim);
  if (model.kind == DetectorKind::latent_linear) {
    Matrix<double> w(1, model.linear.w.size());
    w.row(0) = model.linear.w.transpose();
    a.put("detector.w", w);
  } else {
    a.put("detector.support", model.rbf.support);
    Matrix<double> ay(1, model.rbf.alpha_y.size());
    ay.row(0) = model.rbf.alpha_y.transpose();
    a.put("detector.alpha_y", ay);
    Matrix<double> g(1, 1);
    g(0, 0) = model.rbf.gamma;
    a.put("detector.gamma", g);
  }
}

inline DetectorModel get_detector(const Archive& a) {
  auto it = a.meta.find("detector_kind");
  check_state(it != a.meta.end(), "checkpoint: no detector stored");
  DetectorModel model;
  model.feature_dim = std::stol(a.meta.at("detector_feature_dim"));
  if (it->second == "latent_linear") {
    model.kind = DetectorKind::latent_linear;
    model.linear.w = a.get<double>("detector.w").row(0).transpose();
  } else if (it->second == "image_rbf") {
    model.kind = DetectorKind::image_rbf;
    model.rbf.support = a.get<double>("detector.support");
    model.rbf.alpha_y = a.get<double>("detector.alpha_y").row(0).transpose();
    model.rbf.gamma = a.get<double>("detector.gamma")(0, 0);
  } else {
    check_state(false, "checkpoint: unknown detector kind " + it->second);
  }
  return model;
}

}  // namespace tgan
