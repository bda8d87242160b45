#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tgan {

// Batches hold one flattened sample per row, so row-major keeps samples
// contiguous in memory.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

inline void check_arg(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

inline void check_state(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}

/// Per-sample layout of an image row: CHW order, index = (c*H + y)*W + x.
struct ImageShape {
  int channels = 0;
  int height = 0;
  int width = 0;

  Index pixels() const { return Index(channels) * height * width; }

  bool operator==(const ImageShape& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
  bool operator!=(const ImageShape& o) const { return !(*this == o); }

  std::string str() const {
    return "(" + std::to_string(channels) + "," + std::to_string(height) + "," +
           std::to_string(width) + ")";
  }
};

enum class LatentOrigin { negative_prior, positive_prior, unlabeled_prior, encoded };

template <typename Scalar>
struct LatentBatch {
  Matrix<Scalar> codes;  // (count, latent_dim)
  LatentOrigin origin = LatentOrigin::encoded;

  Index count() const { return codes.rows(); }
  Index dim() const { return codes.cols(); }
};

template <typename Scalar>
struct ImageBatch {
  Matrix<Scalar> data;  // (count, channels*height*width)
  ImageShape shape;

  Index count() const { return data.rows(); }

  void validate() const {
    check_arg(data.cols() == shape.pixels(),
              "ImageBatch: row width " + std::to_string(data.cols()) +
                  " does not match shape " + shape.str());
  }
};

template <typename Scalar>
bool all_finite(const Matrix<Scalar>& m) {
  return m.allFinite();
}

}  // namespace tgan
