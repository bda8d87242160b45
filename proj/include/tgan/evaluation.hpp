#pragma once

#include "tgan/data_pipeline.hpp"
#include "tgan/png_io.hpp"
#include "tgan/types.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tgan {

/// Exact rank-based AUROC: P(score_pos > score_neg) + 1/2 P(tie). Higher
/// score = more novel; labels are +1 novel / -1 inlier.
double auroc(const Vector<double>& scores, const std::vector<int>& labels);

/// The only gateway to NoveltySplit's hidden labels. Evaluation-stage code
/// takes its key from here; training and detector APIs have no parameter that
/// could carry it.
class EvalAccess {
 public:
  static EvalLabelKey key() { return {}; }
};

template <typename Scalar>
double auroc_of_split(const NoveltySplit<Scalar>& split, const Vector<double>& scores) {
  return auroc(scores, split.hidden_labels(EvalAccess::key()));
}

struct EvalReport {
  std::string dataset;
  std::string mode;  // transduct | vanilla
  int novel_class = 0;
  double pi_requested = 0.0;
  double pi_actual = 0.0;
  std::uint64_t seed = 0;
  double auroc = 0.0;
  std::vector<std::pair<std::string, double>> loss_summary;  // final-epoch means
  std::vector<std::string> artifact_paths;
};

/// Row-major rows x cols grid PNG with `pad` background pixels between tiles;
/// values are de-normalized from [-1, 1] back to [0, 255]. Needs 1- or
/// 3-channel tiles and count >= rows*cols.
template <typename Scalar>
void export_image_grid(const ImageBatch<Scalar>& images, int rows, int cols,
                       const std::string& path, int pad = 2) {
  images.validate();
  check_arg(rows >= 1 && cols >= 1, "export_image_grid: empty grid");
  check_arg(images.count() >= Index(rows) * cols,
            "export_image_grid: not enough images for the grid");
  const int c = images.shape.channels;
  check_arg(c == 1 || c == 3, "export_image_grid: channels must be 1 or 3");
  const int h = images.shape.height, w = images.shape.width;
  const int out_h = rows * h + (rows - 1) * pad;
  const int out_w = cols * w + (cols - 1) * pad;
  std::vector<std::uint8_t> pixels(std::size_t(out_h) * out_w * c, 0);

  const auto denorm = [](double v) {
    const double x = std::round((v + 1.0) * 127.5);
    return std::uint8_t(x < 0 ? 0 : (x > 255 ? 255 : x));
  };
  for (int r = 0; r < rows; ++r) {
    for (int col = 0; col < cols; ++col) {
      const Index tile = Index(r) * cols + col;
      const int y0 = r * (h + pad), x0 = col * (w + pad);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          for (int ch = 0; ch < c; ++ch) {
            const double v = double(images.data(tile, (Index(ch) * h + y) * w + x));
            pixels[(std::size_t(y0 + y) * out_w + (x0 + x)) * c + ch] = denorm(v);
          }
        }
      }
    }
  }
  write_png(path, pixels, out_w, out_h, c);
}

/// Wide-format results table mirroring the per-class AUROC summary: one row
/// per novel class, one "mean(std)" cell per (method, pi) column, and a final
/// plain-mean row. All reports must share one dataset.
void export_results_table(const std::vector<EvalReport>& reports, const std::string& path);

}  // namespace tgan
