#include "tgan/data_pipeline.hpp"

#include <cstdio>
#include <fstream>

namespace tgan {

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  check_state(bool(in), "cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(bytes.data()), size);
  check_state(bool(in), "short read on " + path);
  return bytes;
}

std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

struct IdxImages {
  std::vector<std::uint8_t> pixels;
  int count, rows, cols;
};

IdxImages read_idx_images(const std::string& path) {
  auto bytes = read_file(path);
  check_state(bytes.size() >= 16, path + ": truncated IDX image header");
  const std::uint32_t magic = be32(bytes.data());
  check_state(magic == 2051, path + ": bad IDX image magic " + std::to_string(magic) +
                                 " (expected 2051)");
  IdxImages out;
  out.count = int(be32(bytes.data() + 4));
  out.rows = int(be32(bytes.data() + 8));
  out.cols = int(be32(bytes.data() + 12));
  const std::size_t want = 16 + std::size_t(out.count) * out.rows * out.cols;
  check_state(bytes.size() == want, path + ": truncated IDX image payload (" +
                                        std::to_string(bytes.size()) + " bytes, want " +
                                        std::to_string(want) + ")");
  out.pixels.assign(bytes.begin() + 16, bytes.end());
  return out;
}

std::vector<int> read_idx_labels(const std::string& path) {
  auto bytes = read_file(path);
  check_state(bytes.size() >= 8, path + ": truncated IDX label header");
  const std::uint32_t magic = be32(bytes.data());
  check_state(magic == 2049, path + ": bad IDX label magic " + std::to_string(magic) +
                                 " (expected 2049)");
  const int count = int(be32(bytes.data() + 4));
  check_state(bytes.size() == 8 + std::size_t(count),
              path + ": truncated IDX label payload");
  std::vector<int> labels(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = int(bytes[8 + i]);
  return labels;
}

}  // namespace

RawImageStore load_mnist_raw(const std::string& dir) {
  auto tri = read_idx_images(dir + "/train-images-idx3-ubyte");
  auto trl = read_idx_labels(dir + "/train-labels-idx1-ubyte");
  auto tei = read_idx_images(dir + "/t10k-images-idx3-ubyte");
  auto tel = read_idx_labels(dir + "/t10k-labels-idx1-ubyte");
  check_state(tri.count == int(trl.size()), "mnist: train image/label count mismatch");
  check_state(tei.count == int(tel.size()), "mnist: test image/label count mismatch");
  check_state(tri.rows == tei.rows && tri.cols == tei.cols,
              "mnist: train/test image dimensions differ");
  for (int v : trl) check_state(v >= 0 && v <= 9, "mnist: label out of range");
  for (int v : tel) check_state(v >= 0 && v <= 9, "mnist: label out of range");

  RawImageStore out;
  out.shape = {1, tri.rows, tri.cols};
  out.train_pixels = std::move(tri.pixels);
  out.train_labels = std::move(trl);
  out.test_pixels = std::move(tei.pixels);
  out.test_labels = std::move(tel);
  return out;
}

namespace {

constexpr std::size_t kCifarRecord = 3073;  // 1 label byte + 3 * 1024 pixels

void read_cifar_batch(const std::string& path, std::vector<std::uint8_t>& pixels,
                      std::vector<int>& labels) {
  auto bytes = read_file(path);
  check_state(bytes.size() % kCifarRecord == 0,
              path + ": size is not a multiple of the 3073-byte record");
  const std::size_t n = bytes.size() / kCifarRecord;
  check_state(n > 0, path + ": empty batch");
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* rec = bytes.data() + i * kCifarRecord;
    check_state(rec[0] <= 9, path + ": label byte out of range");
    labels.push_back(int(rec[0]));
    pixels.insert(pixels.end(), rec + 1, rec + kCifarRecord);
  }
}

}  // namespace

RawImageStore load_cifar10_raw(const std::string& dir) {
  RawImageStore out;
  out.shape = {3, 32, 32};
  for (int b = 1; b <= 5; ++b)
    read_cifar_batch(dir + "/data_batch_" + std::to_string(b) + ".bin", out.train_pixels,
                     out.train_labels);
  read_cifar_batch(dir + "/test_batch.bin", out.test_pixels, out.test_labels);
  return out;
}

void save_split_manifest(const std::vector<Index>& xn_source,
                         const std::vector<Index>& xu_source, int novel_class,
                         double pi_requested, double pi_actual, const std::string& path) {
  std::ofstream out(path);
  check_state(bool(out), "cannot write " + path);
  char buf[64];
  out << "novel_class " << novel_class << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", pi_requested);
  out << "pi_requested " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", pi_actual);
  out << "pi_actual " << buf << "\n";
  out << "[x_n]\n";
  for (Index i : xn_source) out << i << "\n";
  out << "[x_u]\n";
  for (Index i : xu_source) out << i << "\n";
  check_state(bool(out), "write failure on " + path);
}

}  // namespace tgan
