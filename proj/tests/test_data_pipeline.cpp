#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tgan/data_pipeline.hpp"
#include "tgan/evaluation.hpp"

#include <filesystem>
#include <fstream>

using namespace tgan;
namespace fs = std::filesystem;

namespace {

const fs::path kTmp = fs::temp_directory_path() / "tgan_data_pipeline_test";

void put_be32(std::ofstream& f, std::uint32_t v) {
  const char b[4] = {char(v >> 24), char(v >> 16), char(v >> 8), char(v)};
  f.write(b, 4);
}

void write_idx_images(const fs::path& p, const std::vector<std::uint8_t>& px, int count,
                      int rows, int cols, std::uint32_t magic = 2051, bool truncate = false) {
  std::ofstream f(p, std::ios::binary);
  put_be32(f, magic);
  put_be32(f, std::uint32_t(count));
  put_be32(f, std::uint32_t(rows));
  put_be32(f, std::uint32_t(cols));
  const std::size_t n = truncate ? px.size() / 2 : px.size();
  f.write(reinterpret_cast<const char*>(px.data()), std::streamsize(n));
}

void write_idx_labels(const fs::path& p, const std::vector<std::uint8_t>& labels,
                      std::uint32_t magic = 2049) {
  std::ofstream f(p, std::ios::binary);
  put_be32(f, magic);
  put_be32(f, std::uint32_t(labels.size()));
  f.write(reinterpret_cast<const char*>(labels.data()), std::streamsize(labels.size()));
}

/// Tiny but structurally valid MNIST directory; one marker pixel per image.
fs::path make_mnist_fixture(int train = 12, int test = 10) {
  const fs::path dir = kTmp / "mnist";
  fs::create_directories(dir);
  std::vector<std::uint8_t> tr_px(std::size_t(train) * 28 * 28, 0);
  std::vector<std::uint8_t> te_px(std::size_t(test) * 28 * 28, 0);
  std::vector<std::uint8_t> tr_y(static_cast<std::size_t>(train)), te_y(static_cast<std::size_t>(test));
  for (int i = 0; i < train; ++i) {
    tr_y[std::size_t(i)] = std::uint8_t(i % 10);
    tr_px[std::size_t(i) * 28 * 28] = 255;  // corner marker for rescale checks
  }
  for (int i = 0; i < test; ++i) te_y[std::size_t(i)] = std::uint8_t(i % 10);
  write_idx_images(dir / "train-images-idx3-ubyte", tr_px, train, 28, 28);
  write_idx_labels(dir / "train-labels-idx1-ubyte", tr_y);
  write_idx_images(dir / "t10k-images-idx3-ubyte", te_px, test, 28, 28);
  write_idx_labels(dir / "t10k-labels-idx1-ubyte", te_y);
  return dir;
}

/// Store with the real MNIST per-class counts but 1-pixel images; exercises
/// the split construction against the published label histogram.
LabeledImageStore<float> histogram_store() {
  const int test_hist[10] = {980, 1135, 1032, 1010, 982, 892, 958, 1028, 974, 1009};
  const int train_hist[10] = {5923, 6742, 5958, 6131, 5842, 5421, 5918, 6265, 5851, 5949};
  LabeledImageStore<float> st;
  st.train.shape = st.test.shape = {1, 1, 1};
  auto fill = [](const int* hist, ImageBatch<float>& batch, std::vector<int>& labels) {
    int total = 0;
    for (int c = 0; c < 10; ++c) total += hist[c];
    batch.data.resize(total, 1);
    labels.reserve(std::size_t(total));
    Index at = 0;
    for (int c = 0; c < 10; ++c)
      for (int i = 0; i < hist[c]; ++i, ++at) {
        batch.data(at, 0) = float(c) / 10.0f;
        labels.push_back(c);
      }
  };
  fill(train_hist, st.train, st.train_labels);
  fill(test_hist, st.test, st.test_labels);
  return st;
}

}  // namespace

TEST_CASE("mnist idx loader round-trips a valid fixture") {
  auto dir = make_mnist_fixture();
  auto store = load_mnist<float>(dir.string());
  CHECK(store.train.count() == 12);
  CHECK(store.test.count() == 10);
  CHECK((store.train.shape == ImageShape{1, 28, 28}));
  for (int v : store.train_labels) CHECK((v >= 0 && v <= 9));
  // rescale endpoints: raw 0 -> -1, raw 255 -> +1
  CHECK(store.train.data(0, 0) == doctest::Approx(1.0f));
  CHECK(store.train.data(0, 1) == doctest::Approx(-1.0f));
}

TEST_CASE("idx loader rejects bad magic and truncation") {
  const fs::path dir = kTmp / "mnist_bad";
  fs::create_directories(dir);
  std::vector<std::uint8_t> px(2 * 28 * 28, 7);
  std::vector<std::uint8_t> y{1, 2};

  write_idx_images(dir / "train-images-idx3-ubyte", px, 2, 28, 28, 2052);
  write_idx_labels(dir / "train-labels-idx1-ubyte", y);
  write_idx_images(dir / "t10k-images-idx3-ubyte", px, 2, 28, 28);
  write_idx_labels(dir / "t10k-labels-idx1-ubyte", y);
  CHECK_THROWS_WITH_AS(load_mnist<float>(dir.string()),
                       doctest::Contains("bad IDX image magic"), std::runtime_error);

  write_idx_images(dir / "train-images-idx3-ubyte", px, 2, 28, 28);
  write_idx_labels(dir / "train-labels-idx1-ubyte", y, 2050);
  CHECK_THROWS_WITH_AS(load_mnist<float>(dir.string()),
                       doctest::Contains("bad IDX label magic"), std::runtime_error);

  write_idx_labels(dir / "train-labels-idx1-ubyte", y);
  write_idx_images(dir / "train-images-idx3-ubyte", px, 2, 28, 28, 2051, true);
  CHECK_THROWS_WITH_AS(load_mnist<float>(dir.string()), doctest::Contains("truncated"),
                       std::runtime_error);
}

TEST_CASE("cifar10 loader parses binary batches and is byte-stable") {
  const fs::path dir = kTmp / "cifar10";
  fs::create_directories(dir);
  Rng rng(5);
  auto write_batch = [&](const fs::path& p, int records) {
    std::ofstream f(p, std::ios::binary);
    for (int r = 0; r < records; ++r) {
      const char label = char(rng.below(10));
      f.write(&label, 1);
      for (int i = 0; i < 3072; ++i) {
        const char b = char(rng.below(256));
        f.write(&b, 1);
      }
    }
  };
  for (int b = 1; b <= 5; ++b)
    write_batch(dir / ("data_batch_" + std::to_string(b) + ".bin"), 4);
  write_batch(dir / "test_batch.bin", 6);

  auto store = load_cifar10<float>(dir.string());
  CHECK(store.train.count() == 20);
  CHECK(store.test.count() == 6);
  CHECK((store.train.shape == ImageShape{3, 32, 32}));

  auto again = load_cifar10<float>(dir.string());
  CHECK(store.train.data.row(0) == again.train.data.row(0));
  CHECK(store.test.data == again.test.data);

  // corrupt length
  std::ofstream(dir / "test_batch.bin", std::ios::binary) << "xyz";
  CHECK_THROWS_WITH_AS(load_cifar10<float>(dir.string()), doctest::Contains("3073"),
                       std::runtime_error);
}

TEST_CASE("novelty split with the mnist histogram: pi = 0.1 keeps all 980 novel") {
  auto store = histogram_store();
  auto split = make_novelty_split(store, 0, 0.10, 77);
  // 9020 inlier test images; round(0.1/0.9 * 9020) = 1002 > 980 available, so
  // all 980 novel are kept and inliers are subsampled to restore the rate
  const auto& labels = split.hidden_labels(EvalAccess::key());
  Index novel = 0;
  for (int v : labels)
    if (v == +1) ++novel;
  CHECK(novel == 980);
  CHECK(std::abs(split.pi_actual() - 0.10) <= 1.0 / double(split.x_u().count()));
  CHECK(split.pi_actual() == doctest::Approx(double(novel) / double(split.x_u().count())));

  // x_n: all 54077 non-novel training images, none of the novel class
  CHECK(split.x_n().count() == 60000 - 5923);
  for (Index src : split.x_n_source())
    CHECK(store.train_labels[std::size_t(src)] != 0);
}

TEST_CASE("novelty split subsamples the novel class when it is plentiful") {
  auto store = histogram_store();
  auto split = make_novelty_split(store, 0, 0.05, 78);
  // round(0.05/0.95 * 9020) = 475 <= 980: all inliers kept
  Index novel = 0;
  for (int v : split.hidden_labels(EvalAccess::key()))
    if (v == +1) ++novel;
  CHECK(novel == 475);
  CHECK(split.x_u().count() == 9020 + 475);
  CHECK(std::abs(split.pi_actual() - 0.05) <= 1.0 / double(split.x_u().count()));
}

TEST_CASE("novelty split pi = 0.3 is served by inlier subsampling") {
  auto store = histogram_store();
  auto split = make_novelty_split(store, 0, 0.30, 79);
  Index novel = 0;
  for (int v : split.hidden_labels(EvalAccess::key()))
    if (v == +1) ++novel;
  CHECK(novel == 980);  // the whole novel pool
  CHECK(std::abs(split.pi_actual() - 0.30) <= 1.0 / double(split.x_u().count()));
}

TEST_CASE("novelty split errors") {
  auto store = histogram_store();
  CHECK_THROWS_AS(make_novelty_split(store, 0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_novelty_split(store, 0, 1.0, 1), std::invalid_argument);
  // a class absent from the test store
  auto no_nine = store;
  for (auto& v : no_nine.test_labels)
    if (v == 9) v = 8;
  CHECK_THROWS_AS(make_novelty_split(no_nine, 9, 0.1, 1), std::invalid_argument);
}

TEST_CASE("novelty split is deterministic per seed") {
  auto store = histogram_store();
  auto a = make_novelty_split(store, 3, 0.10, 42);
  auto b = make_novelty_split(store, 3, 0.10, 42);
  CHECK(a.x_u_source() == b.x_u_source());
  CHECK(a.x_u().data == b.x_u().data);
  CHECK(a.hidden_labels(EvalAccess::key()) == b.hidden_labels(EvalAccess::key()));
  auto c = make_novelty_split(store, 3, 0.10, 43);
  CHECK(a.x_u_source() != c.x_u_source());
}

TEST_CASE("synthetic 2-D split uses fixed novel counts") {
  auto split = make_synthetic_2d<double>(400, 1000, 0.5, 9);
  Index novel = 0;
  for (int v : split.hidden_labels(EvalAccess::key()))
    if (v == +1) ++novel;
  CHECK(novel == 500);
  CHECK(split.x_u().count() == 1000);
  CHECK(split.x_n().count() == 400);
  CHECK(split.pi_actual() == 0.5);

  // negatives' sample mean near the origin (3 standard errors, sigma = 1)
  const double se = 1.0 / std::sqrt(400.0);
  CHECK(std::abs(split.x_n().data.col(0).mean()) < 3 * se);
  CHECK(std::abs(split.x_n().data.col(1).mean()) < 3 * se);

  auto again = make_synthetic_2d<double>(400, 1000, 0.5, 9);
  CHECK(split.x_u().data == again.x_u().data);
  CHECK(split.x_n().data == again.x_n().data);
}

TEST_CASE("split manifest lists indices per subset") {
  auto split = make_synthetic_2d<double>(10, 20, 0.25, 3);
  const fs::path p = kTmp / "manifest.txt";
  fs::create_directories(kTmp);
  save_split_manifest(split, p.string());
  std::ifstream in(p);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("[x_n]") != std::string::npos);
  CHECK(text.find("[x_u]") != std::string::npos);
  CHECK(text.find("pi_actual 0.250000") != std::string::npos);
}

TEST_CASE("published dataset counts hold when the real data is present") {
  const char* env = std::getenv("TRANSDUCTGAN_DATA");
  if (!env) {
    MESSAGE("TRANSDUCTGAN_DATA not set; skipping real-dataset count checks");
    return;
  }
  const fs::path root(env);
  if (fs::exists(root / "mnist" / "train-images-idx3-ubyte")) {
    auto store = load_mnist<float>((root / "mnist").string());
    CHECK(store.train.count() == 60000);
    CHECK(store.test.count() == 10000);
  }
  if (fs::exists(root / "cifar10" / "data_batch_1.bin")) {
    auto store = load_cifar10<float>((root / "cifar10").string());
    CHECK(store.train.count() == 50000);
    CHECK(store.test.count() == 10000);
    int per_class[10] = {0};
    for (int v : store.test_labels) ++per_class[v];
    for (int c = 0; c < 10; ++c) CHECK(per_class[c] == 1000);
  }
}
