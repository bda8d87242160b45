#pragma once

#include "tgan/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace tgan {

namespace detail {
// splitmix64, used to derive independent stream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Seeded random source. All sampling in the project goes through this type;
/// draws are a pure function of (seed, call sequence), so identical seeds give
/// bit-identical streams within a build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log argument.
  double uniform_pos() { return double((engine_() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal via Box-Muller. One value per call (the sine companion
  /// is discarded) so the stream position does not depend on caller pairing.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free modulo bias is negligible for n << 2^64; keep it exact
    // anyway with Lemire-style rejection.
    std::uint64_t x = engine_();
    __uint128_t m = __uint128_t(x) * n;
    std::uint64_t l = std::uint64_t(m);
    if (l < n) {
      const std::uint64_t t = -n % n;
      while (l < t) {
        x = engine_();
        m = __uint128_t(x) * n;
        l = std::uint64_t(m);
      }
    }
    return std::uint64_t(m >> 64);
  }

  /// Derives an independent child stream; does not advance this stream's
  /// sampling sequence beyond one engine draw.
  Rng child() {
    std::uint64_t s = engine_();
    return Rng(detail::splitmix64(s));
  }

  template <typename Scalar>
  void fill_normal(Matrix<Scalar>& m) {
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) m(i, j) = Scalar(normal());
  }

  /// Fisher-Yates shuffle of an index vector.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tgan
