#ifndef MOSAIC_RANDOM_HPP
#define MOSAIC_RANDOM_HPP

#include "mosaic/common.hpp"

#include <cstdint>
#include <limits>
#include <span>

namespace mosaic {

/**
 * Counter-based splittable random stream.
 *
 * Output i of a stream with key k is splitmix64(k + (i+1) * golden), so the
 * sequence is a pure function of (key, counter).  Substreams derive their
 * key by hashing the parent key with the substream index; replica i of an
 * experiment always uses substream i regardless of thread scheduling.
 *
 * Satisfies UniformRandomBitGenerator.
 */
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
  }

  /// Independent child stream; does not advance this stream.
  RandomStream substream(std::uint64_t index) const {
    RandomStream child;
    child.key_ = mix(key_ ^ mix(index + 0x243f6a8885a308d3ULL));
    return child;
  }

  std::uint64_t counter() const { return counter_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_left() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential(double rate) { return -std::log(uniform_open_left()) / rate; }

  double normal() {
    // Box-Muller, one value per call keeps the stream position predictable.
    const double u1 = uniform_open_left();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Index drawn with probability proportional to weights.
  std::size_t discrete(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double target = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      target -= weights[i];
      if (target < 0.0) return i;
    }
    return weights.size() - 1;
  }

  Vec gaussian_vector(int dim) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal();
    return v;
  }

  Vec unit_vector(int dim) {
    for (;;) {
      Vec v = gaussian_vector(dim);
      const double n = v.norm();
      if (n > 1e-8) return v / n;
    }
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace mosaic

#endif  // MOSAIC_RANDOM_HPP
