#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace qcv {

// Seeded randomness for the whole lab. Every sampled quantity in the
// protocols flows through a RandomSource, so a (seed, configuration) pair
// pins down an entire experiment. Substreams let independent trials share
// one top-level seed without sharing state: substream(i) is a fresh source
// whose sequence depends only on (seed, i).
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed)
      : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform bit, taken from the top of the engine word.
  int bit() { return static_cast<int>(engine_() >> 63); }

  std::vector<int> bits(std::size_t n) {
    std::vector<int> out(n);
    for (auto& b : out) b = bit();
    return out;
  }

  // Uniform in [0, n). Rejection sampling over a power-of-two mask keeps the
  // draw unbiased and independent of any library distribution internals.
  std::size_t index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("RandomSource::index: n must be positive");
    if (n == 1) return 0;
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      std::uint64_t v = engine_() & mask;
      if (v < n) return static_cast<std::size_t>(v);
    }
  }

  // Uniform in [0, 1) with 53 significant bits.
  double real01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Categorical draw over nonnegative weights (need not be normalized).
  std::size_t categorical(std::span<const double> weights) {
    if (weights.empty()) throw std::invalid_argument("RandomSource::categorical: empty weights");
    double total = 0.0;
    for (double w : weights) total += w;
    double u = real01() * total;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
      acc += weights[k];
      if (u < acc) return k;
    }
    return weights.size() - 1;
  }

  // Derived stream for trial `index`; order-independent across trials.
  RandomSource substream(std::uint64_t index) const {
    return RandomSource(splitmix64(seed_ + 0x9E3779B97F4A7C15ULL * (index + 1)));
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace qcv
