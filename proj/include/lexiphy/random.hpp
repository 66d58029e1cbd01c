#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lexiphy {

// Seeded generator with platform-independent derived draws. The standard
// <random> distributions are implementation-defined, so uniform, index and
// exponential draws are computed here directly from the 64-bit engine output.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform on [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), rejection-sampled to avoid modulo bias.
  uint64_t Index(uint64_t bound) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return draw % bound;
  }

  double Exponential(double rate) {
    double draw = 0.0;
    while (draw <= 0.0) draw = -std::log1p(-Uniform()) / rate;
    return draw;
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename Container>
  void Shuffle(Container &items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[Index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Child-stream seed derivation (splitmix64 finalizer over seed and stream id).
inline uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace lexiphy
