#pragma once

#include <cstdint>
#include <random>

namespace sap {

// Seeded random stream with explicit output transforms.
//
// std::uniform_real_distribution and friends are implementation-defined, so
// relying on them would make "same seed, same dataset" hold only within one
// standard library. The engine (mt19937_64) is fully specified; the
// transforms below are spelled out so streams are reproducible everywhere.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the Marsaglia polar method.
  double gaussian();

  // Unbiased integer in [0, bound) by rejection. bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable derivation of per-run or per-component seeds from a base seed
// (splitmix64 finalizer over base ^ golden-ratio-scrambled index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace sap
