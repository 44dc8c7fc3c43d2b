#pragma once

#include <cstdint>
#include <random>

namespace blobot {

// Seeded uniform stream pinned to the raw mt19937_64 output (53-bit mantissa
// construction), independent of the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  static constexpr const char* kAlgorithm = "mt19937_64/u53";

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace blobot
