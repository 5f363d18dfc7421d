#pragma once

#include <cstdint>
#include <limits>

namespace hocal {

struct RngSeed {
  std::uint64_t value = 0;
};

/// Counter-based generator: output i is a SplitMix64 finalizer applied to
/// (key, i). `split` derives an independent stream so that parallel workers
/// can partition the seed space without sharing state.
///
/// Satisfies UniformRandomBitGenerator, so the <random> distributions accept
/// it directly.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(RngSeed seed) : key_(mix(seed.value ^ 0x9e3779b97f4a7c15ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  Rng split(std::uint64_t stream) const {
    Rng child(RngSeed{key_ ^ mix(stream + 0x632be59bd9b4e019ULL)});
    return child;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hocal
