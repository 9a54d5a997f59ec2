#pragma once

// Counter-based 64-bit generator. Each output is a pure function of
// (seed, stream, counter): the SplitMix64 finalizer applied to a Weyl-style
// combination of the three. Streams are independent of draw order, so round t
// can be sampled without touching rounds 1..t-1.

#include <cstdint>

namespace ora {

struct Seed {
  std::uint64_t value = 0;
};

inline constexpr const char* kRngName = "splitmix64-counter-v1";

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t counter) {
  const std::uint64_t key = mix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
  return mix64(key ^ mix64(counter * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL));
}

/// A sequential view over one (seed, stream) pair.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  constexpr std::uint64_t next_u64() { return counter_hash(seed_, stream_, counter_++); }

  /// Uniform on [0,1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  constexpr std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace ora
