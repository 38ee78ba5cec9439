#pragma once

#include <cstdint>

namespace pda {

// splitmix64: tiny counter-friendly generator, used wherever a sample or a
// game needs its own reproducible stream independent of evaluation order.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
  SplitMix64 g(seed ^ (0x9E3779B97F4A7C15ULL * (counter + 1)));
  g.next();
  return g.next();
}

// Stream for sample #counter under a master seed; identical no matter how
// samples are partitioned across callers.
inline SplitMix64 counter_stream(std::uint64_t seed, std::uint64_t counter) {
  return SplitMix64(mix_seed(seed, counter));
}

}  // namespace pda
