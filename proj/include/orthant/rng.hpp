#pragma once

#include <cstdint>

namespace orthant {

// Counter-based generator: output i is a bijective mix of (key + i*gamma),
// so substreams are cheap to derive and replicate order is irrelevant.
class CounterRng {
public:
  explicit CounterRng(uint64_t key) : key_(key) {}

  // Disjoint substream for a given replicate/stream index.
  static CounterRng substream(uint64_t seed, uint64_t stream) {
    return CounterRng(mix(seed ^ mix(stream + 0x6A09E667F3BCC909ULL)));
  }

  uint64_t next_u64() {
    counter_ += 0x9E3779B97F4A7C15ULL;
    return mix(key_ + counter_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1); safe for quantile transforms.
  double next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

private:
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace orthant
