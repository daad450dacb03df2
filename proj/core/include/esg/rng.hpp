#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace esg {

// Deterministic random source. std::mt19937_64 is fully specified by the
// standard, so the raw stream is identical on every platform; the bounded
// draws below avoid the standard distributions, whose outputs are
// implementation-defined. All pipeline randomness must flow through this
// type so that a seed pins byte-identical outputs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased integer in [0, bound) via rejection sampling.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Inclusive on both ends.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform_below(
                    static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // [0, 1) with 53 significant bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace esg
