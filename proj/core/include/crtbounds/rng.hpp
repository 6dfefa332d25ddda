#pragma once

#include <cstdint>

namespace crtb {

// Counter-based generator: every draw is a pure function of (seed, stream,
// counter), so any replicate or noise vector can be regenerated in isolation.
enum class Stream : std::uint64_t {
  population = 1,
  randomization = 2,
  bootstrap = 3,
  noise_nt = 4,
  noise_at = 5,
  noise_co = 6,
};

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0)
      : key_(mix64(seed ^ mix64(static_cast<std::uint64_t>(stream) ^
                                mix64(index)))) {}

  std::uint64_t next_u64() {
    return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ull);
  }

  // uniform in [0, 1)
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling keeps the draw exactly uniform
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Derives a child seed; used to hand each bootstrap replicate its own world.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(0xB0075742u ^ index));
}

}  // namespace crtb
