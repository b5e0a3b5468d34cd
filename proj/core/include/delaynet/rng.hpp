#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace delaynet {

// mt19937_64 with hand-rolled distributions so that draws are identical
// across standard libraries and serializable for bit-exact resume.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller, one output per call (no cached second value, so the
  // draw count per sample is fixed).
  double normal(double mean, double stddev);

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates.
  void shuffle(std::span<int> items);

  std::string save_state() const;
  void restore_state(const std::string& state);

 private:
  std::mt19937_64 gen_;
};

// Seed mixer for deriving independent streams (init vs. shuffling) from
// one user-facing seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace delaynet
