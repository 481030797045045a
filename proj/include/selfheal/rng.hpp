#pragma once

#include <cstdint>
#include <random>

namespace selfheal {

// Deterministic sampling helpers on top of std::mt19937_64.
//
// The engine's output sequence is fixed by the C++ standard, but the standard
// distribution adaptors (uniform_real_distribution etc.) are
// implementation-defined. All conversions here are spelled out so that a
// given seed produces bit-identical draws on every platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + unit() * (hi - lo); }

  bool bernoulli(double p) { return unit() < p; }

  // Uniform integer in [lo, hi], inclusive. Rejection sampling, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

  // Normal deviate via Box-Muller (cosine branch only, no cached spare).
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a base seed (splitmix64 step).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace selfheal
