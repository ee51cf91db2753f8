#pragma once

#include <cmath>
#include <cstdint>

namespace rope {

// PCG-XSH-RR 64/32 (O'Neill, "PCG: A Family of Simple Fast Space-Efficient
// Statistically Good Algorithms for Random Number Generation"). Fixed
// multiplier/increment, so streams are reproducible across platforms and
// compilers. This is the single RNG used everywhere determinism per seed is
// promised.
class Pcg32 {
 public:
  explicit Pcg32(uint64_t seed, uint64_t stream = 0) {
    state_ = 0u;
    inc_ = (stream << 1u) | 1u;
    NextU32();
    state_ += seed;
    NextU32();
  }

  uint32_t NextU32() {
    const uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
    const uint32_t rot = static_cast<uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  // Unbiased bounded draw via rejection sampling.
  uint32_t UniformBelow(uint32_t bound) {
    const uint32_t threshold = (-bound) % bound;
    for (;;) {
      const uint32_t r = NextU32();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform in [0, 1) with 32 bits of resolution.
  double UniformDouble() { return NextU32() * 0x1p-32; }

  double UniformRange(double lo, double hi) { return lo + (hi - lo) * UniformDouble(); }

  // Box-Muller; draws two uniforms per call, no caching so the stream
  // position stays a simple function of the call count.
  double Normal() {
    double u1 = UniformDouble();
    while (u1 <= 0.0) u1 = UniformDouble();
    const double u2 = UniformDouble();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  uint64_t state_;
  uint64_t inc_;
};

}  // namespace rope
