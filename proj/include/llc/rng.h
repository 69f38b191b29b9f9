#pragma once

#include <cstdint>
#include <random>

namespace llc {

// Deterministic generator with explicitly bounded draws. Standard
// distributions are avoided because their output differs across standard
// library implementations; the raw mt19937_64 stream does not.
class Rng {
public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, n).
  uint64_t next_below(uint64_t n)
  {
    if (n == 0) {
      return 0;
    }
    // Rejection sampling keeps the draw unbiased.
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = gen_();
    while (v >= limit) {
      v = gen_();
    }
    return v % n;
  }

  // Uniform in [0, 1).
  double next_real()
  {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double next_real_in(double lo, double hi)
  {
    return lo + (hi - lo) * next_real();
  }

private:
  std::mt19937_64 gen_;
};

// Independent per-purpose streams derived from one scenario seed, so that
// enabling or disabling one consumer never perturbs the draws of another.
struct RngStreams {
  Rng procedures;  // preamble choice, RAR RTT sampling
  Rng attacker;    // attack-side effects (e.g. grant application jitter)
  Rng scheduler;   // tie-breaks that are randomized by configuration

  explicit RngStreams(uint64_t seed)
      : procedures(seed ^ 0x9e3779b97f4a7c15ull),
        attacker(seed ^ 0xbf58476d1ce4e5b9ull),
        scheduler(seed ^ 0x94d049bb133111ebull)
  {
  }
};

}  // namespace llc
