#pragma once

#include <cmath>
#include <cstdint>

namespace stirlab {

// SplitMix64 finalizer (Stafford mix13). This is the documented 64-bit
// avalanche function used everywhere a seed has to be derived from another:
// replicate i of a run with master seed s draws from mix_seed(s, i), so
// results do not depend on how replicates are scheduled across threads.
inline std::uint64_t avalanche64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  return avalanche64(master + (stream + 1) * 0x9e3779b97f4a7c15ULL);
}

// xoshiro256++ (Blackman/Vigna). Hand-rolled instead of <random> so that
// streams are bit-identical across compilers and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) {
      s += 0x9e3779b97f4a7c15ULL;
      w = avalanche64(s);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Inverse-CDF exponential; -log1p(-u) maps u=0 to 0 and avoids log(0).
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // Uniform integer in [0,n) via 128-bit multiply-shift. The O(n/2^64)
  // bias is far below anything observable here.
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Knuth multiplication method; fine for the small means used in tests
  // and Poissonization checks (mean <= ~700 before e^-u underflows).
  std::uint64_t poisson(double mean) {
    const double limit = std::exp(-mean);
    double prod = 1.0;
    std::uint64_t n = 0;
    for (;;) {
      prod *= uniform();
      if (prod <= limit) return n;
      ++n;
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace stirlab
