#pragma once

#include <cstdint>
#include <cmath>
#include <string>
#include <vector>

namespace roughbv {

// Deterministic 64-bit generator (xoshiro256++ seeded through splitmix64).
// Every randomized suite in the library draws from this so that a fixed
// seed reproduces runs bit-for-bit across platforms.
class Rng {
public:
  explicit Rng(uint64_t seed) {
    uint64_t z = seed;
    for (auto& si : s_) {
      z += 0x9e3779b97f4a7c15ULL;
      uint64_t w = z;
      w = (w ^ (w >> 30)) * 0xbf58476d1ce4e5b9ULL;
      w = (w ^ (w >> 27)) * 0x94d049bb133111ebULL;
      si = w ^ (w >> 31);
    }
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in [0,1)
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // integer in [0, n)
  uint64_t index(uint64_t n) { return n ? next() % n : 0; }

  double normal() {
    // Box-Muller; one value per call keeps the stream simple to reason about.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // sub-stream derived from a label, for per-experiment independence
  Rng fork(const std::string& label) const {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : label) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return Rng(h ^ s_[0] ^ rotl(s_[2], 13));
  }

private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace roughbv
