#ifndef EVOGRAPH_RNG_HPP
#define EVOGRAPH_RNG_HPP

#include <cstdint>
#include <cmath>

namespace evograph {

// splitmix64; used both as a standalone mixer and to expand seeds.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Self-contained xoshiro256** generator. We avoid std distributions in the
// hot loops so that results are bit-reproducible across standard libraries
// and worker counts.
class Rng {
 public:
  explicit Rng(uint64_t seed) { reseed(seed); }

  void reseed(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
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
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n); Lemire's method with rejection for exactness
  uint64_t uniform_index(uint64_t n) {
    uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    uint64_t lo = static_cast<uint64_t>(m);
    if (lo < n) {
      uint64_t threshold = -n % n;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  // Exp(rate) holding time
  double exponential(double rate) {
    double u;
    do { u = uniform01(); } while (u <= 0.0);
    return -std::log(u) / rate;
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

// Per-trial seed: hash of (master_seed, trial_index) so that trial outcomes
// do not depend on how trials are partitioned across workers.
inline uint64_t trial_seed(uint64_t master_seed, uint64_t trial_index) {
  uint64_t s = master_seed ^ (0x9e3779b97f4a7c15ULL + trial_index);
  uint64_t a = splitmix64(s);
  s ^= a + (trial_index << 1);
  return splitmix64(s);
}

}  // namespace evograph

#endif
