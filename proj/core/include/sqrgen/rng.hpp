#pragma once

#include <cstdint>
#include <vector>

namespace sqrgen {

/// Deterministic splitmix64 generator. Output is identical on every platform,
/// unlike <random> distributions, so seeded runs stay byte-reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, n). n must be > 0.
  uint64_t bounded(uint64_t n) {
    // Lemire's multiply-shift with rejection.
    uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    uint64_t low = static_cast<uint64_t>(m);
    if (low < n) {
      uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = next();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  bool coin(double p_true) { return uniform() < p_true; }

  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<size_t>(bounded(xs.size()))];
  }

  /// Index drawn from unnormalized weights.
  size_t weighted(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    double r = uniform() * total;
    for (size_t i = 0; i < weights.size(); ++i) {
      r -= weights[i];
      if (r < 0) return i;
    }
    return weights.size() - 1;
  }

 private:
  uint64_t state_;
};

/// Mixes a global seed and a record index into an independent stream seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t index, uint64_t attempt = 0) {
  Rng r(seed ^ (index * 0xd1342543de82ef95ULL) ^ (attempt * 0xaf251af3b0f025b5ULL));
  r.next();
  return r.next();
}

}  // namespace sqrgen
