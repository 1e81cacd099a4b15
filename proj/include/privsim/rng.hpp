#ifndef PRIVSIM_RNG_HPP
#define PRIVSIM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace privsim {

// Deterministic splitmix64 generator. Identical seeds give identical streams
// on every platform, which standard-library distributions do not guarantee.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  bool next_coin(double p) { return next_uniform() < p; }

  double next_uniform_in(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }

  // Box-Muller, cosine branch only so the draw count per call is fixed.
  double next_gaussian(double mean, double sigma) {
    const double u1 = 1.0 - next_uniform();  // (0, 1]
    const double u2 = next_uniform();
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi_ * u2);
  }

  // Knuth's product method; fine for the small means used here.
  int next_poisson(double mean) {
    if (mean <= 0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= next_uniform();
    } while (p > limit);
    return k - 1;
  }

  // Derives an independent substream seed from two values.
  static uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 0x632be59bd9b4e019ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  static constexpr double kTwoPi_ = 2.0 * 3.14159265358979323846;
  uint64_t state_;
};

}  // namespace privsim

#endif  // PRIVSIM_RNG_HPP
