#pragma once

#include <cmath>
#include <cstdint>

namespace crowd {

// splitmix64 generator. Small and fully deterministic across platforms, which
// keeps seeded runs byte-identical.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n); n > 0
  uint64_t below(uint64_t n) { return next_u64() % n; }

  int below_int(int n) { return static_cast<int>(below(static_cast<uint64_t>(n))); }

  // standard normal via Box-Muller
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 1e-300) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 6.28318530717958647692 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Independent stream derived from the original seed; children with distinct
  // stream ids never share state with the parent or each other.
  Rng fork(uint64_t stream) const {
    Rng mixer(seed_ ^ (0x632be59bd9b4e019ull * (stream + 1)));
    return Rng(mixer.next_u64());
  }

 private:
  uint64_t seed_;
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace crowd
