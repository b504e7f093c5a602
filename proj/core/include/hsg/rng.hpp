#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hsg {

/// Seeded RNG wrapper. The helpers below avoid std::uniform_*_distribution,
/// whose output is implementation-defined; these are stable everywhere.
class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  /// Uniform integer in [0, n). n must be > 0.
  uint64_t below(uint64_t n) {
    // Rejection sampling to kill modulo bias.
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  size_t index(size_t n) { return static_cast<size_t>(below(n)); }

  /// Uniform real in [0, 1).
  double real01() { return (eng_() >> 11) * 0x1.0p-53; }

  bool coin(double p) { return real01() < p; }

  template <typename T> void shuffle(std::vector<T> &v) {
    for (size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[index(i)]);
  }

private:
  std::mt19937_64 eng_;
};

} // namespace hsg
