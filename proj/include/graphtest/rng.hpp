#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace graphtest {

// Counter-based pseudo-random streams.
//
// The generator is the splitmix64 finalizer walked with the golden-gamma
// increment. Independent substreams are derived from a (seed, index) pair
// by mixing twice, so a Monte Carlo loop can hand permutation i (or trial
// t) its own stream and produce results that do not depend on how the
// loop is scheduled across threads. Reproducibility contract: identical
// seed -> identical draws for this implementation; cross-language
// bit-equality is a non-goal.

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t key = mix64(seed + 0x9e3779b97f4a7c15ULL);
  return mix64(key ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), bound >= 1; rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  // Standard normal via the Marsaglia polar method (sqrt/log only); the
  // second deviate of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Chi-square as a sum of squared normals; intended for small dof.
  double chi_square(int dof) {
    double s = 0.0;
    for (int i = 0; i < dof; ++i) {
      double z = normal();
      s += z * z;
    }
    return s;
  }

  double student_t(int dof) {
    return normal() / std::sqrt(chi_square(dof) / static_cast<double>(dof));
  }

  // Partial Fisher-Yates: after the call the first `count` entries are a
  // uniform random `count`-subset of the items, in random order.
  void shuffle_prefix(std::vector<int>& items, int count) {
    const int size = static_cast<int>(items.size());
    for (int i = 0; i < count; ++i) {
      int j = i + static_cast<int>(below(static_cast<std::uint64_t>(size - i)));
      std::swap(items[i], items[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace graphtest
