#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace atomcount {

// Deterministic RNG wrapper. std::mt19937_64 is fully specified by the
// standard, but the std distributions are not, so the double conversions
// are done explicitly here to keep output streams bit-stable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1), 53 mantissa bits
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // exponential waiting time, rate > 0
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // standard normal, Box-Muller with cached second value
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// splitmix64 finalizer; position i of the stream rooted at master.
// Children are independent of evaluation order, so batches can be
// generated in any order (or concurrently) with identical results.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace atomcount
