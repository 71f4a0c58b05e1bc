#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cgfit {

// splitmix64 finalizer; bijective 64-bit mix with good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for an independent stream derived from a master seed.  Paths,
// replicates, and trials each get their own stream index, so results do not
// depend on scheduling or thread count.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(master ^ mix64(stream));
}

// Deterministic random source.  mt19937_64 has a standard-specified output
// sequence and the normal transform is done by hand (Box-Muller), so the
// same seed gives the same draws on every platform and toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // Uniform on (0, 1].
  double uniform() { return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Uniform integer in [0, n); rejection sampling removes modulo bias.
  std::size_t index(std::size_t n) {
    const std::uint64_t span = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t draw = eng_();
    while (draw >= limit) draw = eng_();
    return static_cast<std::size_t>(draw % span);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cgfit
