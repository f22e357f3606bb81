#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace rvol {

// SplitMix64 mixing step. Used both as a seed scrambler and as the basis of
// the substream derivation rule below.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Substream derivation rule: a child seed is obtained by absorbing a list of
// integer keys into the scrambled base seed, one SplitMix64 round per key.
// Every source of randomness in the toolkit derives its seed this way from
// the single user-facing seed, so one number reproduces a whole experiment.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t k : keys) s = splitmix64(s ^ splitmix64(k));
  return s;
}

// Stream ids used with derive_seed. Keeping them in one place avoids
// accidental collisions between modules.
namespace stream {
inline constexpr std::uint64_t kMasterPath = 1;     // the observed fBm path
inline constexpr std::uint64_t kContinuation = 2;   // per (day, path) MC draws
inline constexpr std::uint64_t kGeneric = 100;      // tests and one-off draws
}  // namespace stream

// Seedable standard-normal stream: mt19937_64 + Box-Muller with an explicit
// spare cache. The transform is implemented here rather than through
// std::normal_distribution so the draw sequence is fixed by this code, not by
// the standard library implementation.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0,1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0,1], keeps log() finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  void fill(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = next();
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rvol
