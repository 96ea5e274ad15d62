#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rhtail {

struct EmptyBallError : std::runtime_error {
  explicit EmptyBallError(const std::string& what)
      : std::runtime_error("EmptyBall: " + what) {}
};

struct NonNegativityError : std::runtime_error {
  explicit NonNegativityError(const std::string& what)
      : std::runtime_error("NonNegativityViolated: " + what) {}
};

struct InadmissibleBallError : std::runtime_error {
  explicit InadmissibleBallError(const std::string& what)
      : std::runtime_error("InadmissibleBall: " + what) {}
};

/// Deterministic generator with identical streams on every platform.
/// splitmix64 core; normal deviates via Box-Muller with a cached spare.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline double relative_error(double got, double want) {
  double scale = std::abs(want);
  if (scale == 0.0) return std::abs(got);
  return std::abs(got - want) / scale;
}

}  // namespace rhtail
