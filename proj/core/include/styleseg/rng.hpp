#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "styleseg/common.hpp"

namespace styleseg {

// Deterministic RNG wrapper. All sampling goes through the hand-rolled
// uniform/normal transforms below so that streams are identical across
// standard libraries (std::*_distribution output is not portable).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  // Derives an independent child stream, e.g. Rng(seed).fork("phantom/3").
  Rng fork(const std::string& tag) const {
    return Rng(fnv1a64(tag, seed_ ^ 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    return n == 0 ? 0 : engine_() % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; one value cached per pair.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace styleseg
