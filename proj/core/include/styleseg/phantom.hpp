#pragma once

#include <utility>
#include <vector>

#include "styleseg/volume.hpp"

namespace styleseg {

// Monotone piecewise-linear intensity remap, given as strictly increasing
// (x, y) knots. Values outside the knot range are extrapolated linearly
// from the nearest segment.
struct IntensityMap {
  std::vector<std::pair<double, double>> knots;

  double operator()(double v) const;
  void validate() const;

  // Compresses the mid-range (myocardium) toward background while keeping
  // blood pool bright, emulating a low-contrast acquisition.
  static IntensityMap default_domain_shift();
};

enum class PhantomDomain { A, B };

struct PhantomSpec {
  std::array<int, 3> shape{48, 48, 32};
  PhantomDomain domain = PhantomDomain::A;
  std::uint64_t seed = 0;
  double noise_sigma = 0.03;
  IntensityMap intensity_map = IntensityMap::default_domain_shift();

  void validate() const;
};

// Clean per-label intensity means of domain A.
inline constexpr double kPhantomMeanBackground = 0.20;
inline constexpr double kPhantomMeanMyocardium = 0.50;
inline constexpr double kPhantomMeanBloodPool = 0.80;

// Builds an ellipsoidal blood-pool core wrapped in a myocardium shell,
// plus a vessel-like cylinder leaving the core. Geometry depends only on
// (seed, shape); the two domains differ in intensity rendering alone.
std::pair<Volume, LabelVolume> generate_phantom(const PhantomSpec& spec,
                                                const std::string& id = "phantom");

}  // namespace styleseg
