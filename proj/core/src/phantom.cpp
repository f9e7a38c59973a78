#include "styleseg/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "styleseg/rng.hpp"

namespace styleseg {

double IntensityMap::operator()(double v) const {
  validate();
  const auto& k = knots;
  if (v <= k.front().first) {
    const auto& [x0, y0] = k[0];
    const auto& [x1, y1] = k[1];
    return y0 + (v - x0) * (y1 - y0) / (x1 - x0);
  }
  for (std::size_t i = 1; i < k.size(); ++i) {
    if (v <= k[i].first || i + 1 == k.size()) {
      const auto& [x0, y0] = k[i - 1];
      const auto& [x1, y1] = k[i];
      return y0 + (v - x0) * (y1 - y0) / (x1 - x0);
    }
  }
  return v;  // unreachable
}

void IntensityMap::validate() const {
  if (knots.size() < 2) throw ValidationError("intensity map needs at least 2 knots");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i].first > knots[i - 1].first && knots[i].second > knots[i - 1].second))
      throw ValidationError("intensity map knots must be strictly increasing in x and y");
}

IntensityMap IntensityMap::default_domain_shift() {
  return IntensityMap{{{0.0, 0.0},
                       {kPhantomMeanBackground, 0.24},
                       {kPhantomMeanMyocardium, 0.30},
                       {kPhantomMeanBloodPool, 0.76},
                       {1.0, 1.0}}};
}

void PhantomSpec::validate() const {
  for (int d : shape)
    if (d < 1) throw ValidationError("phantom shape dimensions must be >= 1");
  if (noise_sigma < 0.0) throw ValidationError("phantom noise_sigma must be >= 0");
  intensity_map.validate();
}

namespace {

struct Geometry {
  std::array<double, 3> center;
  std::array<double, 3> inner;  // blood-pool semi-axes, voxels
  std::array<double, 3> outer;  // myocardium outer semi-axes
  double vessel_radius;
};

Geometry sample_geometry(const PhantomSpec& spec) {
  Rng rng = Rng(spec.seed).fork("phantom/geometry");
  Geometry g;
  double min_thickness = 1e9;
  for (int i = 0; i < 3; ++i) {
    const double extent = spec.shape[i];
    g.center[i] = extent * (0.5 + rng.uniform(-0.06, 0.06));
    g.inner[i] = extent * rng.uniform(0.16, 0.22);
    g.outer[i] = g.inner[i] * rng.uniform(1.40, 1.60);
    min_thickness = std::min(min_thickness, g.outer[i] - g.inner[i]);
  }
  g.vessel_radius = std::min(spec.shape[0], spec.shape[1]) * rng.uniform(0.07, 0.10);
  if (min_thickness < 1.0)
    throw ValidationError("phantom shell thickness below 1 voxel for shape " +
                          shape_to_string(spec.shape) + "; use a larger shape");
  return g;
}

}  // namespace

std::pair<Volume, LabelVolume> generate_phantom(const PhantomSpec& spec, const std::string& id) {
  spec.validate();
  const Geometry g = sample_geometry(spec);
  const auto [nx, ny, nz] = spec.shape;

  LabelVolume labels;
  labels.data = Grid3<std::uint8_t>(nx, ny, nz, kBackground);
  labels.id = id;
  for (int z = 0; z < nz; ++z) {
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        const double dx = x + 0.5 - g.center[0];
        const double dy = y + 0.5 - g.center[1];
        const double dz = z + 0.5 - g.center[2];
        const double t_outer = dx * dx / (g.outer[0] * g.outer[0]) +
                               dy * dy / (g.outer[1] * g.outer[1]) +
                               dz * dz / (g.outer[2] * g.outer[2]);
        const double t_inner = dx * dx / (g.inner[0] * g.inner[0]) +
                               dy * dy / (g.inner[1] * g.inner[1]) +
                               dz * dz / (g.inner[2] * g.inner[2]);
        std::uint8_t label = kBackground;
        if (t_inner <= 1.0)
          label = kBloodPool;
        else if (t_outer <= 1.0)
          label = kMyocardium;
        // Vessel: a cylinder of blood pool leaving the core toward +z.
        if (z + 0.5 >= g.center[2] && dx * dx + dy * dy <= g.vessel_radius * g.vessel_radius)
          label = kBloodPool;
        labels.data.at(x, y, z) = label;
      }
    }
  }

  const char* domain_tag = spec.domain == PhantomDomain::A ? "A" : "B";
  Rng noise = Rng(spec.seed).fork(std::string("phantom/render/") + domain_tag);
  Volume vol;
  vol.data = Grid3<double>(nx, ny, nz);
  vol.id = id;
  const std::array<double, 3> means{kPhantomMeanBackground, kPhantomMeanMyocardium,
                                    kPhantomMeanBloodPool};
  for (std::size_t i = 0; i < vol.data.size(); ++i) {
    double base = means[labels.data.raw()[i]];
    if (spec.domain == PhantomDomain::B) base = spec.intensity_map(base);
    vol.data.raw()[i] = base + spec.noise_sigma * noise.normal();
  }
  return {std::move(vol), std::move(labels)};
}

}  // namespace styleseg
