#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace styleseg {

// Error taxonomy shared by the whole pipeline. The CLI maps these onto
// process exit codes (validation 2, missing artifact 3, divergence 4).
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class MissingArtifactError : public std::runtime_error {
public:
  explicit MissingArtifactError(const std::string& what) : std::runtime_error(what) {}
};

class DivergenceError : public std::runtime_error {
public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Plane { XY, YZ, ZX };

inline const char* plane_name(Plane p) {
  switch (p) {
    case Plane::XY: return "xy";
    case Plane::YZ: return "yz";
    case Plane::ZX: return "zx";
  }
  return "?";
}

Plane plane_from_name(const std::string& name);

inline constexpr std::array<Plane, 3> kAllPlanes{Plane::XY, Plane::YZ, Plane::ZX};

// Voxel labels. Fixed three-class encoding throughout the pipeline.
inline constexpr std::uint8_t kBackground = 0;
inline constexpr std::uint8_t kMyocardium = 1;
inline constexpr std::uint8_t kBloodPool = 2;
inline constexpr int kNumLabels = 3;

// FNV-1a, used for config hashes and loss-trace digests.
std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace styleseg
