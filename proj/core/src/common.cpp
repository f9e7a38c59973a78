#include "styleseg/common.hpp"

#include <cstdio>

namespace styleseg {

Plane plane_from_name(const std::string& name) {
  if (name == "xy") return Plane::XY;
  if (name == "yz") return Plane::YZ;
  if (name == "zx") return Plane::ZX;
  throw ValidationError("unknown plane '" + name + "' (expected xy, yz or zx)");
}

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed) {
  return fnv1a64(s.data(), s.size(), seed);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

}  // namespace styleseg
