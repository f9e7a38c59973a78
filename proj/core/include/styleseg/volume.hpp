#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "styleseg/common.hpp"

namespace styleseg {

// Dense 3D grid, x-fastest storage (index = x + nx*(y + ny*z)).
template <typename T>
class Grid3 {
public:
  Grid3() = default;
  Grid3(int nx, int ny, int nz, T fill = T{})
      : nx_(nx), ny_(ny), nz_(nz),
        data_(static_cast<std::size_t>(nx) * ny * nz, fill) {
    if (nx < 1 || ny < 1 || nz < 1)
      throw ValidationError("grid dimensions must all be >= 1");
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::array<int, 3> shape() const { return {nx_, ny_, nz_}; }
  std::size_t size() const { return data_.size(); }

  T& at(int x, int y, int z) {
    return data_[static_cast<std::size_t>(x) + static_cast<std::size_t>(nx_) * (y + static_cast<std::size_t>(ny_) * z)];
  }
  const T& at(int x, int y, int z) const {
    return data_[static_cast<std::size_t>(x) + static_cast<std::size_t>(nx_) * (y + static_cast<std::size_t>(ny_) * z)];
  }

  std::vector<T>& raw() { return data_; }
  const std::vector<T>& raw() const { return data_; }

  bool same_shape(const Grid3& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && nz_ == o.nz_;
  }

private:
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<T> data_;
};

// Row-major 2D image, index = w + width*h.
class Image2D {
public:
  Image2D() = default;
  Image2D(int height, int width, double fill = 0.0)
      : h_(height), w_(width), data_(static_cast<std::size_t>(height) * width, fill) {
    if (height < 1 || width < 1)
      throw ValidationError("image dimensions must be >= 1");
  }

  int height() const { return h_; }
  int width() const { return w_; }
  std::size_t size() const { return data_.size(); }

  double& at(int h, int w) { return data_[static_cast<std::size_t>(w) + static_cast<std::size_t>(w_) * h]; }
  double at(int h, int w) const { return data_[static_cast<std::size_t>(w) + static_cast<std::size_t>(w_) * h]; }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

private:
  int h_ = 0, w_ = 0;
  std::vector<double> data_;
};

std::string shape_to_string(const std::array<int, 3>& s);

struct Volume {
  Grid3<double> data;
  std::array<double, 3> spacing{1.0, 1.0, 1.0};  // mm per voxel
  std::string id;

  // Checks dimensions, spacing and finiteness.
  void validate() const;
};

struct LabelVolume {
  Grid3<std::uint8_t> data;
  std::string id;

  // Checks labels are within {0,1,2}; with `paired` also that shapes match.
  void validate(const Volume* paired = nullptr) const;
};

// Ordered 2D cross-sections of a volume along one plane, with the metadata
// needed to reassemble losslessly. Slice layouts (height x width):
//   xy: slice k has A[h=x][w=y], count nz
//   yz: slice i has A[h=y][w=z], count nx
//   zx: slice j has A[h=z][w=x], count ny
struct SliceStack {
  Plane plane = Plane::XY;
  std::vector<Image2D> slices;
  std::array<int, 3> source_shape{0, 0, 0};
  std::string source_id;

  void validate() const;
};

SliceStack slice_volume(const Volume& v, Plane plane);
Volume reassemble(const SliceStack& stack);

// Label slicing uses the same geometry (values stay integral).
SliceStack slice_labels(const LabelVolume& l, Plane plane);
LabelVolume reassemble_labels(const SliceStack& stack);

// Per-voxel 3-class scores in volume space plus provenance.
struct LogitsVolume {
  std::array<Grid3<double>, kNumLabels> channels;
  std::string plane = "xy";          // xy | yz | zx | sum
  std::string variant = "original";  // original | transferred
  std::vector<double> scales;        // inference scale set, empty if unknown
  std::string source_id;

  std::array<int, 3> shape() const { return channels[0].shape(); }
  void validate() const;
};

// Per-slice 3-class scores matching one SliceStack entry.
using LogitsSlice = std::array<Image2D, kNumLabels>;

// Reassembles per-slice logits (one LogitsSlice per stack slice) into volume
// space, channel by channel.
LogitsVolume reassemble_logits(const std::vector<LogitsSlice>& slices, Plane plane,
                               const std::array<int, 3>& source_shape,
                               const std::string& source_id);

}  // namespace styleseg
