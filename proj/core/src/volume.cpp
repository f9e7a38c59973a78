#include "styleseg/volume.hpp"

#include <cmath>
#include <sstream>

namespace styleseg {

std::string shape_to_string(const std::array<int, 3>& s) {
  std::ostringstream os;
  os << "(" << s[0] << "," << s[1] << "," << s[2] << ")";
  return os.str();
}

void Volume::validate() const {
  if (data.nx() < 1 || data.ny() < 1 || data.nz() < 1)
    throw ValidationError("volume '" + id + "': all dimensions must be >= 1");
  for (double s : spacing)
    if (!(s > 0.0))
      throw ValidationError("volume '" + id + "': spacing components must be > 0");
  for (double v : data.raw())
    if (!std::isfinite(v))
      throw ValidationError("volume '" + id + "': intensities must be finite");
}

void LabelVolume::validate(const Volume* paired) const {
  for (std::uint8_t v : data.raw())
    if (v > 2)
      throw ValidationError("label volume '" + id + "': labels restricted to {0,1,2}, found " +
                            std::to_string(int(v)));
  if (paired && !data.same_shape(paired->data))
    throw ValidationError("label volume '" + id + "' shape " + shape_to_string(data.shape()) +
                          " does not match volume shape " + shape_to_string(paired->data.shape()));
}

void SliceStack::validate() const {
  const auto [nx, ny, nz] = source_shape;
  if (nx < 1 || ny < 1 || nz < 1)
    throw ValidationError("slice stack '" + source_id + "': invalid source shape " +
                          shape_to_string(source_shape));
  int expect_count = 0, expect_h = 0, expect_w = 0;
  switch (plane) {
    case Plane::XY: expect_count = nz; expect_h = nx; expect_w = ny; break;
    case Plane::YZ: expect_count = nx; expect_h = ny; expect_w = nz; break;
    case Plane::ZX: expect_count = ny; expect_h = nz; expect_w = nx; break;
  }
  if (static_cast<int>(slices.size()) != expect_count)
    throw ValidationError("slice stack '" + source_id + "': expected " +
                          std::to_string(expect_count) + " slices along " + plane_name(plane) +
                          ", got " + std::to_string(slices.size()));
  for (std::size_t i = 0; i < slices.size(); ++i) {
    if (slices[i].height() != expect_h || slices[i].width() != expect_w)
      throw ValidationError("slice stack '" + source_id + "': slice " + std::to_string(i) +
                            " has shape (" + std::to_string(slices[i].height()) + "," +
                            std::to_string(slices[i].width()) + "), expected (" +
                            std::to_string(expect_h) + "," + std::to_string(expect_w) + ")");
  }
}

namespace {

template <typename T, typename Get>
std::vector<Image2D> slice_grid(const Grid3<T>& g, Plane plane, Get get) {
  std::vector<Image2D> out;
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  switch (plane) {
    case Plane::XY:
      out.reserve(nz);
      for (int z = 0; z < nz; ++z) {
        Image2D s(nx, ny);
        for (int x = 0; x < nx; ++x)
          for (int y = 0; y < ny; ++y) s.at(x, y) = get(x, y, z);
        out.push_back(std::move(s));
      }
      break;
    case Plane::YZ:
      out.reserve(nx);
      for (int x = 0; x < nx; ++x) {
        Image2D s(ny, nz);
        for (int y = 0; y < ny; ++y)
          for (int z = 0; z < nz; ++z) s.at(y, z) = get(x, y, z);
        out.push_back(std::move(s));
      }
      break;
    case Plane::ZX:
      out.reserve(ny);
      for (int y = 0; y < ny; ++y) {
        Image2D s(nz, nx);
        for (int z = 0; z < nz; ++z)
          for (int x = 0; x < nx; ++x) s.at(z, x) = get(x, y, z);
        out.push_back(std::move(s));
      }
      break;
  }
  return out;
}

template <typename Put>
void unslice(const SliceStack& stack, Put put) {
  stack.validate();
  const auto [nx, ny, nz] = stack.source_shape;
  switch (stack.plane) {
    case Plane::XY:
      for (int z = 0; z < nz; ++z)
        for (int x = 0; x < nx; ++x)
          for (int y = 0; y < ny; ++y) put(x, y, z, stack.slices[z].at(x, y));
      break;
    case Plane::YZ:
      for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
          for (int z = 0; z < nz; ++z) put(x, y, z, stack.slices[x].at(y, z));
      break;
    case Plane::ZX:
      for (int y = 0; y < ny; ++y)
        for (int z = 0; z < nz; ++z)
          for (int x = 0; x < nx; ++x) put(x, y, z, stack.slices[y].at(z, x));
      break;
  }
}

}  // namespace

SliceStack slice_volume(const Volume& v, Plane plane) {
  v.validate();
  SliceStack st;
  st.plane = plane;
  st.source_shape = v.data.shape();
  st.source_id = v.id;
  st.slices = slice_grid(v.data, plane, [&](int x, int y, int z) { return v.data.at(x, y, z); });
  return st;
}

Volume reassemble(const SliceStack& stack) {
  Volume v;
  v.data = Grid3<double>(stack.source_shape[0], stack.source_shape[1], stack.source_shape[2]);
  v.id = stack.source_id;
  unslice(stack, [&](int x, int y, int z, double val) { v.data.at(x, y, z) = val; });
  return v;
}

SliceStack slice_labels(const LabelVolume& l, Plane plane) {
  l.validate();
  SliceStack st;
  st.plane = plane;
  st.source_shape = l.data.shape();
  st.source_id = l.id;
  st.slices = slice_grid(l.data, plane,
                         [&](int x, int y, int z) { return static_cast<double>(l.data.at(x, y, z)); });
  return st;
}

LabelVolume reassemble_labels(const SliceStack& stack) {
  LabelVolume l;
  l.data = Grid3<std::uint8_t>(stack.source_shape[0], stack.source_shape[1], stack.source_shape[2]);
  l.id = stack.source_id;
  unslice(stack, [&](int x, int y, int z, double val) {
    l.data.at(x, y, z) = static_cast<std::uint8_t>(val);
  });
  return l;
}

void LogitsVolume::validate() const {
  for (int c = 1; c < kNumLabels; ++c)
    if (!channels[c].same_shape(channels[0]))
      throw ValidationError("logits volume '" + source_id + "': channel shapes differ");
  for (const auto& ch : channels)
    for (double v : ch.raw())
      if (!std::isfinite(v))
        throw ValidationError("logits volume '" + source_id + "': non-finite scores");
}

LogitsVolume reassemble_logits(const std::vector<LogitsSlice>& slices, Plane plane,
                               const std::array<int, 3>& source_shape,
                               const std::string& source_id) {
  LogitsVolume out;
  out.plane = plane_name(plane);
  out.source_id = source_id;
  for (int c = 0; c < kNumLabels; ++c) {
    SliceStack st;
    st.plane = plane;
    st.source_shape = source_shape;
    st.source_id = source_id;
    st.slices.reserve(slices.size());
    for (const auto& ls : slices) st.slices.push_back(ls[c]);
    out.channels[c] = reassemble(st).data;
  }
  return out;
}

}  // namespace styleseg
