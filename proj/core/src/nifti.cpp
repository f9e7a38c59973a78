#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <vector>

#include "styleseg/volume_io.hpp"

namespace styleseg {

namespace fs = std::filesystem;

namespace {

// NIfTI-1 single-file header (348 bytes, naturally packed).
struct NiftiHeader {
  std::int32_t sizeof_hdr;
  char data_type[10];
  char db_name[18];
  std::int32_t extents;
  std::int16_t session_error;
  char regular;
  char dim_info;
  std::int16_t dim[8];
  float intent_p1, intent_p2, intent_p3;
  std::int16_t intent_code;
  std::int16_t datatype;
  std::int16_t bitpix;
  std::int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  std::int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max, cal_min;
  float slice_duration, toffset;
  std::int32_t glmax, glmin;
  char descrip[80];
  char aux_file[24];
  std::int16_t qform_code, sform_code;
  float quatern_b, quatern_c, quatern_d;
  float qoffset_x, qoffset_y, qoffset_z;
  float srow_x[4], srow_y[4], srow_z[4];
  char intent_name[16];
  char magic[4];
};
static_assert(sizeof(NiftiHeader) == 348, "NIfTI-1 header must be 348 bytes");

constexpr std::int16_t DT_UINT8 = 2;
constexpr std::int16_t DT_INT16 = 4;
constexpr std::int16_t DT_INT32 = 8;
constexpr std::int16_t DT_FLOAT32 = 16;
constexpr std::int16_t DT_FLOAT64 = 64;

template <typename T>
void byteswap(T& v) {
  auto* p = reinterpret_cast<unsigned char*>(&v);
  std::reverse(p, p + sizeof(T));
}

void swap_header(NiftiHeader& h) {
  byteswap(h.sizeof_hdr);
  byteswap(h.extents);
  byteswap(h.session_error);
  for (auto& d : h.dim) byteswap(d);
  byteswap(h.intent_p1);
  byteswap(h.intent_p2);
  byteswap(h.intent_p3);
  byteswap(h.intent_code);
  byteswap(h.datatype);
  byteswap(h.bitpix);
  byteswap(h.slice_start);
  for (auto& d : h.pixdim) byteswap(d);
  byteswap(h.vox_offset);
  byteswap(h.scl_slope);
  byteswap(h.scl_inter);
  byteswap(h.slice_end);
  byteswap(h.cal_max);
  byteswap(h.cal_min);
  byteswap(h.slice_duration);
  byteswap(h.toffset);
  byteswap(h.glmax);
  byteswap(h.glmin);
  byteswap(h.qform_code);
  byteswap(h.sform_code);
  byteswap(h.quatern_b);
  byteswap(h.quatern_c);
  byteswap(h.quatern_d);
  byteswap(h.qoffset_x);
  byteswap(h.qoffset_y);
  byteswap(h.qoffset_z);
  for (auto& d : h.srow_x) byteswap(d);
  for (auto& d : h.srow_y) byteswap(d);
  for (auto& d : h.srow_z) byteswap(d);
}

// gzread handles plain files transparently, so all reads go through zlib.
std::vector<char> read_all(const fs::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (!f) throw IoError("cannot open " + path.string());
  std::vector<char> out;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof(buf))) > 0) out.insert(out.end(), buf, buf + n);
  bool bad = n < 0;
  gzclose(f);
  if (bad) throw IoError("decompression failed for " + path.string());
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void write_all(const fs::path& path, const std::vector<char>& bytes) {
  if (ends_with(path.string(), ".gz")) {
    gzFile f = gzopen(path.string().c_str(), "wb");
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    const char* p = bytes.data();
    std::size_t left = bytes.size();
    while (left > 0) {
      const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(left, 1u << 30));
      if (gzwrite(f, p, chunk) != static_cast<int>(chunk)) {
        gzclose(f);
        throw IoError("failed writing " + path.string());
      }
      p += chunk;
      left -= chunk;
    }
    gzclose(f);
  } else {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + path.string());
  }
}

struct Parsed {
  std::array<int, 3> shape;
  std::array<double, 3> spacing;
  std::string id;
  std::vector<double> values;  // after scl_slope/scl_inter
  bool scaled;
};

template <typename T>
void decode(const char* p, std::size_t n, bool swap, std::vector<double>& out) {
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    T v;
    std::memcpy(&v, p + i * sizeof(T), sizeof(T));
    if (swap) byteswap(v);
    out[i] = static_cast<double>(v);
  }
}

Parsed parse_nifti(const fs::path& path) {
  const std::vector<char> bytes = read_all(path);
  if (bytes.size() < sizeof(NiftiHeader))
    throw IoError(path.string() + ": file shorter than a NIfTI-1 header");
  NiftiHeader h;
  std::memcpy(&h, bytes.data(), sizeof(h));
  bool swap = false;
  if (h.sizeof_hdr != 348) {
    swap_header(h);
    swap = true;
    if (h.sizeof_hdr != 348) throw IoError(path.string() + ": not a NIfTI-1 file");
  }
  if (std::strncmp(h.magic, "n+1", 3) != 0) {
    if (std::strncmp(h.magic, "ni1", 3) == 0)
      throw IoError(path.string() + ": two-file NIfTI (.hdr/.img) is not supported");
    throw IoError(path.string() + ": bad NIfTI magic");
  }
  if (h.dim[0] < 1 || h.dim[0] > 7) throw IoError(path.string() + ": corrupt dim[0]");
  for (int d = 4; d <= h.dim[0]; ++d)
    if (h.dim[d] > 1)
      throw IoError(path.string() + ": only scalar 3D images are supported");

  Parsed out;
  out.shape = {std::max<int>(h.dim[1], 1), std::max<int>(h.dim[2], 1), std::max<int>(h.dim[3], 1)};
  out.spacing = {h.pixdim[1] > 0 ? h.pixdim[1] : 1.0, h.pixdim[2] > 0 ? h.pixdim[2] : 1.0,
                 h.pixdim[3] > 0 ? h.pixdim[3] : 1.0};
  {
    char desc[81] = {0};
    std::memcpy(desc, h.descrip, 80);
    out.id = desc;
  }
  if (out.id.empty()) {
    std::string name = path.filename().string();
    for (const char* ext : {".nii.gz", ".nii"})
      if (ends_with(name, ext)) name = name.substr(0, name.size() - std::strlen(ext));
    out.id = name;
  }

  const std::size_t n =
      static_cast<std::size_t>(out.shape[0]) * out.shape[1] * out.shape[2];
  const auto offset = static_cast<std::size_t>(h.vox_offset);
  if (offset < 348) throw IoError(path.string() + ": vox_offset below header size");
  std::size_t elem = 0;
  switch (h.datatype) {
    case DT_UINT8: elem = 1; break;
    case DT_INT16: elem = 2; break;
    case DT_INT32: elem = 4; break;
    case DT_FLOAT32: elem = 4; break;
    case DT_FLOAT64: elem = 8; break;
    default:
      throw IoError(path.string() + ": unsupported NIfTI datatype " + std::to_string(h.datatype));
  }
  if (bytes.size() < offset + n * elem)
    throw IoError(path.string() + ": payload shorter than header dims imply");
  const char* p = bytes.data() + offset;
  switch (h.datatype) {
    case DT_UINT8: decode<std::uint8_t>(p, n, false, out.values); break;
    case DT_INT16: decode<std::int16_t>(p, n, swap, out.values); break;
    case DT_INT32: decode<std::int32_t>(p, n, swap, out.values); break;
    case DT_FLOAT32: decode<float>(p, n, swap, out.values); break;
    case DT_FLOAT64: decode<double>(p, n, swap, out.values); break;
  }
  out.scaled = h.scl_slope != 0.0f && !(h.scl_slope == 1.0f && h.scl_inter == 0.0f);
  if (out.scaled)
    for (double& v : out.values) v = h.scl_slope * v + h.scl_inter;
  return out;
}

template <typename T>
void encode(const std::vector<T>& values, std::vector<char>& out) {
  const std::size_t start = out.size();
  out.resize(start + values.size() * sizeof(T));
  std::memcpy(out.data() + start, values.data(), values.size() * sizeof(T));
}

std::vector<char> build_nifti(const std::array<int, 3>& shape,
                              const std::array<double, 3>& spacing, const std::string& id,
                              std::int16_t datatype, std::int16_t bitpix) {
  NiftiHeader h;
  std::memset(&h, 0, sizeof(h));
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  h.dim[1] = static_cast<std::int16_t>(shape[0]);
  h.dim[2] = static_cast<std::int16_t>(shape[1]);
  h.dim[3] = static_cast<std::int16_t>(shape[2]);
  for (int d = 4; d < 8; ++d) h.dim[d] = 1;
  h.datatype = datatype;
  h.bitpix = bitpix;
  h.pixdim[0] = 1.0f;
  h.pixdim[1] = static_cast<float>(spacing[0]);
  h.pixdim[2] = static_cast<float>(spacing[1]);
  h.pixdim[3] = static_cast<float>(spacing[2]);
  h.vox_offset = 352.0f;
  h.scl_slope = 1.0f;
  h.scl_inter = 0.0f;
  h.xyzt_units = 2;  // millimetres
  std::strncpy(h.descrip, id.c_str(), sizeof(h.descrip) - 1);
  std::memcpy(h.magic, "n+1", 4);

  std::vector<char> bytes(sizeof(h) + 4, 0);  // header + zero extender
  std::memcpy(bytes.data(), &h, sizeof(h));
  return bytes;
}

}  // namespace

void save_nifti(const Volume& v, const fs::path& path) {
  v.validate();
  auto bytes = build_nifti(v.data.shape(), v.spacing, v.id, DT_FLOAT64, 64);
  encode(v.data.raw(), bytes);
  write_all(path, bytes);
}

void save_nifti_labels(const LabelVolume& l, const fs::path& path) {
  l.validate();
  auto bytes = build_nifti(l.data.shape(), {1.0, 1.0, 1.0}, l.id, DT_UINT8, 8);
  encode(l.data.raw(), bytes);
  write_all(path, bytes);
}

Volume load_nifti(const fs::path& path) {
  Parsed p = parse_nifti(path);
  Volume v;
  v.data = Grid3<double>(p.shape[0], p.shape[1], p.shape[2]);
  v.data.raw() = std::move(p.values);
  v.spacing = p.spacing;
  v.id = p.id;
  v.validate();
  return v;
}

LabelVolume load_nifti_labels(const fs::path& path) {
  Parsed p = parse_nifti(path);
  if (p.scaled)
    throw ValidationError(path.string() + ": label images must not carry intensity scaling");
  LabelVolume l;
  l.data = Grid3<std::uint8_t>(p.shape[0], p.shape[1], p.shape[2]);
  l.id = p.id;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const double v = p.values[i];
    if (v != 0.0 && v != 1.0 && v != 2.0)
      throw ValidationError(path.string() + ": label value " + std::to_string(v) +
                            " outside {0,1,2}");
    l.data.raw()[i] = static_cast<std::uint8_t>(v);
  }
  return l;
}

}  // namespace styleseg
