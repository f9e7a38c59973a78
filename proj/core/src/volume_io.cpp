#include "styleseg/volume_io.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace styleseg {

namespace fs = std::filesystem;

namespace {

constexpr const char* kRawMagic = "styleseg-raw v1";

struct RawHeader {
  std::string kind;   // intensity | label
  std::array<int, 3> shape{0, 0, 0};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::string dtype;  // float64 | float32 | int16 | uint8
  std::string id;
};

fs::path with_ext(fs::path p, const char* ext) {
  p.replace_extension(ext);
  return p;
}

fs::path raw_stem(const fs::path& path) {
  fs::path p = path;
  if (p.extension() == ".hdr" || p.extension() == ".bin") p.replace_extension();
  return p;
}

void write_raw_header(const fs::path& hdr, const RawHeader& h) {
  std::ofstream out(hdr);
  if (!out) throw IoError("cannot write " + hdr.string());
  out << "format: " << kRawMagic << "\n";
  out << "kind: " << h.kind << "\n";
  out << "shape: " << h.shape[0] << " " << h.shape[1] << " " << h.shape[2] << "\n";
  std::ostringstream sp;
  sp.precision(17);
  sp << h.spacing[0] << " " << h.spacing[1] << " " << h.spacing[2];
  out << "spacing: " << sp.str() << "\n";
  out << "dtype: " << h.dtype << "\n";
  out << "byteorder: little\n";
  out << "id: " << h.id << "\n";
  if (!out) throw IoError("failed writing " + hdr.string());
}

RawHeader read_raw_header(const fs::path& hdr) {
  std::ifstream in(hdr);
  if (!in) throw IoError("cannot read " + hdr.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find(':');
    if (pos == std::string::npos) continue;
    std::string key = line.substr(0, pos);
    std::string val = line.substr(pos + 1);
    while (!val.empty() && val.front() == ' ') val.erase(val.begin());
    kv[key] = val;
  }
  if (kv["format"] != kRawMagic)
    throw IoError(hdr.string() + ": not a " + std::string(kRawMagic) + " header");
  RawHeader h;
  h.kind = kv["kind"];
  h.dtype = kv["dtype"];
  h.id = kv["id"];
  {
    std::istringstream ss(kv["shape"]);
    if (!(ss >> h.shape[0] >> h.shape[1] >> h.shape[2]))
      throw IoError(hdr.string() + ": malformed shape line");
  }
  if (kv.count("spacing")) {
    std::istringstream ss(kv["spacing"]);
    if (!(ss >> h.spacing[0] >> h.spacing[1] >> h.spacing[2]))
      throw IoError(hdr.string() + ": malformed spacing line");
  }
  if (kv.count("byteorder") && kv["byteorder"] != "little")
    throw IoError(hdr.string() + ": only little-endian payloads are supported");
  return h;
}

template <typename T>
void write_payload(const fs::path& bin, const std::vector<T>& data) {
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw IoError("cannot write " + bin.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(T)));
  if (!out) throw IoError("failed writing " + bin.string());
}

template <typename T>
std::vector<T> read_payload(const fs::path& bin, std::size_t count) {
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw IoError("cannot read " + bin.string());
  std::vector<T> data(count);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(count * sizeof(T)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(T))
    throw IoError(bin.string() + ": payload shorter than header shape implies");
  return data;
}

}  // namespace

void save_raw(const Volume& v, const fs::path& path) {
  v.validate();
  const fs::path stem = raw_stem(path);
  RawHeader h;
  h.kind = "intensity";
  h.shape = v.data.shape();
  h.spacing = v.spacing;
  h.dtype = "float64";
  h.id = v.id;
  write_raw_header(with_ext(stem, ".hdr"), h);
  write_payload(with_ext(stem, ".bin"), v.data.raw());
}

void save_raw_labels(const LabelVolume& l, const fs::path& path) {
  l.validate();
  const fs::path stem = raw_stem(path);
  RawHeader h;
  h.kind = "label";
  h.shape = l.data.shape();
  h.dtype = "uint8";
  h.id = l.id;
  write_raw_header(with_ext(stem, ".hdr"), h);
  write_payload(with_ext(stem, ".bin"), l.data.raw());
}

Volume load_raw(const fs::path& path) {
  const fs::path stem = raw_stem(path);
  const RawHeader h = read_raw_header(with_ext(stem, ".hdr"));
  if (h.kind != "intensity")
    throw ValidationError(stem.string() + ": expected an intensity volume, found kind '" + h.kind + "'");
  Volume v;
  v.data = Grid3<double>(h.shape[0], h.shape[1], h.shape[2]);
  v.spacing = h.spacing;
  v.id = h.id;
  const std::size_t n = v.data.size();
  const fs::path bin = with_ext(stem, ".bin");
  if (h.dtype == "float64") {
    v.data.raw() = read_payload<double>(bin, n);
  } else if (h.dtype == "float32") {
    auto raw = read_payload<float>(bin, n);
    for (std::size_t i = 0; i < n; ++i) v.data.raw()[i] = raw[i];
  } else if (h.dtype == "int16") {
    auto raw = read_payload<std::int16_t>(bin, n);
    for (std::size_t i = 0; i < n; ++i) v.data.raw()[i] = raw[i];
  } else if (h.dtype == "uint8") {
    auto raw = read_payload<std::uint8_t>(bin, n);
    for (std::size_t i = 0; i < n; ++i) v.data.raw()[i] = raw[i];
  } else {
    throw IoError(stem.string() + ": unsupported dtype '" + h.dtype + "'");
  }
  v.validate();
  return v;
}

LabelVolume load_raw_labels(const fs::path& path) {
  const fs::path stem = raw_stem(path);
  const RawHeader h = read_raw_header(with_ext(stem, ".hdr"));
  if (h.kind != "label")
    throw ValidationError(stem.string() + ": expected a label volume, found kind '" + h.kind + "'");
  if (h.dtype != "uint8")
    throw IoError(stem.string() + ": label payload must be uint8");
  LabelVolume l;
  l.data = Grid3<std::uint8_t>(h.shape[0], h.shape[1], h.shape[2]);
  l.id = h.id;
  l.data.raw() = read_payload<std::uint8_t>(with_ext(stem, ".bin"), l.data.size());
  l.validate();
  return l;
}

namespace {

fs::path label_sidecar(const fs::path& image_path, VolumeFormat format) {
  if (format == VolumeFormat::Raw) {
    fs::path stem = raw_stem(image_path);
    return stem.parent_path() / (stem.filename().string() + "_label.hdr");
  }
  std::string name = image_path.filename().string();
  for (const char* ext : {".nii.gz", ".nii"}) {
    if (name.size() > std::strlen(ext) &&
        name.compare(name.size() - std::strlen(ext), std::strlen(ext), ext) == 0) {
      std::string base = name.substr(0, name.size() - std::strlen(ext));
      return image_path.parent_path() / (base + "_label" + ext);
    }
  }
  return image_path.parent_path() / (name + "_label.nii.gz");
}

}  // namespace

LoadedSample load_volume(const fs::path& path, VolumeFormat format) {
  LoadedSample out;
  if (format == VolumeFormat::Raw) {
    out.volume = load_raw(path);
  } else {
    out.volume = load_nifti(path);
  }
  const fs::path sidecar = label_sidecar(path, format);
  if (fs::exists(sidecar)) {
    out.labels = format == VolumeFormat::Raw ? load_raw_labels(sidecar) : load_nifti_labels(sidecar);
    out.labels->validate(&out.volume);
  }
  return out;
}

void save_volume(const Volume& v, const LabelVolume* labels, const fs::path& stem,
                 VolumeFormat format) {
  if (labels) labels->validate(&v);
  if (format == VolumeFormat::Raw) {
    save_raw(v, stem);
    if (labels)
      save_raw_labels(*labels, stem.parent_path() / (stem.filename().string() + "_label"));
  } else {
    save_nifti(v, stem.parent_path() / (stem.filename().string() + ".nii.gz"));
    if (labels)
      save_nifti_labels(*labels, stem.parent_path() / (stem.filename().string() + "_label.nii.gz"));
  }
}

}  // namespace styleseg
