#include "styleseg/tensor.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "styleseg/tensor_archive.hpp"

namespace styleseg {
namespace nn {

void sgd_step(const std::vector<Param*>& params, double lr, const SgdOptions& opt) {
  for (Param* p : params) {
    if (p->momentum.empty()) p->momentum = Tensor(p->value.n(), p->value.c(), p->value.h(), p->value.w());
    auto& v = p->momentum.raw();
    auto& w = p->value.raw();
    const auto& g = p->grad.raw();
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = opt.momentum * v[i] - lr * (g[i] + opt.weight_decay * w[i]);
      w[i] += v[i];
    }
  }
}

namespace {
constexpr char kArchiveMagic[8] = {'S', 'S', 'T', 'E', 'N', 'S', '0', '1'};
}

const Tensor& NamedTensors::get(const std::string& name, const std::array<int, 4>& shape) const {
  auto it = tensors.find(name);
  if (it == tensors.end())
    throw ValidationError("tensor archive: missing tensor '" + name + "'");
  if (it->second.shape() != shape)
    throw ValidationError("tensor archive: tensor '" + name + "' has shape (" +
                          std::to_string(it->second.n()) + "," + std::to_string(it->second.c()) +
                          "," + std::to_string(it->second.h()) + "," +
                          std::to_string(it->second.w()) + "), expected (" +
                          std::to_string(shape[0]) + "," + std::to_string(shape[1]) + "," +
                          std::to_string(shape[2]) + "," + std::to_string(shape[3]) + ")");
  return it->second;
}

void save_tensor_archive(const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, const Tensor*>>& items,
                         const std::map<std::string, std::string>& meta) {
  nlohmann::json manifest;
  manifest["format"] = "styleseg-tensors v1";
  manifest["meta"] = meta;
  auto& list = manifest["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : items) {
    list.push_back({{"name", name},
                    {"shape", {t->n(), t->c(), t->h(), t->w()}},
                    {"offset", offset}});
    offset += t->size() * sizeof(double);
  }
  const std::string mstr = manifest.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kArchiveMagic, sizeof(kArchiveMagic));
  const std::uint64_t mlen = mstr.size();
  out.write(reinterpret_cast<const char*>(&mlen), sizeof(mlen));
  out.write(mstr.data(), static_cast<std::streamsize>(mstr.size()));
  for (const auto& [name, t] : items)
    out.write(reinterpret_cast<const char*>(t->raw().data()),
              static_cast<std::streamsize>(t->size() * sizeof(double)));
  if (!out) throw IoError("failed writing " + path.string());
}

NamedTensors load_tensor_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kArchiveMagic, sizeof(magic)) != 0)
    throw IoError(path.string() + ": not a styleseg tensor archive");
  std::uint64_t mlen = 0;
  in.read(reinterpret_cast<char*>(&mlen), sizeof(mlen));
  std::string mstr(mlen, '\0');
  in.read(mstr.data(), static_cast<std::streamsize>(mlen));
  if (!in) throw IoError(path.string() + ": truncated manifest");
  nlohmann::json manifest = nlohmann::json::parse(mstr, nullptr, false);
  if (manifest.is_discarded() || manifest.value("format", "") != "styleseg-tensors v1")
    throw IoError(path.string() + ": bad archive manifest");

  NamedTensors out;
  for (auto& [k, v] : manifest["meta"].items()) out.meta[k] = v.get<std::string>();
  const std::streampos data_start = in.tellg();
  for (const auto& entry : manifest["tensors"]) {
    const std::string name = entry.at("name").get<std::string>();
    const auto shape = entry.at("shape").get<std::vector<int>>();
    if (shape.size() != 4) throw IoError(path.string() + ": tensor '" + name + "' is not rank 4");
    Tensor t(shape[0], shape[1], shape[2], shape[3]);
    in.seekg(data_start + static_cast<std::streamoff>(entry.at("offset").get<std::uint64_t>()));
    in.read(reinterpret_cast<char*>(t.raw().data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!in) throw IoError(path.string() + ": truncated payload for tensor '" + name + "'");
    out.tensors.emplace(name, std::move(t));
  }
  return out;
}

}  // namespace nn
}  // namespace styleseg
