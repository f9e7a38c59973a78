#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "styleseg/tensor.hpp"

namespace styleseg {
namespace nn {

// Named-tensor archive: 8-byte magic "SSTENS01", little-endian u64 manifest
// length, JSON manifest (tensor names, shapes, byte offsets, free-form meta
// strings), then float64 payloads. Exact layout in docs/formats.md.
struct NamedTensors {
  std::map<std::string, Tensor> tensors;
  std::map<std::string, std::string> meta;

  // Fetches by name, validating the expected shape.
  const Tensor& get(const std::string& name, const std::array<int, 4>& shape) const;
};

void save_tensor_archive(const std::filesystem::path& path,
                         const std::vector<std::pair<std::string, const Tensor*>>& items,
                         const std::map<std::string, std::string>& meta = {});

NamedTensors load_tensor_archive(const std::filesystem::path& path);

}  // namespace nn
}  // namespace styleseg
