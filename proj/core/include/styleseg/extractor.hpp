#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "styleseg/layers.hpp"
#include "styleseg/volume.hpp"

namespace styleseg {
namespace nn {

// Frozen convolutional feature extractor in the VGG-16 layer pattern:
// 3x3 convs with ReLU, 2x2 max pools after the configured convs. Feature
// maps are tapped at the configured conv outputs (pre-activation). Weights
// are seeded random by default; a pretrained archive can be loaded on top.
struct ExtractorConfig {
  std::vector<int> conv_channels{8, 8, 16, 16, 32, 32, 32, 64, 64, 64};
  std::vector<int> pool_after{2, 4, 7};  // 1-based conv indices
  std::vector<int> taps{2, 4, 7, 10};    // 1-based conv indices
  int in_channels = 3;
  std::uint64_t seed = 17;

  void validate() const;
};

class FeatureExtractor {
public:
  explicit FeatureExtractor(const ExtractorConfig& cfg = {});
  FeatureExtractor(const FeatureExtractor& o);
  FeatureExtractor& operator=(const FeatureExtractor&) = delete;

  // Feature maps at the tap points, shallow to deep.
  std::vector<Tensor> forward_taps(const Tensor& x);
  // Gradient of a scalar loss w.r.t. the input image, given the loss
  // gradients at each tap of the latest forward pass.
  Tensor backward_taps(const std::vector<Tensor>& tap_grads);

  int tap_count() const { return static_cast<int>(cfg_.taps.size()); }
  const ExtractorConfig& config() const { return cfg_; }

  void save_weights(const std::filesystem::path& path) const;
  void load_weights(const std::filesystem::path& path);

private:
  void build(Rng& rng);

  ExtractorConfig cfg_;
  std::vector<std::unique_ptr<Layer>> ops_;
  std::vector<int> tap_op_;   // op index whose output is tap j
  std::vector<Conv2d*> convs_;
  std::array<int, 2> in_size_{0, 0};
  std::array<int, 4> out_shape_{};
};

// Replicates a grayscale slice across the extractor's input channels.
Tensor image_to_tensor(const Image2D& img, int channels);
Image2D tensor_to_image(const Tensor& t, int channel = 0);

}  // namespace nn
}  // namespace styleseg
