#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <vector>

#include "styleseg/layers.hpp"

namespace styleseg {
namespace nn {

// Pluggable encoder: a reduced-depth residual stack with total stride 8
// (stem s2 + two residual stages at s2 each).
struct EncoderConfig {
  int in_channels = 3;
  int stem_channels = 16;
  std::array<int, 2> stage_channels{24, 32};

  int out_channels() const { return stage_channels[1]; }
  void validate() const;
};

struct AsppConfig {
  std::array<int, 3> rates{6, 12, 18};
  bool include_1x1 = true;
  bool include_image_pooling = true;
  std::array<double, 2> head_dropout{0.5, 0.1};
  int classes = 3;
  int branch_channels = 24;

  int branch_count() const { return 3 + (include_1x1 ? 1 : 0) + (include_image_pooling ? 1 : 0); }
  int max_rate() const { return std::max({rates[0], rates[1], rates[2]}); }
  void validate() const;
};

// Ordered layer list with straight-through forward/backward.
class Chain {
public:
  Chain() = default;
  Chain(const Chain& o);
  Chain(Chain&&) = default;
  Chain& operator=(Chain&&) = default;

  void add(std::unique_ptr<Layer> layer) { ops_.push_back(std::move(layer)); }
  Tensor forward(const Tensor& x, bool train);
  Tensor backward(const Tensor& grad);
  void collect_params(std::vector<Param*>& out);
  void collect_state(std::vector<std::pair<std::string, Tensor*>>& out);

private:
  std::vector<std::unique_ptr<Layer>> ops_;
};

// Encoder -> 5-branch ASPP (three atrous convs, a 1x1 conv, a pooled
// image-level branch upsampled back) -> concat -> three 1x1 convs with two
// batch norms and two dropouts interleaved -> logits upsampled to input
// resolution.
class SegmentationNet {
public:
  SegmentationNet(const AsppConfig& aspp, const EncoderConfig& encoder, std::uint64_t seed);
  SegmentationNet(const SegmentationNet&) = default;
  SegmentationNet(SegmentationNet&&) = default;
  SegmentationNet& operator=(SegmentationNet&&) = default;

  Tensor forward(const Tensor& x, bool train);
  Tensor backward(const Tensor& grad_logits);
  std::vector<Param*> params();
  void zero_grads();

  const AsppConfig& aspp_config() const { return aspp_; }
  const EncoderConfig& encoder_config() const { return encoder_; }
  std::uint64_t seed() const { return seed_; }
  int stride() const { return 8; }
  // Smallest input extent whose feature map outgrows the largest rate.
  int min_input_extent() const { return stride() * aspp_.max_rate() + 1; }

  void save(const std::filesystem::path& path,
            const std::map<std::string, std::string>& extra_meta = {}) const;
  // Restores tensors into an identically configured net.
  void load(const std::filesystem::path& path);
  // Reads the config manifest and rebuilds the stored net.
  static SegmentationNet from_file(const std::filesystem::path& path);

private:
  struct ResBlock {
    Chain main;
    Chain skip;  // empty chain means identity
    bool has_skip = false;
    ReLU relu;
    Tensor input_, main_out_, skip_out_;

    Tensor forward(const Tensor& x, bool train);
    Tensor backward(const Tensor& grad);
    void collect_params(std::vector<Param*>& out);
    void collect_state(std::vector<std::pair<std::string, Tensor*>>& out);
  };

  void build(Rng& rng);
  std::vector<std::pair<std::string, Tensor*>> named_state();

  AsppConfig aspp_;
  EncoderConfig encoder_;
  std::uint64_t seed_;

  Chain stem_;
  ResBlock stage1_, stage2_;
  std::vector<Chain> aspp_branches_;  // rates..., then optional 1x1
  Chain pool_branch_;                 // after global average pooling
  Chain head_;

  // forward caches
  std::array<int, 2> input_size_{0, 0};
  std::array<int, 2> feature_size_{0, 0};
  std::vector<int> branch_channels_;
  bool used_pool_branch_ = false;
};

}  // namespace nn
}  // namespace styleseg
