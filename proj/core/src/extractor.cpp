#include "styleseg/extractor.hpp"

#include <algorithm>

#include "styleseg/tensor_archive.hpp"

namespace styleseg {
namespace nn {

void ExtractorConfig::validate() const {
  if (conv_channels.empty()) throw ValidationError("extractor needs at least one conv layer");
  if (taps.empty()) throw ValidationError("extractor needs at least one tap");
  const int n = static_cast<int>(conv_channels.size());
  for (int t : taps)
    if (t < 1 || t > n)
      throw ValidationError("extractor tap index " + std::to_string(t) + " out of range");
  if (!std::is_sorted(taps.begin(), taps.end()))
    throw ValidationError("extractor taps must be sorted ascending");
  for (int p : pool_after)
    if (p < 1 || p > n)
      throw ValidationError("extractor pool index " + std::to_string(p) + " out of range");
  if (in_channels < 1) throw ValidationError("extractor needs >= 1 input channel");
}

FeatureExtractor::FeatureExtractor(const ExtractorConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(cfg_.seed);
  build(rng);
}

FeatureExtractor::FeatureExtractor(const FeatureExtractor& o) : cfg_(o.cfg_), tap_op_(o.tap_op_) {
  ops_.reserve(o.ops_.size());
  for (const auto& op : o.ops_) {
    ops_.push_back(op->clone());
    if (auto* c = dynamic_cast<Conv2d*>(ops_.back().get())) convs_.push_back(c);
  }
}

void FeatureExtractor::build(Rng& rng) {
  const int last_tap = cfg_.taps.back();
  int in_c = cfg_.in_channels;
  for (int conv = 1; conv <= last_tap; ++conv) {
    const int out_c = cfg_.conv_channels[conv - 1];
    auto layer = std::make_unique<Conv2d>("conv" + std::to_string(conv), in_c, out_c, 3, 1, 1, 1,
                                          true, rng);
    layer->set_param_grads(false);  // frozen
    convs_.push_back(layer.get());
    ops_.push_back(std::move(layer));
    const int conv_op = static_cast<int>(ops_.size()) - 1;
    if (std::find(cfg_.taps.begin(), cfg_.taps.end(), conv) != cfg_.taps.end())
      tap_op_.push_back(conv_op);
    if (conv != last_tap) {
      ops_.push_back(std::make_unique<ReLU>());
      if (std::find(cfg_.pool_after.begin(), cfg_.pool_after.end(), conv) != cfg_.pool_after.end())
        ops_.push_back(std::make_unique<MaxPool2d>(2, 2));
    }
    in_c = out_c;
  }
}

std::vector<Tensor> FeatureExtractor::forward_taps(const Tensor& x) {
  in_size_ = {x.h(), x.w()};
  std::vector<Tensor> taps;
  taps.reserve(tap_op_.size());
  Tensor cur = x;
  std::size_t next_tap = 0;
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    cur = ops_[i]->forward(cur, false);
    if (next_tap < tap_op_.size() && static_cast<int>(i) == tap_op_[next_tap]) {
      taps.push_back(cur);
      ++next_tap;
    }
  }
  out_shape_ = cur.shape();
  return taps;
}

Tensor FeatureExtractor::backward_taps(const std::vector<Tensor>& tap_grads) {
  if (tap_grads.size() != tap_op_.size())
    throw ValidationError("extractor backward: expected " + std::to_string(tap_op_.size()) +
                          " tap gradients, got " + std::to_string(tap_grads.size()));
  Tensor grad(out_shape_[0], out_shape_[1], out_shape_[2], out_shape_[3]);
  int next_tap = static_cast<int>(tap_op_.size()) - 1;
  for (int i = static_cast<int>(ops_.size()) - 1; i >= 0; --i) {
    if (next_tap >= 0 && i == tap_op_[next_tap]) {
      const Tensor& tg = tap_grads[next_tap];
      if (!tg.same_shape(grad))
        throw ValidationError("extractor backward: tap gradient shape mismatch");
      for (std::size_t k = 0; k < grad.size(); ++k) grad.raw()[k] += tg.raw()[k];
      --next_tap;
    }
    grad = ops_[i]->backward(grad);
  }
  return grad;
}

void FeatureExtractor::save_weights(const std::filesystem::path& path) const {
  std::vector<std::pair<std::string, const Tensor*>> items;
  for (const Conv2d* c : convs_) {
    items.emplace_back(c->weight.name, &c->weight.value);
    items.emplace_back(c->bias_p.name, &c->bias_p.value);
  }
  save_tensor_archive(path, items, {{"kind", "feature-extractor"}});
}

void FeatureExtractor::load_weights(const std::filesystem::path& path) {
  const NamedTensors archive = load_tensor_archive(path);
  for (Conv2d* c : convs_) {
    c->weight.value = archive.get(c->weight.name, c->weight.value.shape());
    c->bias_p.value = archive.get(c->bias_p.name, c->bias_p.value.shape());
  }
}

Tensor image_to_tensor(const Image2D& img, int channels) {
  Tensor t(1, channels, img.height(), img.width());
  for (int c = 0; c < channels; ++c)
    std::copy(img.raw().begin(), img.raw().end(),
              t.raw().begin() + static_cast<std::size_t>(c) * img.size());
  return t;
}

Image2D tensor_to_image(const Tensor& t, int channel) {
  Image2D img(t.h(), t.w());
  const double* src = t.item(0) + static_cast<std::size_t>(channel) * t.h() * t.w();
  std::copy(src, src + img.size(), img.raw().begin());
  return img;
}

}  // namespace nn
}  // namespace styleseg
