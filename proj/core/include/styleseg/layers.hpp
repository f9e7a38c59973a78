#pragma once

#include <memory>
#include <vector>

#include "styleseg/rng.hpp"
#include "styleseg/tensor.hpp"

namespace styleseg {
namespace nn {

// Single-input single-output layer with cached state for one backward pass.
// Training loops own one model per thread; layers are not re-entrant.
class Layer {
public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x, bool train) = 0;
  virtual Tensor backward(const Tensor& grad_out) = 0;
  virtual void collect_params(std::vector<Param*>& out) { (void)out; }
  // Named persistent tensors (parameters plus batch-norm running stats).
  virtual void collect_state(std::vector<std::pair<std::string, Tensor*>>& out) { (void)out; }
  virtual std::unique_ptr<Layer> clone() const = 0;
};

class Conv2d : public Layer {
public:
  Conv2d(std::string name, int in_channels, int out_channels, int kernel, int stride, int pad,
         int dilation, bool bias, Rng& init_rng);

  Tensor forward(const Tensor& x, bool train) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(std::vector<Param*>& out) override;
  void collect_state(std::vector<std::pair<std::string, Tensor*>>& out) override;
  std::unique_ptr<Layer> clone() const override;

  // Skips weight/bias gradient accumulation (frozen feature extractors).
  void set_param_grads(bool enabled) { param_grads_ = enabled; }

  static std::array<int, 2> output_size(int h, int w, int kernel, int stride, int pad,
                                        int dilation);

  Param weight;  // (out_c, in_c, k, k)
  Param bias_p;  // (1, out_c, 1, 1); empty when bias disabled

private:
  int in_c_, out_c_, k_, stride_, pad_, dil_;
  bool has_bias_;
  bool param_grads_ = true;
  Tensor input_;  // cached for backward
};

class BatchNorm2d : public Layer {
public:
  BatchNorm2d(std::string name, int channels, double eps = 1e-5, double momentum = 0.1);

  Tensor forward(const Tensor& x, bool train) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(std::vector<Param*>& out) override;
  void collect_state(std::vector<std::pair<std::string, Tensor*>>& out) override;
  std::unique_ptr<Layer> clone() const override;

  Param gamma, beta;
  Tensor running_mean, running_var;  // (1, C, 1, 1)

private:
  std::string name_;
  int c_;
  double eps_, momentum_;
  bool last_train_ = false;
  Tensor input_, xhat_;
  std::vector<double> batch_mean_, batch_var_;
};

class ReLU : public Layer {
public:
  Tensor forward(const Tensor& x, bool train) override;
  Tensor backward(const Tensor& grad_out) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ReLU>(*this); }

private:
  std::vector<std::uint8_t> mask_;
};

class MaxPool2d : public Layer {
public:
  MaxPool2d(int kernel, int stride) : k_(kernel), stride_(stride) {}

  Tensor forward(const Tensor& x, bool train) override;
  Tensor backward(const Tensor& grad_out) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool2d>(*this); }

private:
  int k_, stride_;
  std::array<int, 4> in_shape_{};
  std::vector<std::size_t> argmax_;
};

// Inverted dropout with an owned deterministic stream.
class Dropout : public Layer {
public:
  Dropout(double rate, std::uint64_t seed) : rate_(rate), rng_(seed) {}

  Tensor forward(const Tensor& x, bool train) override;
  Tensor backward(const Tensor& grad_out) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dropout>(*this); }

private:
  double rate_;
  Rng rng_;
  std::vector<double> mask_;
  bool last_train_ = false;
};

// --- shape ops used inside composite modules ---

// Bilinear resize with half-pixel centers; backward scatters the gradient.
Tensor bilinear_resize(const Tensor& x, int out_h, int out_w);
Tensor bilinear_resize_backward(const Tensor& grad_out, int in_h, int in_w);

// Global average pool to (N, C, 1, 1) and its adjoint.
Tensor global_avg_pool(const Tensor& x);
Tensor global_avg_pool_backward(const Tensor& grad_out, int in_h, int in_w);

// Channel concatenation and the matching split of the gradient.
Tensor concat_channels(const std::vector<Tensor>& xs);
std::vector<Tensor> split_channels(const Tensor& grad, const std::vector<int>& channel_counts);

// Mean per-pixel 3-class cross entropy from raw logits; grad has logits shape.
struct CrossEntropyResult {
  double loss;
  Tensor grad;
};
CrossEntropyResult softmax_cross_entropy(const Tensor& logits,
                                         const std::vector<std::uint8_t>& targets);

// Softmax over channels (inference-side helper).
Tensor channel_softmax(const Tensor& logits);

}  // namespace nn
}  // namespace styleseg
