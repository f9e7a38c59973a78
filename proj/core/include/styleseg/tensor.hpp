#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "styleseg/common.hpp"

namespace styleseg {
namespace nn {

// Dense NCHW tensor of doubles. Channel planes are contiguous, which lets
// conv layers treat each batch item as a plain (C x H*W) matrix.
class Tensor {
public:
  Tensor() = default;
  Tensor(int n, int c, int h, int w, double fill = 0.0)
      : n_(n), c_(c), h_(h), w_(w),
        data_(static_cast<std::size_t>(n) * c * h * w, fill) {
    if (n < 1 || c < 1 || h < 1 || w < 1)
      throw ValidationError("tensor dimensions must be >= 1");
  }

  int n() const { return n_; }
  int c() const { return c_; }
  int h() const { return h_; }
  int w() const { return w_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  std::array<int, 4> shape() const { return {n_, c_, h_, w_}; }

  double& at(int n, int c, int y, int x) {
    return data_[((static_cast<std::size_t>(n) * c_ + c) * h_ + y) * w_ + x];
  }
  double at(int n, int c, int y, int x) const {
    return data_[((static_cast<std::size_t>(n) * c_ + c) * h_ + y) * w_ + x];
  }

  double* item(int n) { return data_.data() + static_cast<std::size_t>(n) * c_ * h_ * w_; }
  const double* item(int n) const {
    return data_.data() + static_cast<std::size_t>(n) * c_ * h_ * w_;
  }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  bool same_shape(const Tensor& o) const {
    return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

private:
  int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
  std::vector<double> data_;
};

// Learnable parameter with its gradient and momentum buffers.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor momentum;

  void zero_grad() { grad.fill(0.0); }
};

struct SgdOptions {
  double momentum = 0.9;
  double weight_decay = 1e-4;
};

// Classic SGD with momentum: v = mu*v - lr*(g + wd*w); w += v.
void sgd_step(const std::vector<Param*>& params, double lr, const SgdOptions& opt);

}  // namespace nn
}  // namespace styleseg
