#include "styleseg/layers.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

namespace styleseg {
namespace nn {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(std::string name, int in_channels, int out_channels, int kernel, int stride,
               int pad, int dilation, bool bias, Rng& init_rng)
    : in_c_(in_channels), out_c_(out_channels), k_(kernel), stride_(stride), pad_(pad),
      dil_(dilation), has_bias_(bias) {
  weight.name = name + ".weight";
  weight.value = Tensor(out_channels, in_channels, kernel, kernel);
  weight.grad = Tensor(out_channels, in_channels, kernel, kernel);
  const double scale = std::sqrt(2.0 / (in_channels * kernel * kernel));
  for (double& v : weight.value.raw()) v = scale * init_rng.normal();
  if (bias) {
    bias_p.name = name + ".bias";
    bias_p.value = Tensor(1, out_channels, 1, 1);
    bias_p.grad = Tensor(1, out_channels, 1, 1);
  }
}

std::array<int, 2> Conv2d::output_size(int h, int w, int kernel, int stride, int pad,
                                       int dilation) {
  const int eff = dilation * (kernel - 1) + 1;
  const int oh = (h + 2 * pad - eff) / stride + 1;
  const int ow = (w + 2 * pad - eff) / stride + 1;
  if (oh < 1 || ow < 1)
    throw ValidationError("conv: dilated kernel exceeds padded input (" + std::to_string(h) +
                          "x" + std::to_string(w) + ", rate " + std::to_string(dilation) + ")");
  return {oh, ow};
}

namespace {

// col is (in_c * k * k) x (oh * ow), row-major.
void im2col(const double* x, int c, int h, int w, int kernel, int stride, int pad, int dil,
            int oh, int ow, double* col) {
  const int khw = kernel * kernel;
  for (int ci = 0; ci < c; ++ci) {
    const double* plane = x + static_cast<std::size_t>(ci) * h * w;
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        double* row = col + (static_cast<std::size_t>(ci) * khw + ky * kernel + kx) *
                                static_cast<std::size_t>(oh) * ow;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky * dil;
          if (iy < 0 || iy >= h) {
            std::fill(row + static_cast<std::size_t>(oy) * ow,
                      row + static_cast<std::size_t>(oy + 1) * ow, 0.0);
            continue;
          }
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride - pad + kx * dil;
            row[static_cast<std::size_t>(oy) * ow + ox] =
                (ix < 0 || ix >= w) ? 0.0 : plane[static_cast<std::size_t>(iy) * w + ix];
          }
        }
      }
    }
  }
}

void col2im(const double* col, int c, int h, int w, int kernel, int stride, int pad, int dil,
            int oh, int ow, double* x) {
  const int khw = kernel * kernel;
  for (int ci = 0; ci < c; ++ci) {
    double* plane = x + static_cast<std::size_t>(ci) * h * w;
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        const double* row = col + (static_cast<std::size_t>(ci) * khw + ky * kernel + kx) *
                                      static_cast<std::size_t>(oh) * ow;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky * dil;
          if (iy < 0 || iy >= h) continue;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride - pad + kx * dil;
            if (ix < 0 || ix >= w) continue;
            plane[static_cast<std::size_t>(iy) * w + ix] +=
                row[static_cast<std::size_t>(oy) * ow + ox];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor Conv2d::forward(const Tensor& x, bool /*train*/) {
  if (x.c() != in_c_)
    throw ValidationError("conv '" + weight.name + "': expected " + std::to_string(in_c_) +
                          " input channels, got " + std::to_string(x.c()));
  const auto [oh, ow] = output_size(x.h(), x.w(), k_, stride_, pad_, dil_);
  input_ = x;
  Tensor out(x.n(), out_c_, oh, ow);
  const int kdim = in_c_ * k_ * k_;
  const int npix = oh * ow;
  std::vector<double> col(static_cast<std::size_t>(kdim) * npix);
  ConstMapMat W(weight.value.raw().data(), out_c_, kdim);
  for (int i = 0; i < x.n(); ++i) {
    im2col(x.item(i), in_c_, x.h(), x.w(), k_, stride_, pad_, dil_, oh, ow, col.data());
    ConstMapMat C(col.data(), kdim, npix);
    MapMat O(out.item(i), out_c_, npix);
    O.noalias() = W * C;
  }
  if (has_bias_) {
    for (int i = 0; i < out.n(); ++i)
      for (int c = 0; c < out_c_; ++c) {
        double* plane = out.item(i) + static_cast<std::size_t>(c) * npix;
        const double b = bias_p.value.raw()[c];
        for (int p = 0; p < npix; ++p) plane[p] += b;
      }
  }
  return out;
}

Tensor Conv2d::backward(const Tensor& grad_out) {
  const int oh = grad_out.h(), ow = grad_out.w();
  const int kdim = in_c_ * k_ * k_;
  const int npix = oh * ow;
  Tensor dx(input_.n(), in_c_, input_.h(), input_.w());
  std::vector<double> col(static_cast<std::size_t>(kdim) * npix);
  std::vector<double> dcol(static_cast<std::size_t>(kdim) * npix);
  ConstMapMat W(weight.value.raw().data(), out_c_, kdim);
  MapMat dW(weight.grad.raw().data(), out_c_, kdim);
  for (int i = 0; i < input_.n(); ++i) {
    ConstMapMat G(grad_out.item(i), out_c_, npix);
    if (param_grads_) {
      im2col(input_.item(i), in_c_, input_.h(), input_.w(), k_, stride_, pad_, dil_, oh, ow,
             col.data());
      ConstMapMat C(col.data(), kdim, npix);
      dW.noalias() += G * C.transpose();
      if (has_bias_)
        for (int c = 0; c < out_c_; ++c) bias_p.grad.raw()[c] += G.row(c).sum();
    }
    MapMat dC(dcol.data(), kdim, npix);
    dC.noalias() = W.transpose() * G;
    col2im(dcol.data(), in_c_, dx.h(), dx.w(), k_, stride_, pad_, dil_, oh, ow, dx.item(i));
  }
  return dx;
}

void Conv2d::collect_params(std::vector<Param*>& out) {
  out.push_back(&weight);
  if (has_bias_) out.push_back(&bias_p);
}

void Conv2d::collect_state(std::vector<std::pair<std::string, Tensor*>>& out) {
  out.emplace_back(weight.name, &weight.value);
  if (has_bias_) out.emplace_back(bias_p.name, &bias_p.value);
}

std::unique_ptr<Layer> Conv2d::clone() const { return std::make_unique<Conv2d>(*this); }

// ------------------------------------------------------------ BatchNorm2d

BatchNorm2d::BatchNorm2d(std::string name, int channels, double eps, double momentum)
    : name_(name), c_(channels), eps_(eps), momentum_(momentum) {
  gamma.name = name + ".gamma";
  gamma.value = Tensor(1, channels, 1, 1, 1.0);
  gamma.grad = Tensor(1, channels, 1, 1);
  beta.name = name + ".beta";
  beta.value = Tensor(1, channels, 1, 1);
  beta.grad = Tensor(1, channels, 1, 1);
  running_mean = Tensor(1, channels, 1, 1, 0.0);
  running_var = Tensor(1, channels, 1, 1, 1.0);
}

Tensor BatchNorm2d::forward(const Tensor& x, bool train) {
  if (x.c() != c_) throw ValidationError("batchnorm '" + gamma.name + "': channel mismatch");
  last_train_ = train;
  input_ = x;
  const int n = x.n(), h = x.h(), w = x.w();
  const double m = static_cast<double>(n) * h * w;
  batch_mean_.assign(c_, 0.0);
  batch_var_.assign(c_, 0.0);
  if (train) {
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < c_; ++c) {
        const double* plane = x.item(i) + static_cast<std::size_t>(c) * h * w;
        for (int p = 0; p < h * w; ++p) batch_mean_[c] += plane[p];
      }
    for (int c = 0; c < c_; ++c) batch_mean_[c] /= m;
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < c_; ++c) {
        const double* plane = x.item(i) + static_cast<std::size_t>(c) * h * w;
        for (int p = 0; p < h * w; ++p) {
          const double d = plane[p] - batch_mean_[c];
          batch_var_[c] += d * d;
        }
      }
    for (int c = 0; c < c_; ++c) batch_var_[c] /= m;
    for (int c = 0; c < c_; ++c) {
      running_mean.raw()[c] =
          (1.0 - momentum_) * running_mean.raw()[c] + momentum_ * batch_mean_[c];
      running_var.raw()[c] = (1.0 - momentum_) * running_var.raw()[c] + momentum_ * batch_var_[c];
    }
  } else {
    for (int c = 0; c < c_; ++c) {
      batch_mean_[c] = running_mean.raw()[c];
      batch_var_[c] = running_var.raw()[c];
    }
  }

  Tensor out(n, c_, h, w);
  xhat_ = Tensor(n, c_, h, w);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < c_; ++c) {
      const double inv = 1.0 / std::sqrt(batch_var_[c] + eps_);
      const double g = gamma.value.raw()[c], b = beta.value.raw()[c], mu = batch_mean_[c];
      const double* src = x.item(i) + static_cast<std::size_t>(c) * h * w;
      double* xh = xhat_.item(i) + static_cast<std::size_t>(c) * h * w;
      double* dst = out.item(i) + static_cast<std::size_t>(c) * h * w;
      for (int p = 0; p < h * w; ++p) {
        xh[p] = (src[p] - mu) * inv;
        dst[p] = g * xh[p] + b;
      }
    }
  return out;
}

Tensor BatchNorm2d::backward(const Tensor& grad_out) {
  const int n = grad_out.n(), h = grad_out.h(), w = grad_out.w();
  const double m = static_cast<double>(n) * h * w;
  Tensor dx(n, c_, h, w);
  for (int c = 0; c < c_; ++c) {
    const double inv = 1.0 / std::sqrt(batch_var_[c] + eps_);
    const double g = gamma.value.raw()[c];
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (int i = 0; i < n; ++i) {
      const double* dy = grad_out.item(i) + static_cast<std::size_t>(c) * h * w;
      const double* xh = xhat_.item(i) + static_cast<std::size_t>(c) * h * w;
      for (int p = 0; p < h * w; ++p) {
        sum_dy += dy[p];
        sum_dy_xhat += dy[p] * xh[p];
      }
    }
    gamma.grad.raw()[c] += sum_dy_xhat;
    beta.grad.raw()[c] += sum_dy;
    for (int i = 0; i < n; ++i) {
      const double* dy = grad_out.item(i) + static_cast<std::size_t>(c) * h * w;
      const double* xh = xhat_.item(i) + static_cast<std::size_t>(c) * h * w;
      double* dxp = dx.item(i) + static_cast<std::size_t>(c) * h * w;
      for (int p = 0; p < h * w; ++p) {
        if (last_train_)
          dxp[p] = g * inv * (dy[p] - sum_dy / m - xh[p] * sum_dy_xhat / m);
        else
          dxp[p] = g * inv * dy[p];
      }
    }
  }
  return dx;
}

void BatchNorm2d::collect_params(std::vector<Param*>& out) {
  out.push_back(&gamma);
  out.push_back(&beta);
}

void BatchNorm2d::collect_state(std::vector<std::pair<std::string, Tensor*>>& out) {
  out.emplace_back(gamma.name, &gamma.value);
  out.emplace_back(beta.name, &beta.value);
  out.emplace_back(name_ + ".running_mean", &running_mean);
  out.emplace_back(name_ + ".running_var", &running_var);
}

std::unique_ptr<Layer> BatchNorm2d::clone() const { return std::make_unique<BatchNorm2d>(*this); }

// ----------------------------------------------------------------- ReLU

Tensor ReLU::forward(const Tensor& x, bool /*train*/) {
  Tensor out = x;
  mask_.assign(x.size(), 0);
  for (std::size_t i = 0; i < out.raw().size(); ++i) {
    if (out.raw()[i] > 0.0)
      mask_[i] = 1;
    else
      out.raw()[i] = 0.0;
  }
  return out;
}

Tensor ReLU::backward(const Tensor& grad_out) {
  Tensor dx = grad_out;
  for (std::size_t i = 0; i < dx.raw().size(); ++i)
    if (!mask_[i]) dx.raw()[i] = 0.0;
  return dx;
}

// ------------------------------------------------------------- MaxPool2d

Tensor MaxPool2d::forward(const Tensor& x, bool /*train*/) {
  in_shape_ = x.shape();
  const int oh = (x.h() - k_) / stride_ + 1;
  const int ow = (x.w() - k_) / stride_ + 1;
  if (oh < 1 || ow < 1) throw ValidationError("maxpool: input smaller than kernel");
  Tensor out(x.n(), x.c(), oh, ow);
  argmax_.assign(out.size(), 0);
  std::size_t oi = 0;
  for (int i = 0; i < x.n(); ++i)
    for (int c = 0; c < x.c(); ++c) {
      const double* plane = x.item(i) + static_cast<std::size_t>(c) * x.h() * x.w();
      for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox, ++oi) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t best_idx = 0;
          for (int ky = 0; ky < k_; ++ky)
            for (int kx = 0; kx < k_; ++kx) {
              const int iy = oy * stride_ + ky;
              const int ix = ox * stride_ + kx;
              const double v = plane[static_cast<std::size_t>(iy) * x.w() + ix];
              if (v > best) {
                best = v;
                best_idx = static_cast<std::size_t>(iy) * x.w() + ix;
              }
            }
          out.raw()[oi] = best;
          argmax_[oi] = (static_cast<std::size_t>(i) * x.c() + c) * x.h() * x.w() + best_idx;
        }
    }
  return out;
}

Tensor MaxPool2d::backward(const Tensor& grad_out) {
  Tensor dx(in_shape_[0], in_shape_[1], in_shape_[2], in_shape_[3]);
  for (std::size_t i = 0; i < grad_out.size(); ++i) dx.raw()[argmax_[i]] += grad_out.raw()[i];
  return dx;
}

// --------------------------------------------------------------- Dropout

Tensor Dropout::forward(const Tensor& x, bool train) {
  last_train_ = train && rate_ > 0.0;
  if (!last_train_) return x;
  Tensor out = x;
  mask_.assign(x.size(), 0.0);
  const double keep = 1.0 - rate_;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask_[i] = rng_.bernoulli(keep) ? 1.0 / keep : 0.0;
    out.raw()[i] *= mask_[i];
  }
  return out;
}

Tensor Dropout::backward(const Tensor& grad_out) {
  if (!last_train_) return grad_out;
  Tensor dx = grad_out;
  for (std::size_t i = 0; i < dx.size(); ++i) dx.raw()[i] *= mask_[i];
  return dx;
}

// ------------------------------------------------------------ shape ops

Tensor bilinear_resize(const Tensor& x, int out_h, int out_w) {
  if (out_h == x.h() && out_w == x.w()) return x;
  Tensor out(x.n(), x.c(), out_h, out_w);
  const double sy = static_cast<double>(x.h()) / out_h;
  const double sx = static_cast<double>(x.w()) / out_w;
  for (int i = 0; i < x.n(); ++i)
    for (int c = 0; c < x.c(); ++c) {
      const double* src = x.item(i) + static_cast<std::size_t>(c) * x.h() * x.w();
      double* dst = out.item(i) + static_cast<std::size_t>(c) * out_h * out_w;
      for (int oy = 0; oy < out_h; ++oy) {
        const double fy = std::clamp((oy + 0.5) * sy - 0.5, 0.0, x.h() - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, x.h() - 1);
        const double wy = fy - y0;
        for (int ox = 0; ox < out_w; ++ox) {
          const double fx = std::clamp((ox + 0.5) * sx - 0.5, 0.0, x.w() - 1.0);
          const int x0 = static_cast<int>(fx);
          const int x1 = std::min(x0 + 1, x.w() - 1);
          const double wx = fx - x0;
          dst[static_cast<std::size_t>(oy) * out_w + ox] =
              (1 - wy) * ((1 - wx) * src[static_cast<std::size_t>(y0) * x.w() + x0] +
                          wx * src[static_cast<std::size_t>(y0) * x.w() + x1]) +
              wy * ((1 - wx) * src[static_cast<std::size_t>(y1) * x.w() + x0] +
                    wx * src[static_cast<std::size_t>(y1) * x.w() + x1]);
        }
      }
    }
  return out;
}

Tensor bilinear_resize_backward(const Tensor& grad_out, int in_h, int in_w) {
  if (in_h == grad_out.h() && in_w == grad_out.w()) return grad_out;
  Tensor dx(grad_out.n(), grad_out.c(), in_h, in_w);
  const double sy = static_cast<double>(in_h) / grad_out.h();
  const double sx = static_cast<double>(in_w) / grad_out.w();
  for (int i = 0; i < grad_out.n(); ++i)
    for (int c = 0; c < grad_out.c(); ++c) {
      const double* g = grad_out.item(i) + static_cast<std::size_t>(c) * grad_out.h() * grad_out.w();
      double* dst = dx.item(i) + static_cast<std::size_t>(c) * in_h * in_w;
      for (int oy = 0; oy < grad_out.h(); ++oy) {
        const double fy = std::clamp((oy + 0.5) * sy - 0.5, 0.0, in_h - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, in_h - 1);
        const double wy = fy - y0;
        for (int ox = 0; ox < grad_out.w(); ++ox) {
          const double fx = std::clamp((ox + 0.5) * sx - 0.5, 0.0, in_w - 1.0);
          const int x0 = static_cast<int>(fx);
          const int x1 = std::min(x0 + 1, in_w - 1);
          const double wx = fx - x0;
          const double v = g[static_cast<std::size_t>(oy) * grad_out.w() + ox];
          dst[static_cast<std::size_t>(y0) * in_w + x0] += (1 - wy) * (1 - wx) * v;
          dst[static_cast<std::size_t>(y0) * in_w + x1] += (1 - wy) * wx * v;
          dst[static_cast<std::size_t>(y1) * in_w + x0] += wy * (1 - wx) * v;
          dst[static_cast<std::size_t>(y1) * in_w + x1] += wy * wx * v;
        }
      }
    }
  return dx;
}

Tensor global_avg_pool(const Tensor& x) {
  Tensor out(x.n(), x.c(), 1, 1);
  const double m = static_cast<double>(x.h()) * x.w();
  for (int i = 0; i < x.n(); ++i)
    for (int c = 0; c < x.c(); ++c) {
      const double* plane = x.item(i) + static_cast<std::size_t>(c) * x.h() * x.w();
      double s = 0.0;
      for (int p = 0; p < x.h() * x.w(); ++p) s += plane[p];
      out.at(i, c, 0, 0) = s / m;
    }
  return out;
}

Tensor global_avg_pool_backward(const Tensor& grad_out, int in_h, int in_w) {
  Tensor dx(grad_out.n(), grad_out.c(), in_h, in_w);
  const double m = static_cast<double>(in_h) * in_w;
  for (int i = 0; i < grad_out.n(); ++i)
    for (int c = 0; c < grad_out.c(); ++c) {
      const double g = grad_out.at(i, c, 0, 0) / m;
      double* plane = dx.item(i) + static_cast<std::size_t>(c) * in_h * in_w;
      for (int p = 0; p < in_h * in_w; ++p) plane[p] = g;
    }
  return dx;
}

Tensor concat_channels(const std::vector<Tensor>& xs) {
  if (xs.empty()) throw ValidationError("concat: no inputs");
  int total_c = 0;
  for (const auto& x : xs) {
    if (x.n() != xs[0].n() || x.h() != xs[0].h() || x.w() != xs[0].w())
      throw ValidationError("concat: inputs must share batch and spatial dims");
    total_c += x.c();
  }
  Tensor out(xs[0].n(), total_c, xs[0].h(), xs[0].w());
  const std::size_t plane = static_cast<std::size_t>(xs[0].h()) * xs[0].w();
  for (int i = 0; i < out.n(); ++i) {
    double* dst = out.item(i);
    for (const auto& x : xs) {
      std::copy(x.item(i), x.item(i) + static_cast<std::size_t>(x.c()) * plane, dst);
      dst += static_cast<std::size_t>(x.c()) * plane;
    }
  }
  return out;
}

std::vector<Tensor> split_channels(const Tensor& grad, const std::vector<int>& channel_counts) {
  std::vector<Tensor> out;
  out.reserve(channel_counts.size());
  const std::size_t plane = static_cast<std::size_t>(grad.h()) * grad.w();
  int offset = 0;
  for (int c : channel_counts) {
    Tensor g(grad.n(), c, grad.h(), grad.w());
    for (int i = 0; i < grad.n(); ++i) {
      const double* src = grad.item(i) + static_cast<std::size_t>(offset) * plane;
      std::copy(src, src + static_cast<std::size_t>(c) * plane, g.item(i));
    }
    out.push_back(std::move(g));
    offset += c;
  }
  if (offset != grad.c()) throw ValidationError("split: channel counts do not sum to input");
  return out;
}

CrossEntropyResult softmax_cross_entropy(const Tensor& logits,
                                         const std::vector<std::uint8_t>& targets) {
  const int npix = logits.h() * logits.w();
  if (targets.size() != static_cast<std::size_t>(logits.n()) * npix)
    throw ValidationError("cross entropy: target count does not match logits");
  CrossEntropyResult res{0.0, Tensor(logits.n(), logits.c(), logits.h(), logits.w())};
  const double inv_m = 1.0 / (static_cast<double>(logits.n()) * npix);
  for (int i = 0; i < logits.n(); ++i) {
    const double* base = logits.item(i);
    double* gbase = res.grad.item(i);
    for (int p = 0; p < npix; ++p) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < logits.c(); ++c)
        mx = std::max(mx, base[static_cast<std::size_t>(c) * npix + p]);
      double denom = 0.0;
      for (int c = 0; c < logits.c(); ++c)
        denom += std::exp(base[static_cast<std::size_t>(c) * npix + p] - mx);
      const int t = targets[static_cast<std::size_t>(i) * npix + p];
      res.loss -= (base[static_cast<std::size_t>(t) * npix + p] - mx - std::log(denom)) * inv_m;
      for (int c = 0; c < logits.c(); ++c) {
        const double s = std::exp(base[static_cast<std::size_t>(c) * npix + p] - mx) / denom;
        gbase[static_cast<std::size_t>(c) * npix + p] = (s - (c == t ? 1.0 : 0.0)) * inv_m;
      }
    }
  }
  return res;
}

Tensor channel_softmax(const Tensor& logits) {
  Tensor out = logits;
  const int npix = logits.h() * logits.w();
  for (int i = 0; i < logits.n(); ++i) {
    double* base = out.item(i);
    for (int p = 0; p < npix; ++p) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < logits.c(); ++c)
        mx = std::max(mx, base[static_cast<std::size_t>(c) * npix + p]);
      double denom = 0.0;
      for (int c = 0; c < logits.c(); ++c)
        denom += std::exp(base[static_cast<std::size_t>(c) * npix + p] - mx);
      for (int c = 0; c < logits.c(); ++c) {
        auto& v = base[static_cast<std::size_t>(c) * npix + p];
        v = std::exp(v - mx) / denom;
      }
    }
  }
  return out;
}

}  // namespace nn
}  // namespace styleseg
