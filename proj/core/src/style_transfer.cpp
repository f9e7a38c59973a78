#include "styleseg/style_transfer.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

namespace styleseg {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

GramMatrix gram(const nn::Tensor& feature_map) {
  if (feature_map.n() != 1)
    throw ValidationError("gram expects a single feature map (batch 1)");
  const int c = feature_map.c();
  const int hw = feature_map.h() * feature_map.w();
  Eigen::Map<const RowMat> F(feature_map.item(0), c, hw);
  GramMatrix g;
  g.channels = c;
  g.m.resize(static_cast<std::size_t>(c) * c);
  Eigen::Map<RowMat> G(g.m.data(), c, c);
  G.noalias() = F * F.transpose();
  G /= static_cast<double>(c) * hw;
  return g;
}

void TransferConfig::validate() const {
  if (!(content_weight > 0.0) || !std::isfinite(content_weight))
    throw ValidationError("transfer: content weight must be finite and > 0");
  if (!(style_weight > 0.0) || !std::isfinite(style_weight))
    throw ValidationError("transfer: style weight must be finite and > 0");
  if (epochs < 0) throw ValidationError("transfer: epochs must be >= 0");
  if (!(step_size > 0.0)) throw ValidationError("transfer: step size must be > 0");
}

namespace {

double tap_norm(const nn::Tensor& t) {
  return static_cast<double>(t.c()) * t.h() * t.w();
}

// Content term and its per-tap gradients (gradients optional).
double content_terms(const std::vector<nn::Tensor>& gen_taps,
                     const std::vector<nn::Tensor>& content_taps,
                     std::vector<nn::Tensor>* grads, double weight) {
  double loss = 0.0;
  for (std::size_t j = 0; j < gen_taps.size(); ++j) {
    const auto& g = gen_taps[j];
    const auto& c = content_taps[j];
    if (!g.same_shape(c))
      throw ValidationError("content loss: generated and content feature shapes differ");
    const double norm = tap_norm(g);
    double sq = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double d = g.raw()[i] - c.raw()[i];
      sq += d * d;
      if (grads) (*grads)[j].raw()[i] += weight * 2.0 / norm * d;
    }
    loss += sq / norm;
  }
  return loss;
}

// Style term and its per-tap gradients (gradients optional).
double style_terms(const std::vector<nn::Tensor>& gen_taps, const std::vector<GramMatrix>& style,
                   std::vector<nn::Tensor>* grads, double weight) {
  double loss = 0.0;
  for (std::size_t j = 0; j < gen_taps.size(); ++j) {
    const auto& t = gen_taps[j];
    const GramMatrix gg = gram(t);
    if (gg.channels != style[j].channels)
      throw ValidationError("style loss: extractor channel counts differ between inputs");
    const int c = gg.channels;
    RowMat D(c, c);
    for (int i = 0; i < c; ++i)
      for (int k = 0; k < c; ++k) D(i, k) = gg.at(i, k) - style[j].at(i, k);
    loss += D.squaredNorm();
    if (grads) {
      const int hw = t.h() * t.w();
      Eigen::Map<const RowMat> F(t.item(0), c, hw);
      Eigen::Map<RowMat> dF((*grads)[j].item(0), c, hw);
      // d/dF ||(1/n) F F^T - A||_F^2 = (4/n) D F, n = C*H*W
      dF.noalias() += weight * 4.0 / tap_norm(t) * (D * F);
    }
  }
  return loss;
}

std::vector<nn::Tensor> zero_like(const std::vector<nn::Tensor>& taps) {
  std::vector<nn::Tensor> out;
  out.reserve(taps.size());
  for (const auto& t : taps) out.emplace_back(t.n(), t.c(), t.h(), t.w());
  return out;
}

}  // namespace

double content_loss(const Image2D& generated, const Image2D& content, nn::FeatureExtractor& fx) {
  if (generated.height() != content.height() || generated.width() != content.width())
    throw ValidationError("content loss: image shapes differ");
  const int ch = fx.config().in_channels;
  const auto content_taps = fx.forward_taps(nn::image_to_tensor(content, ch));
  const auto gen_taps = fx.forward_taps(nn::image_to_tensor(generated, ch));
  return content_terms(gen_taps, content_taps, nullptr, 1.0);
}

double style_loss(const Image2D& generated, const Image2D& style_target,
                  nn::FeatureExtractor& fx) {
  const int ch = fx.config().in_channels;
  const auto style_taps = fx.forward_taps(nn::image_to_tensor(style_target, ch));
  std::vector<GramMatrix> style_grams;
  style_grams.reserve(style_taps.size());
  for (const auto& t : style_taps) style_grams.push_back(gram(t));
  const auto gen_taps = fx.forward_taps(nn::image_to_tensor(generated, ch));
  return style_terms(gen_taps, style_grams, nullptr, 1.0);
}

TransferResult transfer(const Image2D& content, const Image2D& style_target,
                        nn::FeatureExtractor& fx, const TransferConfig& cfg) {
  cfg.validate();
  const int ch = fx.config().in_channels;
  const auto content_taps = fx.forward_taps(nn::image_to_tensor(content, ch));
  const auto style_taps = fx.forward_taps(nn::image_to_tensor(style_target, ch));
  std::vector<GramMatrix> style_grams;
  style_grams.reserve(style_taps.size());
  for (const auto& t : style_taps) style_grams.push_back(gram(t));

  TransferResult res;
  res.image = content;

  auto evaluate = [&](bool want_grads, std::vector<nn::Tensor>* grads, double* c_part,
                      double* s_part) {
    auto taps = fx.forward_taps(nn::image_to_tensor(res.image, ch));
    if (want_grads) *grads = zero_like(taps);
    const double lc = content_terms(taps, content_taps, grads, cfg.content_weight);
    const double ls = style_terms(taps, style_grams, grads, cfg.style_weight);
    if (c_part) *c_part = lc;
    if (s_part) *s_part = ls;
    return cfg.content_weight * lc + cfg.style_weight * ls;
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<nn::Tensor> tap_grads;
    const double total = evaluate(true, &tap_grads, nullptr, nullptr);
    if (!std::isfinite(total))
      throw DivergenceError("style transfer diverged at epoch " + std::to_string(epoch) +
                            " (step size " + std::to_string(cfg.step_size) + ")");
    res.trace.push_back(total);
    const nn::Tensor dx = fx.backward_taps(tap_grads);
    // The optimization variable is the grayscale slice; replicated-channel
    // gradients collapse by summation.
    for (int y = 0; y < res.image.height(); ++y)
      for (int x = 0; x < res.image.width(); ++x) {
        double g = 0.0;
        for (int c = 0; c < ch; ++c) g += dx.at(0, c, y, x);
        res.image.at(y, x) -= cfg.step_size * g;
      }
  }

  res.final_loss = evaluate(false, nullptr, &res.final_content, &res.final_style);
  if (!std::isfinite(res.final_loss))
    throw DivergenceError("style transfer diverged after the final step (step size " +
                          std::to_string(cfg.step_size) + ")");
  res.initial_loss = res.trace.empty() ? res.final_loss : res.trace.front();

  const auto [lo_it, hi_it] = std::minmax_element(content.raw().begin(), content.raw().end());
  for (double& v : res.image.raw()) v = std::clamp(v, *lo_it, *hi_it);
  return res;
}

void validate_fractions(const LabelFractions& f) {
  double sum = 0.0;
  for (double v : f) {
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError("label fractions must lie in [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("label fractions must sum to 1 (got " + std::to_string(sum) + ")");
}

LabelFractions label_fractions(const Image2D& label_slice) {
  LabelFractions f{0.0, 0.0, 0.0};
  for (double v : label_slice.raw()) {
    const int k = static_cast<int>(v);
    if (k < 0 || k > 2 || v != k)
      throw ValidationError("label slice contains a value outside {0,1,2}");
    f[k] += 1.0;
  }
  for (double& v : f) v /= static_cast<double>(label_slice.size());
  return f;
}

SliceRef select_style_target(const LabelFractions& test_fractions, const StyleLibrary& library,
                             const std::map<SliceRef, LabelFractions>& library_fractions) {
  validate_fractions(test_fractions);
  if (library.member_ids.empty()) throw ValidationError("style library is empty");

  bool found = false;
  SliceRef best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const auto& id : library.member_ids) {
    auto inv = library.slices.find(id);
    if (inv == library.slices.end())
      throw ValidationError("style library: no slice inventory for member '" + id + "'");
    for (const auto& [plane, index] : inv->second) {
      const SliceRef ref{id, plane, index};
      auto fit = library_fractions.find(ref);
      if (fit == library_fractions.end())
        throw ValidationError("style library: missing label fractions for slice " + id + "/" +
                              plane_name(plane) + "/" + std::to_string(index));
      double d2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double d = fit->second[k] - test_fractions[k];
        d2 += d * d;
      }
      if (!found || d2 < best_d2 || (d2 == best_d2 && ref < best)) {
        found = true;
        best_d2 = d2;
        best = ref;
      }
    }
  }
  if (!found) throw ValidationError("style library has no slices");
  return best;
}

}  // namespace styleseg
