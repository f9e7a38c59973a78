#include "styleseg/augment.hpp"

#include <algorithm>
#include <cmath>

namespace styleseg {

void AugmentationConfig::validate() const {
  if (!(scale_range[0] > 0.0) || scale_range[1] < scale_range[0])
    throw ValidationError("augmentation scale range must be positive and ordered");
  if (crop_size[0] < 1 || crop_size[1] < 1)
    throw ValidationError("augmentation crop size must be >= 1");
  if (flip_probability < 0.0 || flip_probability > 1.0 || blur_probability < 0.0 ||
      blur_probability > 1.0)
    throw ValidationError("augmentation probabilities must lie in [0,1]");
  if (!(blur_sigma_range[0] > 0.0) || blur_sigma_range[1] < blur_sigma_range[0])
    throw ValidationError("augmentation blur sigma range must be positive and ordered");
}

Image2D resize_bilinear(const Image2D& img, int out_h, int out_w) {
  if (out_h == img.height() && out_w == img.width()) return img;
  Image2D out(out_h, out_w);
  const double sy = static_cast<double>(img.height()) / out_h;
  const double sx = static_cast<double>(img.width()) / out_w;
  for (int oy = 0; oy < out_h; ++oy) {
    const double fy = std::clamp((oy + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double wy = fy - y0;
    for (int ox = 0; ox < out_w; ++ox) {
      const double fx = std::clamp((ox + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double wx = fx - x0;
      out.at(oy, ox) = (1 - wy) * ((1 - wx) * img.at(y0, x0) + wx * img.at(y0, x1)) +
                       wy * ((1 - wx) * img.at(y1, x0) + wx * img.at(y1, x1));
    }
  }
  return out;
}

Image2D resize_nearest(const Image2D& img, int out_h, int out_w) {
  if (out_h == img.height() && out_w == img.width()) return img;
  Image2D out(out_h, out_w);
  const double sy = static_cast<double>(img.height()) / out_h;
  const double sx = static_cast<double>(img.width()) / out_w;
  for (int oy = 0; oy < out_h; ++oy) {
    const int iy = std::clamp(static_cast<int>(std::floor((oy + 0.5) * sy)), 0, img.height() - 1);
    for (int ox = 0; ox < out_w; ++ox) {
      const int ix = std::clamp(static_cast<int>(std::floor((ox + 0.5) * sx)), 0, img.width() - 1);
      out.at(oy, ox) = img.at(iy, ix);
    }
  }
  return out;
}

Image2D flip_lr(const Image2D& img) {
  Image2D out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.at(y, x) = img.at(y, img.width() - 1 - x);
  return out;
}

Image2D gaussian_blur(const Image2D& img, double sigma) {
  if (!(sigma > 0.0)) return img;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  Image2D tmp(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      double v = 0.0;
      for (int i = -radius; i <= radius; ++i)
        v += kernel[i + radius] * img.at(y, std::clamp(x + i, 0, img.width() - 1));
      tmp.at(y, x) = v;
    }
  Image2D out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      double v = 0.0;
      for (int i = -radius; i <= radius; ++i)
        v += kernel[i + radius] * tmp.at(std::clamp(y + i, 0, img.height() - 1), x);
      out.at(y, x) = v;
    }
  return out;
}

Image2D pad_to(const Image2D& img, int h, int w, PadMode mode) {
  if (img.height() >= h && img.width() >= w) return img;
  Image2D out(std::max(h, img.height()), std::max(w, img.width()), 0.0);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) {
      if (mode == PadMode::Edge)
        out.at(y, x) = img.at(std::min(y, img.height() - 1), std::min(x, img.width() - 1));
      else if (y < img.height() && x < img.width())
        out.at(y, x) = img.at(y, x);
    }
  return out;
}

AugmentedPair augment(const Image2D& slice, const Image2D& label, const AugmentationConfig& cfg,
                      Rng& rng) {
  cfg.validate();
  if (slice.height() != label.height() || slice.width() != label.width())
    throw ValidationError("augment: slice and label shapes differ");

  const double scale = rng.uniform(cfg.scale_range[0], cfg.scale_range[1]);
  const int sh = std::max(1, static_cast<int>(std::lround(slice.height() * scale)));
  const int sw = std::max(1, static_cast<int>(std::lround(slice.width() * scale)));

  AugmentedPair out;
  out.image = scale == 1.0 ? slice : resize_bilinear(slice, sh, sw);
  out.label = scale == 1.0 ? label : resize_nearest(label, sh, sw);

  const auto [ch, cw] = cfg.crop_size;
  out.image = pad_to(out.image, ch, cw, PadMode::Edge);
  out.label = pad_to(out.label, ch, cw, PadMode::Zero);  // background fill

  const int oy = static_cast<int>(rng.uniform_int(out.image.height() - ch + 1));
  const int ox = static_cast<int>(rng.uniform_int(out.image.width() - cw + 1));
  Image2D ci(ch, cw), cl(ch, cw);
  for (int y = 0; y < ch; ++y)
    for (int x = 0; x < cw; ++x) {
      ci.at(y, x) = out.image.at(oy + y, ox + x);
      cl.at(y, x) = out.label.at(oy + y, ox + x);
    }
  out.image = std::move(ci);
  out.label = std::move(cl);

  if (rng.bernoulli(cfg.flip_probability)) {
    out.image = flip_lr(out.image);
    out.label = flip_lr(out.label);
  }
  if (rng.bernoulli(cfg.blur_probability)) {
    const double sigma = rng.uniform(cfg.blur_sigma_range[0], cfg.blur_sigma_range[1]);
    out.image = gaussian_blur(out.image, sigma);
  }
  return out;
}

}  // namespace styleseg
