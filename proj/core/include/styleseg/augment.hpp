#pragma once

#include "styleseg/rng.hpp"
#include "styleseg/volume.hpp"

namespace styleseg {

struct AugmentationConfig {
  std::array<double, 2> scale_range{0.5, 2.0};
  std::array<int, 2> crop_size{480, 480};
  double flip_probability = 0.5;
  double blur_probability = 0.5;
  std::array<double, 2> blur_sigma_range{0.1, 1.0};

  void validate() const;
};

struct AugmentedPair {
  Image2D image;
  Image2D label;
};

// Random scale, pad-to-crop, random crop, left-right flip, Gaussian blur.
// The geometric transform is shared between image and label (label resampled
// nearest-neighbour); blur touches intensities only.
AugmentedPair augment(const Image2D& slice, const Image2D& label, const AugmentationConfig& cfg,
                      Rng& rng);

// Building blocks, exposed for reuse and tests.
Image2D resize_bilinear(const Image2D& img, int out_h, int out_w);
Image2D resize_nearest(const Image2D& img, int out_h, int out_w);
Image2D flip_lr(const Image2D& img);
Image2D gaussian_blur(const Image2D& img, double sigma);

enum class PadMode { Edge, Zero };
// Pads bottom/right up to (h, w); no-op when already large enough.
Image2D pad_to(const Image2D& img, int h, int w, PadMode mode);

}  // namespace styleseg
