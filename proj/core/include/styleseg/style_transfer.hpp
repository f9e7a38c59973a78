#pragma once

#include <compare>
#include <map>
#include <vector>

#include "styleseg/clustering.hpp"
#include "styleseg/extractor.hpp"

namespace styleseg {

// Channel-channel inner products of one feature map, normalized by C*H*W.
// Symmetric positive semidefinite by construction.
struct GramMatrix {
  int channels = 0;
  std::vector<double> m;  // row-major channels x channels

  double at(int i, int k) const { return m[static_cast<std::size_t>(i) * channels + k]; }
};

GramMatrix gram(const nn::Tensor& feature_map);

struct TransferConfig {
  double content_weight = 1.0;  // on the feature-reconstruction term
  double style_weight = 1e6;    // on the Gram term
  int epochs = 50;
  double step_size = 2e-4;
  void validate() const;
};

// Feature-reconstruction loss: sum over taps of the squared L2 distance of
// the feature maps, each normalized by C*H*W.
double content_loss(const Image2D& generated, const Image2D& content, nn::FeatureExtractor& fx);

// Gram loss: sum over taps of the squared Frobenius distance of the
// normalized Gram matrices. Input sizes may differ.
double style_loss(const Image2D& generated, const Image2D& style_target,
                  nn::FeatureExtractor& fx);

struct TransferResult {
  Image2D image;
  std::vector<double> trace;  // total loss at the start of each epoch
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double final_content = 0.0;
  double final_style = 0.0;
};

// Gradient descent on the pixels of the generated image, starting from the
// content image, minimizing content_weight*content + style_weight*style.
// The output is clamped to the content image's observed [min, max].
TransferResult transfer(const Image2D& content, const Image2D& style_target,
                        nn::FeatureExtractor& fx, const TransferConfig& cfg);

// ------------------------------------------------------- target selection

struct SliceRef {
  std::string sample_id;
  Plane plane = Plane::XY;
  int index = 0;

  auto operator<=>(const SliceRef&) const = default;
};

// Shares of the three labels within a slice; components in [0,1], sum 1.
using LabelFractions = std::array<double, 3>;

void validate_fractions(const LabelFractions& f);

// Fractions from a label slice (values 0/1/2 stored as doubles).
LabelFractions label_fractions(const Image2D& label_slice);

// Nearest library slice by Euclidean distance between label-fraction
// vectors; ties break by (sample id, plane, slice index).
SliceRef select_style_target(const LabelFractions& test_fractions, const StyleLibrary& library,
                             const std::map<SliceRef, LabelFractions>& library_fractions);

}  // namespace styleseg
