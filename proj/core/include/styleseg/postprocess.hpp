#pragma once

#include <map>
#include <optional>
#include <string>

#include "styleseg/volume.hpp"

namespace styleseg {

struct AdjustedLabelMap {
  Grid3<std::uint8_t> labels;
  // Retained only under the diagnostics flag.
  std::optional<std::array<Grid3<double>, kNumLabels>> scores;
  std::string plane = "xy";          // xy | yz | zx | sum
  std::string variant = "original";  // original | transferred
  std::string source_id;
};

// Rescores each channel by the product of the other channels' non-membership
// probabilities: score_k = p_k * prod_{j!=k} (1 - softmax(p)_j), then takes
// the per-voxel argmax. Ties break toward background, then lower label.
AdjustedLabelMap adjust(const LogitsVolume& logits, bool keep_scores = false);

// Voxelwise channelwise sum of the three per-plane score volumes,
// tagged plane="sum".
LogitsVolume sum_plane_logits(const LogitsVolume& xy, const LogitsVolume& yz,
                              const LogitsVolume& zx);

// The eight (plane, variant) vote inputs: {xy,yz,zx,sum} x {original,transferred}.
struct EnsembleInput {
  std::map<std::pair<std::string, std::string>, AdjustedLabelMap> maps;

  void insert(AdjustedLabelMap map);
  void validate() const;
  static const std::array<std::pair<std::string, std::string>, 8>& expected_tags();
};

// Plurality vote per voxel over the eight label maps. Ties resolve by the
// (sum, original) vote, then (sum, transferred), then background.
LabelVolume vote(const EnsembleInput& inputs);

}  // namespace styleseg
