#include "styleseg/postprocess.hpp"

#include <algorithm>
#include <cmath>

namespace styleseg {

AdjustedLabelMap adjust(const LogitsVolume& logits, bool keep_scores) {
  logits.validate();
  const auto [nx, ny, nz] = logits.shape();
  AdjustedLabelMap out;
  out.labels = Grid3<std::uint8_t>(nx, ny, nz, 0);
  out.plane = logits.plane;
  out.variant = logits.variant;
  out.source_id = logits.source_id;
  if (keep_scores)
    out.scores = std::array<Grid3<double>, kNumLabels>{
        Grid3<double>(nx, ny, nz), Grid3<double>(nx, ny, nz), Grid3<double>(nx, ny, nz)};

  const std::size_t n = logits.channels[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    const double p0 = logits.channels[0].raw()[i];
    const double p1 = logits.channels[1].raw()[i];
    const double p2 = logits.channels[2].raw()[i];
    const double m = std::max({p0, p1, p2});
    const double e0 = std::exp(p0 - m), e1 = std::exp(p1 - m), e2 = std::exp(p2 - m);
    const double denom = e0 + e1 + e2;
    const double s0 = e0 / denom, s1 = e1 / denom, s2 = e2 / denom;
    const double score[3] = {p0 * (1.0 - s1) * (1.0 - s2), p1 * (1.0 - s0) * (1.0 - s2),
                             p2 * (1.0 - s0) * (1.0 - s1)};
    int best = 0;
    for (int k = 1; k < kNumLabels; ++k)
      if (score[k] > score[best]) best = k;
    out.labels.raw()[i] = static_cast<std::uint8_t>(best);
    if (out.scores)
      for (int k = 0; k < kNumLabels; ++k) (*out.scores)[k].raw()[i] = score[k];
  }
  return out;
}

LogitsVolume sum_plane_logits(const LogitsVolume& xy, const LogitsVolume& yz,
                              const LogitsVolume& zx) {
  for (const auto* lv : {&xy, &yz, &zx}) lv->validate();
  if (xy.shape() != yz.shape() || xy.shape() != zx.shape())
    throw ValidationError("sum_plane_logits: plane volumes must share one shape, got " +
                          shape_to_string(xy.shape()) + ", " + shape_to_string(yz.shape()) +
                          ", " + shape_to_string(zx.shape()));
  LogitsVolume out;
  out.plane = "sum";
  out.variant = xy.variant;
  out.source_id = xy.source_id;
  for (int c = 0; c < kNumLabels; ++c) {
    out.channels[c] = xy.channels[c];
    auto& dst = out.channels[c].raw();
    const auto& a = yz.channels[c].raw();
    const auto& b = zx.channels[c].raw();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += a[i] + b[i];
  }
  return out;
}

const std::array<std::pair<std::string, std::string>, 8>& EnsembleInput::expected_tags() {
  static const std::array<std::pair<std::string, std::string>, 8> tags = {{
      {"xy", "original"},
      {"yz", "original"},
      {"zx", "original"},
      {"sum", "original"},
      {"xy", "transferred"},
      {"yz", "transferred"},
      {"zx", "transferred"},
      {"sum", "transferred"},
  }};
  return tags;
}

void EnsembleInput::insert(AdjustedLabelMap map) {
  maps[{map.plane, map.variant}] = std::move(map);
}

void EnsembleInput::validate() const {
  std::string missing;
  for (const auto& tag : expected_tags())
    if (!maps.count(tag)) missing += " (" + tag.first + "," + tag.second + ")";
  if (!missing.empty())
    throw ValidationError("ensemble vote requires all 8 label maps; missing:" + missing);
  if (maps.size() != 8)
    throw ValidationError("ensemble vote requires exactly the 8 tagged label maps, got " +
                          std::to_string(maps.size()));
  const auto& first = maps.begin()->second.labels;
  for (const auto& [tag, m] : maps)
    if (!m.labels.same_shape(first))
      throw ValidationError("ensemble vote: label map (" + tag.first + "," + tag.second +
                            ") shape differs");
}

LabelVolume vote(const EnsembleInput& inputs) {
  inputs.validate();
  const auto& first = inputs.maps.begin()->second;
  LabelVolume out;
  out.data = Grid3<std::uint8_t>(first.labels.nx(), first.labels.ny(), first.labels.nz(), 0);
  out.id = first.source_id;

  std::array<const AdjustedLabelMap*, 8> maps{};
  for (std::size_t t = 0; t < 8; ++t)
    maps[t] = &inputs.maps.at(EnsembleInput::expected_tags()[t]);
  const AdjustedLabelMap* sum_original = maps[3];
  const AdjustedLabelMap* sum_transferred = maps[7];

  for (std::size_t i = 0; i < out.data.size(); ++i) {
    int counts[kNumLabels] = {0, 0, 0};
    for (const auto* m : maps) ++counts[m->labels.raw()[i]];
    int best = 0;
    for (int k = 1; k < kNumLabels; ++k)
      if (counts[k] > counts[best]) best = k;
    // Plurality ties: follow (sum, original), then (sum, transferred),
    // then background.
    const bool tie = (counts[0] == counts[best]) + (counts[1] == counts[best]) +
                         (counts[2] == counts[best]) > 1;
    if (tie) {
      const int so = sum_original->labels.raw()[i];
      const int st = sum_transferred->labels.raw()[i];
      if (counts[so] == counts[best])
        best = so;
      else if (counts[st] == counts[best])
        best = st;
      else
        best = kBackground;
    }
    out.data.raw()[i] = static_cast<std::uint8_t>(best);
  }
  return out;
}

}  // namespace styleseg
