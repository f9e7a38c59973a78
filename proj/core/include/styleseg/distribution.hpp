#pragma once

#include <string>
#include <vector>

#include "styleseg/volume.hpp"

namespace styleseg {

struct Histogram {
  std::vector<double> edges;   // strictly increasing, size bins+1
  std::vector<double> counts;  // size bins, nonnegative

  double total() const;
  void validate(bool allow_empty = false) const;
};

// Empirical 1D intensity distribution as weighted atoms. Both raw samples
// and histograms reduce to this form (histogram mass sits at bin centers).
struct IntensityDistribution {
  std::vector<double> values;   // sorted ascending
  std::vector<double> weights;  // positive, normalized to sum 1
  std::string label_condition = "all";  // all | 0 | 1 | 2
  std::string source_id;

  void validate() const;

  static IntensityDistribution from_samples(std::vector<double> samples,
                                            const std::string& source_id = "",
                                            const std::string& label_condition = "all");
  static IntensityDistribution from_histogram(const Histogram& h,
                                              const std::string& source_id = "",
                                              const std::string& label_condition = "all");
  // Subsamples at most `max_values` voxels (seeded) before building the
  // empirical distribution; avoids bin-width sensitivity entirely.
  static IntensityDistribution from_volume(const Volume& v, std::size_t max_values = 100000,
                                           std::uint64_t seed = 0);
};

// 1-Wasserstein (earth mover) distance between two 1D distributions:
// the integral of |CDF_r - CDF_g|, computed exactly over the merged
// breakpoints of the two step CDFs.
double wasserstein1(const IntensityDistribution& r, const IntensityDistribution& g);

struct DistanceMatrix {
  std::vector<std::string> ids;
  std::vector<double> d;  // row-major n*n, symmetric, zero diagonal

  int size() const { return static_cast<int>(ids.size()); }
  double at(int i, int j) const { return d[static_cast<std::size_t>(i) * ids.size() + j]; }
  double& at(int i, int j) { return d[static_cast<std::size_t>(i) * ids.size() + j]; }
  void validate() const;
};

DistanceMatrix pairwise_distances(const std::vector<IntensityDistribution>& dists,
                                  int workers = 1);

struct LabelConditionedHistograms {
  Histogram overall;
  std::array<Histogram, kNumLabels> per_label;
  std::array<bool, kNumLabels> empty{};  // true when a label has zero voxels
};

// Histograms of v over shared bin edges, overall and per label. Counts of
// the three conditioned histograms partition the overall counts.
LabelConditionedHistograms label_conditioned_histograms(const Volume& v, const LabelVolume& l,
                                                        int bins);

}  // namespace styleseg
