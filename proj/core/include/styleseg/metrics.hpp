#pragma once

#include <map>
#include <string>
#include <vector>

#include "styleseg/volume.hpp"

namespace styleseg {

using Mask3 = Grid3<std::uint8_t>;

// Extracts the binary mask of one label value.
Mask3 mask_for_label(const LabelVolume& l, std::uint8_t label);

// Dice overlap 2|A∩B| / (|A|+|B|); 1 when both masks are empty.
double dice(const Mask3& pred, const Mask3& truth);

struct BoundaryDistances {
  double adb_mm = 0.0;
  double hausdorff_mm = 0.0;
};

// Symmetric boundary distances in mm. Boundary voxels are foreground
// voxels with at least one background face-neighbour (volume border counts
// as background); 26-connectivity is available via `connectivity`.
// Either mask empty -> ValidationError (no silent 0/inf conventions).
BoundaryDistances boundary_distances(const Mask3& pred, const Mask3& truth,
                                     const std::array<double, 3>& spacing,
                                     int connectivity = 6);

struct StructureMetrics {
  double dice = 0.0;
  double adb_mm = 0.0;
  double hausdorff_mm = 0.0;
  std::string structure;  // myocardium | blood_pool
};

inline constexpr double kOverallDiceWeight = 0.5;
inline constexpr double kOverallAdbWeight = -0.25;
inline constexpr double kOverallHausdorffWeight = -0.03;

// Weighted combination over {myocardium, blood_pool}:
// sum of 0.5*Dice - 0.25*ADB - 0.03*Hausdorff.
double overall_score(const std::map<std::string, StructureMetrics>& per_structure);

// One evaluated case (variant x sample).
struct CaseMetrics {
  std::string case_id;
  std::map<std::string, StructureMetrics> per_structure;
  double overall = 0.0;
};

CaseMetrics evaluate_case(const LabelVolume& pred, const LabelVolume& truth,
                          const std::array<double, 3>& spacing, const std::string& case_id,
                          int connectivity = 6);

// Rows of the final report: one block per pipeline variant with
// mean +/- std across cases plus the per-case table.
struct MetricsReport {
  struct VariantBlock {
    std::string variant;
    std::vector<CaseMetrics> cases;
  };
  std::vector<VariantBlock> variants;

  std::string to_csv() const;
};

}  // namespace styleseg
