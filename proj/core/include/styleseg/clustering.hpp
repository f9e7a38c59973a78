#pragma once

#include <map>
#include <string>
#include <vector>

#include "styleseg/distribution.hpp"

namespace styleseg {

enum class Linkage { Average, Complete, Single };

Linkage linkage_from_name(const std::string& name);
const char* linkage_name(Linkage l);

// Agglomerative merge sequence. Cluster indices follow the usual
// convention: leaves are 0..n-1, the i-th merge creates cluster n+i.
struct Dendrogram {
  struct Merge {
    int a = 0;
    int b = 0;
    double height = 0.0;
  };
  std::vector<Merge> merges;
  std::vector<std::string> leaf_ids;

  void validate() const;
};

// Deterministic agglomeration: among minimal-distance pairs the
// lexicographically smallest (a, b) index pair merges first.
Dendrogram hierarchical_cluster(const DistanceMatrix& m, Linkage linkage = Linkage::Average);

// Flat assignment from cutting the dendrogram at k clusters. Cluster ids
// are renumbered 0..k-1 by each cluster's smallest leaf index.
std::vector<int> cut_dendrogram(const Dendrogram& dend, int k);

struct StyleLibrary {
  std::vector<std::string> member_ids;  // training samples only
  // Per-member slice inventory, filled by the pipeline once shapes are known.
  std::map<std::string, std::vector<std::pair<Plane, int>>> slices;
};

// Selects the training-only cluster at the k-cut as the style library.
// With several candidates the largest wins (ties: farthest from the test
// cluster by average inter-cluster distance, then smallest leaf index).
StyleLibrary build_style_library(const Dendrogram& dend, int k,
                                 const std::vector<std::string>& train_ids,
                                 const std::vector<std::string>& test_ids,
                                 const DistanceMatrix& m);

}  // namespace styleseg
