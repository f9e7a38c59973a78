#include "styleseg/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

namespace styleseg {

Linkage linkage_from_name(const std::string& name) {
  if (name == "average") return Linkage::Average;
  if (name == "complete") return Linkage::Complete;
  if (name == "single") return Linkage::Single;
  throw ValidationError("unknown linkage '" + name + "' (expected average, complete or single)");
}

const char* linkage_name(Linkage l) {
  switch (l) {
    case Linkage::Average: return "average";
    case Linkage::Complete: return "complete";
    case Linkage::Single: return "single";
  }
  return "?";
}

void Dendrogram::validate() const {
  const int n = static_cast<int>(leaf_ids.size());
  if (static_cast<int>(merges.size()) != n - 1)
    throw ValidationError("dendrogram must contain exactly n-1 merges");
  for (std::size_t i = 1; i < merges.size(); ++i)
    if (merges[i].height < merges[i - 1].height - 1e-12)
      throw ValidationError("dendrogram merge heights must be nondecreasing");
}

Dendrogram hierarchical_cluster(const DistanceMatrix& m, Linkage linkage) {
  m.validate();
  const int n = m.size();
  if (n < 2) throw ValidationError("clustering needs at least 2 samples");

  // Active clusters keyed by their index; Lance-Williams updates on a
  // dense map of pairwise distances.
  struct Cluster {
    int index;
    int size;
  };
  std::vector<Cluster> active;
  for (int i = 0; i < n; ++i) active.push_back({i, 1});
  std::map<std::pair<int, int>, double> dist;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) dist[{i, j}] = m.at(i, j);

  auto get = [&](int a, int b) { return dist.at({std::min(a, b), std::max(a, b)}); };

  Dendrogram dend;
  dend.leaf_ids = m.ids;
  int next_index = n;
  while (active.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> best_pair{-1, -1};
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const int a = std::min(active[i].index, active[j].index);
        const int b = std::max(active[i].index, active[j].index);
        const double d = get(a, b);
        if (d < best || (d == best && std::pair(a, b) < best_pair)) {
          best = d;
          best_pair = {a, b};
        }
      }
    }
    const auto [a, b] = best_pair;
    const auto it_a = std::find_if(active.begin(), active.end(),
                                   [&](const Cluster& c) { return c.index == a; });
    const int size_a = it_a->size;
    const auto it_b = std::find_if(active.begin(), active.end(),
                                   [&](const Cluster& c) { return c.index == b; });
    const int size_b = it_b->size;

    for (const auto& c : active) {
      if (c.index == a || c.index == b) continue;
      const double da = get(c.index, a);
      const double db = get(c.index, b);
      double d = 0.0;
      switch (linkage) {
        case Linkage::Single: d = std::min(da, db); break;
        case Linkage::Complete: d = std::max(da, db); break;
        case Linkage::Average: d = (size_a * da + size_b * db) / (size_a + size_b); break;
      }
      dist[{std::min(c.index, next_index), std::max(c.index, next_index)}] = d;
    }
    active.erase(std::remove_if(active.begin(), active.end(),
                                [&](const Cluster& c) { return c.index == a || c.index == b; }),
                 active.end());
    active.push_back({next_index, size_a + size_b});
    dend.merges.push_back({a, b, best});
    ++next_index;
  }
  dend.validate();
  return dend;
}

namespace {

// Leaf sets of the clusters remaining after n-k merges.
std::vector<std::vector<int>> clusters_at_cut(const Dendrogram& dend, int k) {
  const int n = static_cast<int>(dend.leaf_ids.size());
  if (k < 1 || k > n)
    throw ValidationError("cut requires 1 <= k <= number of leaves (" + std::to_string(n) + ")");
  std::map<int, std::vector<int>> members;
  for (int i = 0; i < n; ++i) members[i] = {i};
  for (int step = 0; step < n - k; ++step) {
    const auto& mg = dend.merges[step];
    std::vector<int> merged = std::move(members.at(mg.a));
    auto& mb = members.at(mg.b);
    merged.insert(merged.end(), mb.begin(), mb.end());
    std::sort(merged.begin(), merged.end());
    members.erase(mg.a);
    members.erase(mg.b);
    members[n + step] = std::move(merged);
  }
  std::vector<std::vector<int>> out;
  out.reserve(members.size());
  for (auto& [idx, leaves] : members) out.push_back(std::move(leaves));
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return out;
}

}  // namespace

std::vector<int> cut_dendrogram(const Dendrogram& dend, int k) {
  dend.validate();
  const auto clusters = clusters_at_cut(dend, k);
  std::vector<int> assign(dend.leaf_ids.size(), -1);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (int leaf : clusters[c]) assign[leaf] = static_cast<int>(c);
  return assign;
}

StyleLibrary build_style_library(const Dendrogram& dend, int k,
                                 const std::vector<std::string>& train_ids,
                                 const std::vector<std::string>& test_ids,
                                 const DistanceMatrix& m) {
  dend.validate();
  const std::set<std::string> train(train_ids.begin(), train_ids.end());
  const std::set<std::string> test(test_ids.begin(), test_ids.end());
  const auto clusters = clusters_at_cut(dend, k);

  // Locate the cluster holding the majority of test samples.
  int test_cluster = -1;
  std::size_t best_test_count = 0;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    std::size_t count = 0;
    for (int leaf : clusters[c])
      if (test.count(dend.leaf_ids[leaf])) ++count;
    if (count > best_test_count) {
      best_test_count = count;
      test_cluster = static_cast<int>(c);
    }
  }
  if (test_cluster < 0)
    throw ValidationError("style library construction: no test samples among the leaves");

  auto avg_dist_to_test = [&](const std::vector<int>& leaves) {
    double sum = 0.0;
    std::size_t cnt = 0;
    for (int i : leaves)
      for (int j : clusters[test_cluster]) {
        sum += m.at(i, j);
        ++cnt;
      }
    return cnt ? sum / cnt : 0.0;
  };

  int chosen = -1;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (static_cast<int>(c) == test_cluster) continue;
    bool has_train = false, has_test = false;
    for (int leaf : clusters[c]) {
      const auto& id = dend.leaf_ids[leaf];
      has_train |= train.count(id) > 0;
      has_test |= test.count(id) > 0;
    }
    if (!has_train || has_test) continue;
    if (chosen < 0) {
      chosen = static_cast<int>(c);
      continue;
    }
    const auto& cur = clusters[chosen];
    const auto& cand = clusters[c];
    if (cand.size() > cur.size() ||
        (cand.size() == cur.size() && avg_dist_to_test(cand) > avg_dist_to_test(cur)))
      chosen = static_cast<int>(c);
  }
  if (chosen < 0)
    throw ValidationError(
        "style library construction: no training-only cluster at k=" + std::to_string(k) +
        "; try a different cluster count");

  StyleLibrary lib;
  for (int leaf : clusters[chosen]) {
    const auto& id = dend.leaf_ids[leaf];
    if (train.count(id)) lib.member_ids.push_back(id);
  }
  std::sort(lib.member_ids.begin(), lib.member_ids.end());
  return lib;
}

}  // namespace styleseg
