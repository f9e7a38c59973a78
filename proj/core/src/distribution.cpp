#include "styleseg/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "styleseg/parallel.hpp"
#include "styleseg/rng.hpp"

namespace styleseg {

double Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

void Histogram::validate(bool allow_empty) const {
  if (edges.size() < 2 || counts.size() + 1 != edges.size())
    throw ValidationError("histogram needs bins+1 edges and at least one bin");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1]))
      throw ValidationError("histogram bin edges must be strictly increasing");
  for (double c : counts)
    if (!(c >= 0.0) || !std::isfinite(c))
      throw ValidationError("histogram counts must be finite and >= 0");
  if (!allow_empty && !(total() > 0.0))
    throw ValidationError("histogram counts must sum to > 0");
}

void IntensityDistribution::validate() const {
  if (values.empty()) throw ValidationError("intensity distribution is empty");
  if (values.size() != weights.size())
    throw ValidationError("intensity distribution: values/weights size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw ValidationError("intensity distribution: non-finite value");
    if (!(weights[i] > 0.0)) throw ValidationError("intensity distribution: weights must be > 0");
    if (i > 0 && values[i] < values[i - 1])
      throw ValidationError("intensity distribution: values must be sorted");
    sum += weights[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("intensity distribution: weights must sum to 1");
}

IntensityDistribution IntensityDistribution::from_samples(std::vector<double> samples,
                                                          const std::string& source_id,
                                                          const std::string& label_condition) {
  if (samples.empty()) throw ValidationError("cannot build a distribution from zero samples");
  std::sort(samples.begin(), samples.end());
  IntensityDistribution d;
  const double w = 1.0 / static_cast<double>(samples.size());
  d.values = std::move(samples);
  d.weights.assign(d.values.size(), w);
  d.source_id = source_id;
  d.label_condition = label_condition;
  d.validate();
  return d;
}

IntensityDistribution IntensityDistribution::from_histogram(const Histogram& h,
                                                            const std::string& source_id,
                                                            const std::string& label_condition) {
  h.validate();
  IntensityDistribution d;
  const double total = h.total();
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    if (h.counts[b] <= 0.0) continue;
    d.values.push_back(0.5 * (h.edges[b] + h.edges[b + 1]));
    d.weights.push_back(h.counts[b] / total);
  }
  d.source_id = source_id;
  d.label_condition = label_condition;
  d.validate();
  return d;
}

IntensityDistribution IntensityDistribution::from_volume(const Volume& v, std::size_t max_values,
                                                         std::uint64_t seed) {
  v.validate();
  const auto& raw = v.data.raw();
  std::vector<double> samples;
  if (raw.size() <= max_values) {
    samples = raw;
  } else {
    Rng rng = Rng(seed).fork("distribution/" + v.id);
    samples.reserve(max_values);
    for (std::size_t i = 0; i < max_values; ++i)
      samples.push_back(raw[rng.uniform_int(raw.size())]);
  }
  return from_samples(std::move(samples), v.id);
}

double wasserstein1(const IntensityDistribution& r, const IntensityDistribution& g) {
  r.validate();
  g.validate();
  // Walk the merged breakpoints of the two step CDFs, accumulating
  // |F_r - F_g| times the gap to the next breakpoint.
  std::size_t i = 0, j = 0;
  double cdf_r = 0.0, cdf_g = 0.0;
  double prev = std::min(r.values.front(), g.values.front());
  double dist = 0.0;
  while (i < r.values.size() || j < g.values.size()) {
    double x;
    if (j >= g.values.size() || (i < r.values.size() && r.values[i] <= g.values[j]))
      x = r.values[i];
    else
      x = g.values[j];
    dist += std::abs(cdf_r - cdf_g) * (x - prev);
    while (i < r.values.size() && r.values[i] == x) cdf_r += r.weights[i++];
    while (j < g.values.size() && g.values[j] == x) cdf_g += g.weights[j++];
    prev = x;
  }
  return dist;
}

void DistanceMatrix::validate() const {
  const int n = size();
  if (static_cast<std::size_t>(n) * n != d.size())
    throw ValidationError("distance matrix storage does not match id count");
  for (int i = 0; i < n; ++i) {
    if (at(i, i) != 0.0) throw ValidationError("distance matrix diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(at(i, j)) || at(i, j) < 0.0)
        throw ValidationError("distance matrix entries must be finite and >= 0");
      if (at(i, j) != at(j, i)) throw ValidationError("distance matrix must be symmetric");
    }
  }
}

DistanceMatrix pairwise_distances(const std::vector<IntensityDistribution>& dists, int workers) {
  if (dists.size() < 2)
    throw ValidationError("pairwise distances need at least 2 distributions");
  const int n = static_cast<int>(dists.size());
  DistanceMatrix m;
  m.ids.reserve(n);
  for (const auto& d : dists) m.ids.push_back(d.source_id);
  m.d.assign(static_cast<std::size_t>(n) * n, 0.0);

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  parallel_for(pairs.size(), workers, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const double w = wasserstein1(dists[i], dists[j]);
    m.at(i, j) = w;
    m.at(j, i) = w;
  });
  m.validate();
  return m;
}

LabelConditionedHistograms label_conditioned_histograms(const Volume& v, const LabelVolume& l,
                                                        int bins) {
  v.validate();
  l.validate(&v);
  if (bins < 1) throw ValidationError("histogram needs at least one bin");

  const auto& raw = v.data.raw();
  double lo = *std::min_element(raw.begin(), raw.end());
  double hi = *std::max_element(raw.begin(), raw.end());
  if (lo == hi) hi = lo + 1.0;  // degenerate constant volume

  LabelConditionedHistograms out;
  std::vector<double> edges(bins + 1);
  for (int b = 0; b <= bins; ++b) edges[b] = lo + (hi - lo) * b / bins;
  out.overall.edges = edges;
  out.overall.counts.assign(bins, 0.0);
  for (auto& h : out.per_label) {
    h.edges = edges;
    h.counts.assign(bins, 0.0);
  }

  for (std::size_t i = 0; i < raw.size(); ++i) {
    int b = static_cast<int>((raw[i] - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    out.overall.counts[b] += 1.0;
    out.per_label[l.data.raw()[i]].counts[b] += 1.0;
  }
  for (int k = 0; k < kNumLabels; ++k) out.empty[k] = out.per_label[k].total() == 0.0;
  return out;
}

}  // namespace styleseg
