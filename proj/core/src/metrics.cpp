#include "styleseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace styleseg {

Mask3 mask_for_label(const LabelVolume& l, std::uint8_t label) {
  Mask3 m(l.data.nx(), l.data.ny(), l.data.nz(), 0);
  for (std::size_t i = 0; i < m.size(); ++i)
    m.raw()[i] = l.data.raw()[i] == label ? 1 : 0;
  return m;
}

double dice(const Mask3& pred, const Mask3& truth) {
  if (!pred.same_shape(truth))
    throw ValidationError("dice: mask shapes " + shape_to_string(pred.shape()) + " vs " +
                          shape_to_string(truth.shape()) + " differ");
  std::size_t a = 0, b = 0, inter = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool pa = pred.raw()[i] != 0;
    const bool pb = truth.raw()[i] != 0;
    a += pa;
    b += pb;
    inter += pa && pb;
  }
  if (a + b == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(a + b);
}

namespace {

struct Point3 {
  double x, y, z;
};

std::vector<Point3> boundary_points(const Mask3& m, const std::array<double, 3>& spacing,
                                    int connectivity) {
  std::vector<Point3> pts;
  const int nx = m.nx(), ny = m.ny(), nz = m.nz();
  auto bg = [&](int x, int y, int z) {
    if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) return true;
    return m.at(x, y, z) == 0;
  };
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        if (m.at(x, y, z) == 0) continue;
        bool boundary = false;
        if (connectivity == 6) {
          boundary = bg(x - 1, y, z) || bg(x + 1, y, z) || bg(x, y - 1, z) ||
                     bg(x, y + 1, z) || bg(x, y, z - 1) || bg(x, y, z + 1);
        } else {
          for (int dz = -1; dz <= 1 && !boundary; ++dz)
            for (int dy = -1; dy <= 1 && !boundary; ++dy)
              for (int dx = -1; dx <= 1 && !boundary; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                boundary = bg(x + dx, y + dy, z + dz);
              }
        }
        if (boundary) pts.push_back({x * spacing[0], y * spacing[1], z * spacing[2]});
      }
  return pts;
}

// Minimal 3D kd-tree for exact nearest-neighbour queries.
class KdTree3 {
public:
  explicit KdTree3(std::vector<Point3> pts) : pts_(std::move(pts)) {
    idx_.resize(pts_.size());
    std::iota(idx_.begin(), idx_.end(), 0);
    build(0, static_cast<int>(idx_.size()), 0);
  }

  double nearest_sq(const Point3& q) const {
    double best = std::numeric_limits<double>::infinity();
    search(q, 0, static_cast<int>(idx_.size()), 0, best);
    return best;
  }

private:
  static double coord(const Point3& p, int axis) {
    return axis == 0 ? p.x : axis == 1 ? p.y : p.z;
  }
  static double dist_sq(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
  }

  void build(int lo, int hi, int depth) {
    if (hi - lo <= 1) return;
    const int axis = depth % 3;
    const int mid = (lo + hi) / 2;
    std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                     [&](int a, int b) { return coord(pts_[a], axis) < coord(pts_[b], axis); });
    build(lo, mid, depth + 1);
    build(mid + 1, hi, depth + 1);
  }

  void search(const Point3& q, int lo, int hi, int depth, double& best) const {
    if (hi <= lo) return;
    const int axis = depth % 3;
    const int mid = (lo + hi) / 2;
    const Point3& p = pts_[idx_[mid]];
    best = std::min(best, dist_sq(q, p));
    const double delta = coord(q, axis) - coord(p, axis);
    const int near_lo = delta < 0 ? lo : mid + 1;
    const int near_hi = delta < 0 ? mid : hi;
    const int far_lo = delta < 0 ? mid + 1 : lo;
    const int far_hi = delta < 0 ? hi : mid;
    search(q, near_lo, near_hi, depth + 1, best);
    if (delta * delta < best) search(q, far_lo, far_hi, depth + 1, best);
  }

  std::vector<Point3> pts_;
  std::vector<int> idx_;
};

struct Directed {
  double mean;
  double max;
};

Directed directed_distances(const std::vector<Point3>& from, const KdTree3& to) {
  double sum = 0.0, mx = 0.0;
  for (const auto& p : from) {
    const double d = std::sqrt(to.nearest_sq(p));
    sum += d;
    mx = std::max(mx, d);
  }
  return {sum / static_cast<double>(from.size()), mx};
}

}  // namespace

BoundaryDistances boundary_distances(const Mask3& pred, const Mask3& truth,
                                     const std::array<double, 3>& spacing, int connectivity) {
  if (!pred.same_shape(truth))
    throw ValidationError("boundary distances: mask shapes differ");
  if (connectivity != 6 && connectivity != 26)
    throw ValidationError("boundary connectivity must be 6 or 26");
  for (double s : spacing)
    if (!(s > 0.0)) throw ValidationError("boundary distances: spacing must be > 0");

  const auto bp = boundary_points(pred, spacing, connectivity);
  const auto bt = boundary_points(truth, spacing, connectivity);
  if (bp.empty() || bt.empty())
    throw ValidationError(std::string("boundary distances undefined: ") +
                          (bp.empty() ? "prediction" : "truth") + " mask has no foreground");

  KdTree3 tree_p(bp), tree_t(bt);
  const Directed p2t = directed_distances(bp, tree_t);
  const Directed t2p = directed_distances(bt, tree_p);
  BoundaryDistances out;
  out.adb_mm = 0.5 * (p2t.mean + t2p.mean);
  out.hausdorff_mm = std::max(p2t.max, t2p.max);
  return out;
}

double overall_score(const std::map<std::string, StructureMetrics>& per_structure) {
  for (const char* s : {"myocardium", "blood_pool"})
    if (!per_structure.count(s))
      throw ValidationError(std::string("overall score: missing structure '") + s + "'");
  double score = 0.0;
  for (const auto& [name, sm] : per_structure)
    score += kOverallDiceWeight * sm.dice + kOverallAdbWeight * sm.adb_mm +
             kOverallHausdorffWeight * sm.hausdorff_mm;
  return score;
}

CaseMetrics evaluate_case(const LabelVolume& pred, const LabelVolume& truth,
                          const std::array<double, 3>& spacing, const std::string& case_id,
                          int connectivity) {
  truth.validate();
  pred.validate();
  if (!pred.data.same_shape(truth.data))
    throw ValidationError("evaluate: prediction and truth shapes differ for " + case_id);
  CaseMetrics cm;
  cm.case_id = case_id;
  const std::pair<std::string, std::uint8_t> structures[] = {{"myocardium", kMyocardium},
                                                             {"blood_pool", kBloodPool}};
  for (const auto& [name, label] : structures) {
    StructureMetrics sm;
    sm.structure = name;
    const Mask3 mp = mask_for_label(pred, label);
    const Mask3 mt = mask_for_label(truth, label);
    sm.dice = dice(mp, mt);
    const auto bd = boundary_distances(mp, mt, spacing, connectivity);
    sm.adb_mm = bd.adb_mm;
    sm.hausdorff_mm = bd.hausdorff_mm;
    cm.per_structure[name] = sm;
  }
  cm.overall = overall_score(cm.per_structure);
  return cm;
}

namespace {

struct MeanStd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd ms;
  if (xs.empty()) return ms;
  ms.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - ms.mean) * (x - ms.mean);
  ms.sd = xs.size() > 1 ? std::sqrt(var / xs.size()) : 0.0;
  return ms;
}

}  // namespace

std::string MetricsReport::to_csv() const {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  os << "variant,case,myocardium_dice,myocardium_adb_mm,myocardium_hausdorff_mm,"
        "blood_pool_dice,blood_pool_adb_mm,blood_pool_hausdorff_mm,overall\n";
  for (const auto& vb : variants) {
    std::vector<double> md, ma, mh, bd, ba, bh, ov;
    for (const auto& c : vb.cases) {
      const auto& m = c.per_structure.at("myocardium");
      const auto& b = c.per_structure.at("blood_pool");
      os << vb.variant << "," << c.case_id << "," << m.dice << "," << m.adb_mm << ","
         << m.hausdorff_mm << "," << b.dice << "," << b.adb_mm << "," << b.hausdorff_mm << ","
         << c.overall << "\n";
      md.push_back(m.dice);
      ma.push_back(m.adb_mm);
      mh.push_back(m.hausdorff_mm);
      bd.push_back(b.dice);
      ba.push_back(b.adb_mm);
      bh.push_back(b.hausdorff_mm);
      ov.push_back(c.overall);
    }
    os << vb.variant << ",mean";
    for (const auto& xs : {md, ma, mh, bd, ba, bh, ov}) os << "," << mean_std(xs).mean;
    os << "\n" << vb.variant << ",std";
    for (const auto& xs : {md, ma, mh, bd, ba, bh, ov}) os << "," << mean_std(xs).sd;
    os << "\n";
  }
  return os.str();
}

}  // namespace styleseg
