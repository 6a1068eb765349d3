#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hifie/grid.hpp"

namespace hifie {

enum class ClusterKind : std::uint8_t { cell = 0, edge = 1, face = 2 };

inline const char* cluster_kind_name(ClusterKind k) {
  switch (k) {
    case ClusterKind::cell: return "cell";
    case ClusterKind::edge: return "edge";
    default: return "face";
  }
}

/// Disjoint ordered set of active DOFs grouped around a center. Centers and
/// widths are kept both as doubles and in exact half-step integer units so
/// that all geometric predicates are evaluated without rounding.
struct Cluster {
  std::vector<int> indices;
  std::array<double, 3> center{0, 0, 0};
  double width = 0;
  ClusterKind kind = ClusterKind::cell;
  std::array<long long, 3> icenter{0, 0, 0};  // center * 2n
  long long iwidth = 0;                       // width * 2n
};

/// Level tag: whole + num/den, e.g. 2, 2+1/2, 2+1/3, 2+2/3.
struct LevelTag {
  int whole = 0;
  int num = 0;
  int den = 1;

  double value() const { return whole + double(num) / den; }
  bool fractional() const { return num != 0; }
  std::string label() const {
    if (num == 0) return std::to_string(whole);
    return std::to_string(whole) + "+" + std::to_string(num) + "/" + std::to_string(den);
  }
  friend bool operator==(const LevelTag& a, const LevelTag& b) {
    return a.whole == b.whole && a.num == b.num && a.den == b.den;
  }
};

struct PlanLevel {
  LevelTag tag;
  ClusterKind kind = ClusterKind::cell;
};

enum class PlanKind : std::uint8_t { cells_only = 0, interleaved = 1 };

/// Ordered list of skeletonization passes from finest to coarsest. Cluster
/// collections are produced per pass from the active set via the partition
/// functions below.
struct LevelPlan {
  GridSpec spec;
  std::vector<PlanLevel> levels;
};

/// cells_only: one cell pass per integer level. interleaved (2D): cell then
/// edge passes; (3D): cell, face, edge. The skip list removes fractional
/// passes by their 0-based ordinal among fractional passes.
inline LevelPlan build_level_plan(const GridSpec& spec, PlanKind kind,
                                  const std::vector<int>& skip = {}) {
  LevelPlan plan;
  plan.spec = spec;
  std::vector<PlanLevel> full;
  for (int l = 0; l < spec.depth; ++l) {
    full.push_back({LevelTag{l, 0, 1}, ClusterKind::cell});
    if (kind == PlanKind::interleaved) {
      if (spec.dim == 2) {
        full.push_back({LevelTag{l, 1, 2}, ClusterKind::edge});
      } else {
        full.push_back({LevelTag{l, 1, 3}, ClusterKind::face});
        full.push_back({LevelTag{l, 2, 3}, ClusterKind::edge});
      }
    }
  }
  int fractional_ordinal = 0;
  for (const auto& lvl : full) {
    if (lvl.tag.fractional()) {
      const bool skipped =
          std::find(skip.begin(), skip.end(), fractional_ordinal) != skip.end();
      ++fractional_ordinal;
      if (skipped) continue;
    }
    plan.levels.push_back(lvl);
  }
  return plan;
}

namespace detail {

struct CenterFamily {
  // Per-axis center form: coordinate = unit*t - (half ? unit/2 : 0),
  // with t in [1, tmax]. All values in half-step units.
  std::array<bool, 3> half{false, false, false};
  std::array<long long, 3> tmax{1, 1, 1};
};

inline void collect_cluster(std::map<std::array<long long, 3>, std::vector<int>>& groups,
                            const std::array<long long, 3>& key, int dof) {
  groups[key].push_back(dof);
}

inline std::vector<Cluster> finalize_clusters(
    std::map<std::array<long long, 3>, std::vector<int>>& groups, const GridSpec& spec,
    long long iwidth, ClusterKind kind) {
  std::vector<Cluster> out;
  out.reserve(groups.size());
  const double scale = 1.0 / (2.0 * spec.n);
  for (auto& [key, idx] : groups) {
    Cluster c;
    c.indices = std::move(idx);
    c.icenter = key;
    c.iwidth = iwidth;
    c.width = double(iwidth) * scale;
    for (int a = 0; a < spec.dim; ++a) c.center[a] = double(key[a]) * scale;
    c.kind = kind;
    out.push_back(std::move(c));
  }
  return out;
}

/// Nearest center of one family to the point p (half-units), exact integer
/// arithmetic; ties resolved toward the lexicographically smallest center.
inline std::array<long long, 3> nearest_in_family(const std::array<long long, 3>& p, int dim,
                                                  long long unit, const CenterFamily& fam) {
  std::array<std::array<long long, 2>, 3> cand{};
  std::array<int, 3> ncand{};
  for (int a = 0; a < dim; ++a) {
    const long long off = fam.half[a] ? unit / 2 : 0;
    // candidate t: floor/ceil of (p + off) / unit, clamped to [1, tmax]
    const long long q = p[a] + off;
    long long t0 = q / unit;  // q > 0 always
    long long t1 = t0 + 1;
    t0 = std::clamp(t0, 1LL, fam.tmax[a]);
    t1 = std::clamp(t1, 1LL, fam.tmax[a]);
    cand[a][0] = unit * t0 - off;
    ncand[a] = 1;
    if (t1 != t0) {
      cand[a][1] = unit * t1 - off;
      ncand[a] = 2;
    }
  }
  std::array<long long, 3> best{0, 0, 0};
  long long best_d2 = -1;
  std::array<int, 3> pick{0, 0, 0};
  for (pick[0] = 0; pick[0] < ncand[0]; ++pick[0])
    for (pick[1] = 0; pick[1] < ncand[1]; ++pick[1])
      for (pick[2] = 0; pick[2] < (dim == 3 ? ncand[2] : 1); ++pick[2]) {
        std::array<long long, 3> c{0, 0, 0};
        long long d2 = 0;
        for (int a = 0; a < dim; ++a) {
          c[a] = cand[a][pick[a]];
          const long long d = p[a] - c[a];
          d2 += d * d;
        }
        if (best_d2 < 0 || d2 < best_d2 || (d2 == best_d2 && c < best)) {
          best_d2 = d2;
          best = c;
        }
      }
  return best;
}

}  // namespace detail

/// Voronoi cells of width 2^l * m * h; exact binning by grid index.
inline std::vector<Cluster> cell_partition(const PointSet& points, const GridSpec& spec, int level,
                                           const std::vector<int>& active) {
  if (level < 0 || level >= spec.depth) throw InvalidSpec("cell_partition: level out of range");
  const long long cells_per_axis = 1LL << (spec.depth - level);
  const long long span = (1LL << level) * spec.leaf;  // grid points per cell per axis
  const long long unit = 2 * span;                    // cell width in half-units
  std::map<std::array<long long, 3>, std::vector<int>> groups;
  for (int dof : active) {
    const auto j = points.grid_index(dof);
    std::array<long long, 3> key{0, 0, 0};
    for (int a = 0; a < spec.dim; ++a) {
      const long long cell = (j[a] - 1) / span;  // in [0, cells_per_axis)
      key[a] = unit * cell + unit / 2;
    }
    detail::collect_cluster(groups, key, dof);
  }
  (void)cells_per_axis;
  return detail::finalize_clusters(groups, spec, unit, ClusterKind::cell);
}

/// Voronoi regions about the edge centers of level-l cells (2D and 3D).
inline std::vector<Cluster> edge_partition(const PointSet& points, const GridSpec& spec, int level,
                                           const std::vector<int>& active) {
  if (level < 0 || level >= spec.depth) throw InvalidSpec("edge_partition: level out of range");
  const long long M = 1LL << (spec.depth - level);
  const long long unit = 2LL * (1LL << level) * spec.leaf;
  std::vector<detail::CenterFamily> fams;
  if (spec.dim == 2) {
    fams.push_back({{false, true, false}, {M - 1, M, 1}});
    fams.push_back({{true, false, false}, {M, M - 1, 1}});
  } else {
    fams.push_back({{false, false, true}, {M - 1, M - 1, M}});
    fams.push_back({{false, true, false}, {M - 1, M, M - 1}});
    fams.push_back({{true, false, false}, {M, M - 1, M - 1}});
  }
  std::map<std::array<long long, 3>, std::vector<int>> groups;
  for (int dof : active) {
    const auto p = points.half_units(dof);
    std::array<long long, 3> best{0, 0, 0};
    long long best_d2 = -1;
    for (const auto& fam : fams) {
      if (fam.tmax[0] < 1 || fam.tmax[1] < 1 || (spec.dim == 3 && fam.tmax[2] < 1)) continue;
      const auto c = detail::nearest_in_family(p, spec.dim, unit, fam);
      long long d2 = 0;
      for (int a = 0; a < spec.dim; ++a) {
        const long long d = p[a] - c[a];
        d2 += d * d;
      }
      if (best_d2 < 0 || d2 < best_d2 || (d2 == best_d2 && c < best)) {
        best_d2 = d2;
        best = c;
      }
    }
    if (best_d2 >= 0) detail::collect_cluster(groups, best, dof);
  }
  return detail::finalize_clusters(groups, spec, unit, ClusterKind::edge);
}

/// Voronoi regions about the face centers of level-l cells (3D only).
inline std::vector<Cluster> face_partition(const PointSet& points, const GridSpec& spec, int level,
                                           const std::vector<int>& active) {
  if (spec.dim != 3) throw DimensionMismatch("face_partition requires dim = 3");
  if (level < 0 || level >= spec.depth) throw InvalidSpec("face_partition: level out of range");
  const long long M = 1LL << (spec.depth - level);
  const long long unit = 2LL * (1LL << level) * spec.leaf;
  std::vector<detail::CenterFamily> fams = {
      {{false, true, true}, {M - 1, M, M}},
      {{true, false, true}, {M, M - 1, M}},
      {{true, true, false}, {M, M, M - 1}},
  };
  std::map<std::array<long long, 3>, std::vector<int>> groups;
  for (int dof : active) {
    const auto p = points.half_units(dof);
    std::array<long long, 3> best{0, 0, 0};
    long long best_d2 = -1;
    for (const auto& fam : fams) {
      if (fam.tmax[0] < 1 || fam.tmax[1] < 1 || fam.tmax[2] < 1) continue;
      const auto c = detail::nearest_in_family(p, 3, unit, fam);
      long long d2 = 0;
      for (int a = 0; a < 3; ++a) {
        const long long d = p[a] - c[a];
        d2 += d * d;
      }
      if (best_d2 < 0 || d2 < best_d2 || (d2 == best_d2 && c < best)) {
        best_d2 = d2;
        best = c;
      }
    }
    if (best_d2 >= 0) detail::collect_cluster(groups, best, dof);
  }
  return detail::finalize_clusters(groups, spec, unit, ClusterKind::face);
}

/// Dispatch a plan level to the matching partition.
inline std::vector<Cluster> partition_level(const PointSet& points, const GridSpec& spec,
                                            const PlanLevel& level,
                                            const std::vector<int>& active) {
  switch (level.kind) {
    case ClusterKind::cell: return cell_partition(points, spec, level.tag.whole, active);
    case ClusterKind::edge: return edge_partition(points, spec, level.tag.whole, active);
    default: return face_partition(points, spec, level.tag.whole, active);
  }
}

// ---- adaptive refinement --------------------------------------------------
// Quadtree/octree over an arbitrary point cloud in the unit box, subdivided
// until each leaf holds at most `capacity` points. Level collections follow
// the same partition contract: at pass t every active DOF belongs to exactly
// one box, namely its ancestor at depth min(t, leaf depth).

struct AdaptiveTree {
  int dim = 2;
  int depth = 0;                    // deepest refinement
  int capacity = 64;
  std::vector<int> leaf_depth;      // per DOF
  std::vector<double> coords;       // interleaved copy

  /// Boxes at pass t (t = depth is finest, t = 1 coarsest above root).
  std::vector<Cluster> level_clusters(int t, const std::vector<int>& active) const {
    std::map<std::array<long long, 3>, std::vector<int>> groups;
    std::map<std::array<long long, 3>, int> box_depth;
    for (int dof : active) {
      const int d = std::min(t, leaf_depth[dof]);
      const long long boxes = 1LL << d;
      std::array<long long, 3> key{0, 0, 0};
      for (int a = 0; a < dim; ++a) {
        long long b = (long long)(coords[std::size_t(dof) * dim + a] * boxes);
        b = std::clamp(b, 0LL, boxes - 1);
        // key in units of 2^-depth half-boxes to keep keys integral
        key[a] = (2 * b + 1) * (1LL << (depth - d));
      }
      groups[key].push_back(dof);
      box_depth[key] = d;
    }
    std::vector<Cluster> out;
    const double scale = 1.0 / double(2LL << depth);
    for (auto& [key, idx] : groups) {
      Cluster c;
      c.indices = std::move(idx);
      c.kind = ClusterKind::cell;
      const int d = box_depth[key];
      c.iwidth = 2LL << (depth - d);
      c.width = 1.0 / double(1LL << d);
      c.icenter = key;
      for (int a = 0; a < dim; ++a) c.center[a] = double(key[a]) * scale * 2.0;
      out.push_back(std::move(c));
    }
    return out;
  }
};

inline AdaptiveTree build_adaptive_tree(const std::vector<double>& coords, int dim, int capacity,
                                        int max_depth = 30) {
  AdaptiveTree t;
  t.dim = dim;
  t.capacity = capacity;
  t.coords = coords;
  const int npts = int(coords.size() / dim);
  t.leaf_depth.assign(npts, 0);

  // Refine breadth-first: a box splits while it holds more than capacity.
  struct Box {
    std::vector<int> pts;
    std::array<long long, 3> idx;
    int depth;
  };
  std::vector<Box> work;
  Box root;
  root.depth = 0;
  root.idx = {0, 0, 0};
  root.pts.resize(npts);
  for (int i = 0; i < npts; ++i) root.pts[i] = i;
  work.push_back(std::move(root));
  while (!work.empty()) {
    Box b = std::move(work.back());
    work.pop_back();
    t.depth = std::max(t.depth, b.depth);
    if (int(b.pts.size()) <= capacity || b.depth >= max_depth) {
      for (int p : b.pts) t.leaf_depth[p] = b.depth;
      continue;
    }
    const int nb = 1 << dim;
    std::vector<Box> kids(nb);
    for (int q = 0; q < nb; ++q) {
      kids[q].depth = b.depth + 1;
      for (int a = 0; a < dim; ++a) kids[q].idx[a] = 2 * b.idx[a] + ((q >> a) & 1);
    }
    const long long boxes = 1LL << (b.depth + 1);
    for (int p : b.pts) {
      int q = 0;
      for (int a = 0; a < dim; ++a) {
        long long cell = (long long)(coords[std::size_t(p) * dim + a] * boxes);
        cell = std::clamp(cell, 0LL, boxes - 1);
        if (cell & 1) q |= 1 << a;
      }
      kids[q].pts.push_back(p);
    }
    for (auto& k : kids)
      if (!k.pts.empty()) work.push_back(std::move(k));
  }
  return t;
}

}  // namespace hifie
