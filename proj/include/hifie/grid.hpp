#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "hifie/errors.hpp"

namespace hifie {

/// Uniform n x n (x n) grid on the unit box with a perfect dyadic hierarchy:
/// n = 2^L * m, step h = 1/n, leaf cells of m points per axis.
struct GridSpec {
  int dim = 2;
  int n = 0;
  int depth = 0;  // L
  int leaf = 0;   // m

  double h() const { return 1.0 / n; }
  long long total() const {
    long long t = 1;
    for (int a = 0; a < dim; ++a) t *= n;
    return t;
  }

  static GridSpec with_depth(int dim, int n, int depth) {
    if (dim != 2 && dim != 3) throw InvalidSpec("dim must be 2 or 3");
    if (n <= 0 || depth < 0) throw InvalidSpec("n > 0 and depth >= 0 required");
    if (n % (1 << depth) != 0)
      throw InvalidSpec("n = " + std::to_string(n) + " not divisible by 2^" + std::to_string(depth));
    GridSpec s;
    s.dim = dim;
    s.n = n;
    s.depth = depth;
    s.leaf = n >> depth;
    return s;
  }

  /// Deepest hierarchy whose leaf occupancy stays at or above the target
  /// (default 64 in 2D, 512 in 3D); falls back to leaves of >= 2 points per
  /// axis so that at least one level exists whenever n is even.
  static GridSpec auto_depth(int dim, int n, int target_leaf_occupancy = 0) {
    if (target_leaf_occupancy <= 0) target_leaf_occupancy = dim == 2 ? 64 : 512;
    int best = 0;
    for (int L = 0; (n % (1 << L)) == 0; ++L) {
      const int m = n >> L;
      long long occ = 1;
      for (int a = 0; a < dim; ++a) occ *= m;
      if (occ >= target_leaf_occupancy) best = L;
      if (m == 1) break;
    }
    if (best == 0) {
      for (int L = 0; (n % (1 << L)) == 0 && (n >> L) >= 2; ++L) best = L;
    }
    return with_depth(dim, n, best);
  }
};

/// Collocation points x_j = h(j - 1/2) with j_1 varying fastest; every DOF
/// carries the element measure h^d.
struct PointSet {
  int dim = 2;
  int n = 0;
  long long count = 0;
  std::vector<double> coords;  // interleaved, dim doubles per point

  double coord(long long i, int axis) const { return coords[std::size_t(i) * dim + axis]; }

  std::array<double, 3> point(long long i) const {
    std::array<double, 3> p{0, 0, 0};
    for (int a = 0; a < dim; ++a) p[a] = coord(i, a);
    return p;
  }

  /// 1-based grid multi-index of DOF i.
  std::array<int, 3> grid_index(long long i) const {
    std::array<int, 3> j{1, 1, 1};
    long long r = i;
    for (int a = 0; a < dim; ++a) {
      j[a] = int(r % n) + 1;
      r /= n;
    }
    return j;
  }

  /// Coordinates in half-step units (2*n*x), which are exact odd integers.
  std::array<long long, 3> half_units(long long i) const {
    auto j = grid_index(i);
    std::array<long long, 3> u{0, 0, 0};
    for (int a = 0; a < dim; ++a) u[a] = 2LL * j[a] - 1;
    return u;
  }

  double dist(long long i, long long k) const {
    double s = 0;
    for (int a = 0; a < dim; ++a) {
      const double d = coord(i, a) - coord(k, a);
      s += d * d;
    }
    return std::sqrt(s);
  }

  double element_measure() const { return std::pow(1.0 / n, dim); }
};

inline PointSet build_uniform_grid(const GridSpec& spec) {
  if (spec.n % (1 << spec.depth) != 0 || spec.leaf != (spec.n >> spec.depth))
    throw InvalidSpec("grid spec violates n = 2^L * m");
  PointSet ps;
  ps.dim = spec.dim;
  ps.n = spec.n;
  ps.count = spec.total();
  ps.coords.resize(std::size_t(ps.count) * spec.dim);
  const double h = spec.h();
  for (long long i = 0; i < ps.count; ++i) {
    long long r = i;
    for (int a = 0; a < spec.dim; ++a) {
      const int j = int(r % spec.n) + 1;
      r /= spec.n;
      ps.coords[std::size_t(i) * spec.dim + a] = h * (j - 0.5);
    }
  }
  return ps;
}

}  // namespace hifie
