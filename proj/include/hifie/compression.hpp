#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "hifie/clusters.hpp"
#include "hifie/dense.hpp"
#include "hifie/id.hpp"
#include "hifie/problem.hpp"
#include "hifie/sci.hpp"

namespace hifie {

/// Proxy surface around a cluster: circle of radius 1.5 x width with 64
/// equispaced points in 2D; sphere of the same radius with 512 points from
/// seeded Gaussian projections in 3D. Point weights are surface measure
/// divided by the point count.
struct ProxySurface {
  int dim = 2;
  int count = 0;
  double radius = 0;
  double weight = 0;
  std::vector<double> pts;  // interleaved absolute coordinates

  std::array<double, 3> point(int i) const {
    std::array<double, 3> p{0, 0, 0};
    for (int a = 0; a < dim; ++a) p[a] = pts[std::size_t(i) * dim + a];
    return p;
  }
};

inline ProxySurface proxy_surface(const std::array<double, 3>& center, double width, int dim,
                                  std::uint64_t seed) {
  if (width <= 0) throw InvalidSpec("proxy_surface: width must be positive");
  ProxySurface s;
  s.dim = dim;
  s.radius = 1.5 * width;
  if (dim == 2) {
    s.count = 64;
    s.weight = 2.0 * M_PI * s.radius / s.count;
    s.pts.resize(std::size_t(s.count) * 2);
    for (int i = 0; i < s.count; ++i) {
      const double th = 2.0 * M_PI * i / s.count;
      s.pts[2 * i] = center[0] + s.radius * std::cos(th);
      s.pts[2 * i + 1] = center[1] + s.radius * std::sin(th);
    }
  } else {
    s.count = 512;
    s.weight = 4.0 * M_PI * s.radius * s.radius / s.count;
    s.pts.resize(std::size_t(s.count) * 3);
    RandomStream rng(seed);
    for (int i = 0; i < s.count; ++i) {
      double g[3], nrm = 0;
      do {
        nrm = 0;
        for (double& v : g) {
          v = rng.normal();
          nrm += v * v;
        }
        nrm = std::sqrt(nrm);
      } while (nrm < 1e-12);
      for (int a = 0; a < 3; ++a) s.pts[3 * i + a] = center[a] + s.radius * g[a] / nrm;
    }
  }
  return s;
}

/// Near field of a cluster: active DOFs outside the cluster that lie inside
/// the proxy surface, extended by every DOF that shares an SCI delta with
/// the cluster. Distance tests run in exact half-step integer units.
template <class S>
std::vector<int> near_field(const Cluster& cluster, const PointSet& points,
                            const std::vector<int>& active, const SciStore<S>& sci) {
  const auto cluster_has = [&](int g) {
    return std::binary_search(cluster.indices.begin(), cluster.indices.end(), g);
  };
  const long long r_half = 3 * cluster.iwidth / 2;  // 1.5 * width in half-units
  const long long r2 = r_half * r_half;
  std::vector<int> out;
  for (int g : active) {
    if (cluster_has(g)) continue;
    const auto p = points.half_units(g);
    long long d2 = 0;
    for (int a = 0; a < points.dim; ++a) {
      const long long d = p[a] - cluster.icenter[a];
      d2 += d * d;
    }
    if (d2 < r2) out.push_back(g);
  }
  for (int g : sci.coupled(cluster.indices)) {
    if (cluster_has(g)) continue;
    if (!std::binary_search(active.begin(), active.end(), g)) continue;
    out.push_back(g);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Reduced compression target Y_c over the cluster columns. Row layout:
///   symmetric:   [ A_{cN,c} ; proxy kernel rows ]
///   unsymmetric: [ A_{cN,c} ; A_{c,cN}^* ; proxy kernel rows ; proxy b-rows^* ]
/// The per-entry delta mask records where SCI deltas contributed; a row is
/// S-tagged when any of its entries did.
template <class S>
struct CompressionMatrix {
  DenseMatrix<S> y;
  std::vector<std::uint8_t> smask;  // col-major entry mask, same shape as y
  int near_count = 0;
  bool symmetric = true;

  bool row_is_s(int i) const {
    for (int j = 0; j < y.cols(); ++j)
      if (smask[std::size_t(j) * y.rows() + i]) return true;
    return false;
  }
  bool has_s_rows() const {
    for (std::uint8_t v : smask)
      if (v) return true;
    return false;
  }
};

template <class S>
CompressionMatrix<S> assemble_compression_matrix(const KernelProblem<S>& prob,
                                                 const Cluster& cluster,
                                                 const std::vector<int>& near,
                                                 const ProxySurface& proxy, const SciStore<S>& sci,
                                                 bool symmetric) {
  const int nc = int(cluster.indices.size());
  const int nn = int(near.size());
  const int np = proxy.count;
  const int rows = symmetric ? nn + np : 2 * (nn + np);
  CompressionMatrix<S> out;
  out.symmetric = symmetric;
  out.near_count = nn;
  out.y = DenseMatrix<S>(rows, nc);
  out.smask.assign(out.y.size(), 0);

  const double hd = prob.points.element_measure();

  // near-field rows A_{cN,c} with delta overlay
  if (nn > 0) {
    std::vector<std::uint8_t> mask;
    DenseMatrix<S> an = assemble_block(prob, near, cluster.indices, &sci, &mask);
    for (int j = 0; j < nc; ++j)
      for (int i = 0; i < nn; ++i) {
        out.y(i, j) = an(i, j);
        out.smask[std::size_t(j) * rows + i] = mask[std::size_t(j) * nn + i];
      }
    if (!symmetric) {
      DenseMatrix<S> am = assemble_block(prob, cluster.indices, near, &sci, &mask);
      for (int j = 0; j < nc; ++j)
        for (int i = 0; i < nn; ++i) {
          out.y(nn + i, j) = conj_of(am(j, i));
          out.smask[std::size_t(j) * rows + nn + i] = mask[std::size_t(i) * nc + j];
        }
    }
  }

  // proxy rows: (Y_{cE,c})_{ij} = K(||xE_i - x_j||) c(x_j) h^d
  const int base_k = symmetric ? nn : 2 * nn;
  for (int j = 0; j < nc; ++j) {
    const int dof = cluster.indices[j];
    const auto xj = prob.points.point(dof);
    for (int i = 0; i < np; ++i) {
      const auto xe = proxy.point(i);
      double d2 = 0;
      for (int a = 0; a < prob.points.dim; ++a) d2 += (xe[a] - xj[a]) * (xe[a] - xj[a]);
      out.y(base_k + i, j) = prob.kernel_r(std::sqrt(d2)) * prob.c[dof] * S(hd);
    }
  }
  if (!symmetric) {
    // (Y_{c,cE})^* rows: conj of b(x_j) K(||x_j - xE_i||) w_i
    const int base_b = 2 * nn + np;
    for (int j = 0; j < nc; ++j) {
      const int dof = cluster.indices[j];
      const auto xj = prob.points.point(dof);
      for (int i = 0; i < np; ++i) {
        const auto xe = proxy.point(i);
        double d2 = 0;
        for (int a = 0; a < prob.points.dim; ++a) d2 += (xe[a] - xj[a]) * (xe[a] - xj[a]);
        out.y(base_b + i, j) =
            conj_of(prob.b[dof] * prob.kernel_r(std::sqrt(d2)) * S(proxy.weight));
      }
    }
  }
  return out;
}

/// Column submatrix of a compression matrix (used by the sparsity split).
template <class S>
CompressionMatrix<S> gather_columns(const CompressionMatrix<S>& y, const std::vector<int>& cols) {
  CompressionMatrix<S> g;
  g.symmetric = y.symmetric;
  g.near_count = y.near_count;
  g.y = y.y.gather_cols(cols);
  g.smask.resize(g.y.size());
  for (int j = 0; j < int(cols.size()); ++j)
    std::copy_n(y.smask.begin() + std::size_t(cols[j]) * y.y.rows(), y.y.rows(),
                g.smask.begin() + std::size_t(j) * y.y.rows());
  return g;
}

/// Two-scale tolerance: eps when no SCI rows exist, otherwise rho * eps with
/// rho = min(1, ||Y^K|| / ||Y^S||) over the K/S row blocks.
template <class S>
double scaled_tolerance(const CompressionMatrix<S>& y, double eps) {
  if (eps <= 0) throw InvalidSpec("scaled_tolerance: eps must be positive");
  std::vector<int> srows, krows;
  for (int i = 0; i < y.y.rows(); ++i) (y.row_is_s(i) ? srows : krows).push_back(i);
  if (srows.empty()) return eps;
  std::vector<int> all_cols(y.y.cols());
  for (int j = 0; j < y.y.cols(); ++j) all_cols[j] = j;
  const double ns = two_norm_estimate(y.y.gather(srows, all_cols));
  if (ns == 0) return eps;
  const double nk = two_norm_estimate(y.y.gather(krows, all_cols));
  return std::min(1.0, nk / ns) * eps;
}

/// Group the columns by identical S-row support using the indicator Gram
/// test: with E the 0/1 delta mask, B = E^T E, columns i and j share a group
/// iff B_ij = max(nnz_i, nnz_j). Groups are returned in first-column order
/// and partition the cluster.
template <class S>
std::vector<std::vector<int>> split_by_sparsity(const CompressionMatrix<S>& y) {
  const int rows = y.y.rows(), cols = y.y.cols();
  std::vector<int> srows;
  for (int i = 0; i < rows; ++i)
    if (y.row_is_s(i)) srows.push_back(i);
  if (srows.empty()) {
    std::vector<int> all(cols);
    for (int j = 0; j < cols; ++j) all[j] = j;
    return {all};
  }
  const int nsr = int(srows.size());
  // indicator restricted to S rows
  std::vector<std::uint8_t> e(std::size_t(nsr) * cols);
  std::vector<long long> nnz(cols, 0);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < nsr; ++i) {
      const std::uint8_t v = y.smask[std::size_t(j) * rows + srows[i]];
      e[std::size_t(j) * nsr + i] = v;
      nnz[j] += v;
    }
  auto gram = [&](int i, int j) {
    long long s = 0;
    const std::uint8_t* a = e.data() + std::size_t(i) * nsr;
    const std::uint8_t* b = e.data() + std::size_t(j) * nsr;
    for (int t = 0; t < nsr; ++t) s += (long long)a[t] * b[t];
    return s;
  };
  std::vector<std::vector<int>> groups;
  std::vector<int> rep;  // representative column per group
  for (int j = 0; j < cols; ++j) {
    bool placed = false;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const int r = rep[g];
      if (nnz[r] == nnz[j] && gram(r, j) == std::max(nnz[r], nnz[j])) {
        groups[g].push_back(j);
        placed = true;
        break;
      }
    }
    if (!placed) {
      groups.push_back({j});
      rep.push_back(j);
    }
  }
  return groups;
}

}  // namespace hifie
