#pragma once

#include <atomic>
#include <cmath>
#include <string>
#include <vector>

#include "hifie/dense.hpp"
#include "hifie/errors.hpp"

namespace hifie {

/// Column split of an interpolative decomposition: the redundant columns are
/// (approximately) the skeleton columns times T.
template <class S>
struct IdResult {
  std::vector<int> sk;  // skeleton column indices, pivot order
  std::vector<int> rd;  // redundant column indices
  DenseMatrix<S> T;     // |sk| x |rd|
};

/// Counters for the interpolation-norm quality bound ||T|| <= f sqrt(k(n-k)).
struct IdStats {
  std::atomic<long long> total{0};
  std::atomic<long long> f2_violations{0};
};

inline IdStats& id_stats() {
  static IdStats s;
  return s;
}

/// Adaptive-rank ID by column-pivoted Householder QR: stop when
/// |R_kk| <= tol * |R_11|, ties in the pivot choice broken by the lowest
/// column index; T solves R1 T = R2 by back substitution. Deterministic for
/// identical input bits. Rank 0 (empty sk) is legal and means M ~ 0.
template <class S>
IdResult<S> interpolative_decompose(const DenseMatrix<S>& m_in, double tol) {
  if (tol <= 0) throw InvalidSpec("interpolative_decompose: tol must be positive");
  const int rows = m_in.rows(), cols = m_in.cols();
  IdResult<S> res;
  if (cols == 0) return res;

  DenseMatrix<S> m = m_in;
  std::vector<int> perm(cols);
  for (int j = 0; j < cols; ++j) perm[j] = j;

  std::vector<double> norm2(cols), norm2_ref(cols);
  for (int j = 0; j < cols; ++j) {
    double s = 0;
    const S* col = m.col(j);
    for (int i = 0; i < rows; ++i) s += double(abs_of(col[i])) * abs_of(col[i]);
    norm2[j] = norm2_ref[j] = s;
  }

  const int kmax = std::min(rows, cols);
  double r11 = -1;
  int rank = 0;
  std::vector<S> v(rows);
  for (int k = 0; k < kmax; ++k) {
    // pivot: largest remaining column norm, lowest index on ties
    int p = k;
    for (int j = k + 1; j < cols; ++j)
      if (norm2[j] > norm2[p]) p = j;
    // guard against downdating error: recompute when badly cancelled
    if (norm2[p] <= 1e-4 * norm2_ref[p]) {
      for (int j = k; j < cols; ++j) {
        double s = 0;
        const S* col = m.col(j);
        for (int i = k; i < rows; ++i) s += double(abs_of(col[i])) * abs_of(col[i]);
        norm2[j] = norm2_ref[j] = s;
      }
      p = k;
      for (int j = k + 1; j < cols; ++j)
        if (norm2[j] > norm2[p]) p = j;
    }
    const double rkk = std::sqrt(std::max(0.0, norm2[p]));
    if (k == 0) {
      r11 = rkk;
      if (r11 == 0) break;  // zero matrix: everything redundant
    }
    if (rkk <= tol * r11) break;
    rank = k + 1;
    if (p != k) {
      std::swap_ranges(m.col(k), m.col(k) + rows, m.col(p));
      std::swap(norm2[k], norm2[p]);
      std::swap(norm2_ref[k], norm2_ref[p]);
      std::swap(perm[k], perm[p]);
    }
    // Householder reflection of column k below row k
    double sigma2 = 0;
    for (int i = k; i < rows; ++i) sigma2 += double(abs_of(m(i, k))) * abs_of(m(i, k));
    const double sigma = std::sqrt(sigma2);
    if (sigma == 0) {  // stale norm estimate; the column is exactly spent
      rank = k;
      break;
    }
    const S x0 = m(k, k);
    const double ax0 = abs_of(x0);
    const S phase = ax0 == 0 ? S(1) : x0 * S(1.0 / ax0);
    for (int i = k; i < rows; ++i) v[i] = m(i, k);
    v[k] += phase * S(sigma);
    const double vnorm2 = 2.0 * sigma * (sigma + ax0);
    if (vnorm2 == 0) continue;
    const double beta = 2.0 / vnorm2;
    m(k, k) = -phase * S(sigma);
    for (int i = k + 1; i < rows; ++i) m(i, k) = S(0);
    for (int j = k + 1; j < cols; ++j) {
      S* col = m.col(j);
      S dot = S(0);
      for (int i = k; i < rows; ++i) dot += conj_of(v[i]) * col[i];
      dot *= S(beta);
      if (dot == S(0)) continue;
      for (int i = k; i < rows; ++i) col[i] -= dot * v[i];
      const double d = abs_of(col[k]);
      norm2[j] -= d * d;
      if (norm2[j] < 0) norm2[j] = 0;
    }
  }

  res.sk.assign(perm.begin(), perm.begin() + rank);
  res.rd.assign(perm.begin() + rank, perm.end());
  const int nrd = int(res.rd.size());
  res.T = DenseMatrix<S>(rank, nrd);
  // back substitution: R1 T = R2, R1 = m(0:rank, 0:rank) upper triangular
  for (int j = 0; j < nrd; ++j) {
    S* t = res.T.col(j);
    const S* r2 = m.col(rank + j);
    for (int i = 0; i < rank; ++i) t[i] = r2[i];
    for (int i = rank - 1; i >= 0; --i) {
      S s = t[i];
      for (int l = i + 1; l < rank; ++l) s -= m(i, l) * t[l];
      t[i] = s / m(i, i);
    }
  }

  // interpolation-norm quality: log f = 2 violations, refuse beyond f = 4
  if (rank > 0 && nrd > 0) {
    id_stats().total.fetch_add(1, std::memory_order_relaxed);
    const double tnorm = two_norm_estimate(res.T);
    const double base = std::sqrt(double(rank) * nrd);
    if (tnorm > 4.0 * base)
      throw IdQualityError("||T|| = " + std::to_string(tnorm) + " exceeds f = 4 bound " +
                           std::to_string(4.0 * base));
    if (tnorm > 1.1 * 2.0 * base) id_stats().f2_violations.fetch_add(1, std::memory_order_relaxed);
  }
  return res;
}

}  // namespace hifie
