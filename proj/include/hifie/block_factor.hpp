#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hifie/dense.hpp"
#include "hifie/errors.hpp"

namespace hifie {

enum class FactorKind : std::uint8_t { LU = 0, LDLt = 1 };

// Factored small dense block: partially pivoted LU, or Bunch-Kaufman LDL^T
// for (conjugation-free) symmetric input. LDL^T uses transpose symmetry
// throughout, so it is valid for complex symmetric matrices as well.
//
// LU:   B = P^T L U           (P = recorded row swaps applied in order)
// LDLt: B = P^T L D L^T P     (D block diagonal with 1x1 / 2x2 blocks)
template <class S>
class BlockFactor {
 public:
  BlockFactor() = default;

  FactorKind kind() const { return kind_; }
  int dim() const { return n_; }

  /// Factor a square block. Throws SingularBlock when a pivot falls below
  /// 1e-14 times the largest absolute entry of the input.
  static BlockFactor factor(const DenseMatrix<S>& b, bool symmetric) {
    if (b.rows() != b.cols()) throw DimensionMismatch("factor_block: block not square");
    BlockFactor f;
    f.n_ = b.rows();
    f.packed_ = b;
    if (f.n_ == 0) {
      f.kind_ = symmetric ? FactorKind::LDLt : FactorKind::LU;
      return f;
    }
    const double thresh = 1e-14 * b.max_abs();
    if (symmetric) {
      f.kind_ = FactorKind::LDLt;
      f.factor_ldlt(thresh);
    } else {
      f.kind_ = FactorKind::LU;
      f.factor_lu(thresh);
    }
    return f;
  }

  // ---- solves and products (vector, in place) ----

  void solve(std::vector<S>& x) const {
    check_dim(x);
    if (kind_ == FactorKind::LU) {
      perm_forward(x);
      solve_l(x);
      solve_u(x);
    } else {
      perm_forward(x);
      ldlt_solve_l(x);
      ldlt_solve_d(x);
      ldlt_solve_lt(x);
      perm_inverse(x);
    }
  }

  void solve_adjoint(std::vector<S>& x) const {
    check_dim(x);
    if (kind_ == FactorKind::LU) {
      // B^* = U^* L^* P: solve U^* z = b, L^* w = z, x = P^T w.
      solve_u_adj(x);
      solve_l_adj(x);
      perm_inverse(x);
    } else {
      // B^* = conj(B) for transpose-symmetric B.
      conj_vec(x);
      solve(x);
      conj_vec(x);
    }
  }

  void apply(std::vector<S>& x) const {
    check_dim(x);
    if (kind_ == FactorKind::LU) {
      apply_u(x);
      apply_l(x);
      perm_inverse(x);
    } else {
      perm_forward(x);
      ldlt_apply_lt(x);
      ldlt_apply_d(x);
      ldlt_apply_l(x);
      perm_inverse(x);
    }
  }

  void apply_adjoint(std::vector<S>& x) const {
    check_dim(x);
    if (kind_ == FactorKind::LU) {
      perm_forward(x);
      apply_l_adj(x);
      apply_u_adj(x);
    } else {
      conj_vec(x);
      apply(x);
      conj_vec(x);
    }
  }

  /// In-place solve with a matrix of right-hand sides.
  void solve_mat(DenseMatrix<S>& rhs) const {
    if (rhs.rows() != n_) throw DimensionMismatch("BlockFactor::solve_mat");
    std::vector<S> col(n_);
    for (int j = 0; j < rhs.cols(); ++j) {
      std::copy_n(rhs.col(j), n_, col.begin());
      solve(col);
      std::copy_n(col.begin(), n_, rhs.col(j));
    }
  }

  /// Recompose the factored block (testing and diagnostics).
  DenseMatrix<S> reconstruct() const {
    DenseMatrix<S> r(n_, n_);
    std::vector<S> e(n_);
    for (int j = 0; j < n_; ++j) {
      std::fill(e.begin(), e.end(), S(0));
      e[j] = S(1);
      apply(e);
      for (int i = 0; i < n_; ++i) r(i, j) = e[i];
    }
    return r;
  }

  // ---- raw access (serialization) ----
  const DenseMatrix<S>& packed() const { return packed_; }
  const std::vector<int>& swaps_a() const { return swap_a_; }
  const std::vector<int>& swaps_b() const { return swap_b_; }
  const std::vector<std::uint8_t>& block_sizes() const { return blk_; }
  static BlockFactor from_raw(FactorKind kind, DenseMatrix<S> packed, std::vector<int> sa,
                              std::vector<int> sb, std::vector<std::uint8_t> blk) {
    BlockFactor f;
    f.kind_ = kind;
    f.n_ = packed.rows();
    f.packed_ = std::move(packed);
    f.swap_a_ = std::move(sa);
    f.swap_b_ = std::move(sb);
    f.blk_ = std::move(blk);
    return f;
  }

 private:
  FactorKind kind_ = FactorKind::LU;
  int n_ = 0;
  DenseMatrix<S> packed_;
  // Interchange list applied in order for P; reverse order gives P^T.
  std::vector<int> swap_a_, swap_b_;
  // LDLt only: blk_[k] = 1 (1x1 pivot), 2 (leading column of 2x2), 0 (trailing).
  std::vector<std::uint8_t> blk_;

  void check_dim(const std::vector<S>& x) const {
    if (int(x.size()) != n_) throw DimensionMismatch("BlockFactor: vector length");
  }

  static void conj_vec(std::vector<S>& x) {
    if constexpr (is_complex_v<S>)
      for (auto& v : x) v = conj_of(v);
  }

  void perm_forward(std::vector<S>& x) const {
    for (std::size_t k = 0; k < swap_a_.size(); ++k) std::swap(x[swap_a_[k]], x[swap_b_[k]]);
  }
  void perm_inverse(std::vector<S>& x) const {
    for (std::size_t k = swap_a_.size(); k-- > 0;) std::swap(x[swap_a_[k]], x[swap_b_[k]]);
  }

  // ---- LU ----

  void factor_lu(double thresh) {
    DenseMatrix<S>& a = packed_;
    for (int k = 0; k < n_; ++k) {
      int p = k;
      double mx = abs_of(a(k, k));
      for (int i = k + 1; i < n_; ++i) {
        const double v = abs_of(a(i, k));
        if (v > mx) {
          mx = v;
          p = i;
        }
      }
      if (mx <= thresh)
        throw SingularBlock("LU pivot " + std::to_string(k) + " magnitude " + std::to_string(mx));
      if (p != k) {
        swap_a_.push_back(k);
        swap_b_.push_back(p);
        for (int j = 0; j < n_; ++j) std::swap(a(k, j), a(p, j));
      }
      const S piv = a(k, k);
      for (int i = k + 1; i < n_; ++i) a(i, k) /= piv;
      for (int j = k + 1; j < n_; ++j) {
        const S akj = a(k, j);
        if (akj == S(0)) continue;
        S* aj = a.col(j);
        const S* ak = a.col(k);
        for (int i = k + 1; i < n_; ++i) aj[i] -= ak[i] * akj;
      }
    }
  }

  void solve_l(std::vector<S>& x) const {  // unit lower
    for (int j = 0; j < n_; ++j) {
      const S xj = x[j];
      if (xj == S(0)) continue;
      const S* aj = packed_.col(j);
      for (int i = j + 1; i < n_; ++i) x[i] -= aj[i] * xj;
    }
  }
  void solve_u(std::vector<S>& x) const {
    for (int j = n_ - 1; j >= 0; --j) {
      x[j] /= packed_(j, j);
      const S xj = x[j];
      if (xj == S(0)) continue;
      const S* aj = packed_.col(j);
      for (int i = 0; i < j; ++i) x[i] -= aj[i] * xj;
    }
  }
  void solve_u_adj(std::vector<S>& x) const {  // (U^*) x = b, lower triangular
    for (int i = 0; i < n_; ++i) {
      S s = x[i];
      for (int k = 0; k < i; ++k) s -= conj_of(packed_(k, i)) * x[k];
      x[i] = s / conj_of(packed_(i, i));
    }
  }
  void solve_l_adj(std::vector<S>& x) const {  // (L^*) x = b, unit upper
    for (int i = n_ - 1; i >= 0; --i) {
      S s = x[i];
      for (int k = i + 1; k < n_; ++k) s -= conj_of(packed_(k, i)) * x[k];
      x[i] = s;
    }
  }
  void apply_u(std::vector<S>& x) const {
    for (int i = 0; i < n_; ++i) {
      S s = S(0);
      for (int j = i; j < n_; ++j) s += packed_(i, j) * x[j];
      x[i] = s;
    }
  }
  void apply_l(std::vector<S>& x) const {  // unit lower times x
    for (int i = n_ - 1; i >= 0; --i) {
      S s = x[i];
      for (int j = 0; j < i; ++j) s += packed_(i, j) * x[j];
      x[i] = s;
    }
  }
  void apply_u_adj(std::vector<S>& x) const {  // U^* times x (lower)
    for (int i = n_ - 1; i >= 0; --i) {
      S s = S(0);
      for (int j = 0; j <= i; ++j) s += conj_of(packed_(j, i)) * x[j];
      x[i] = s;
    }
  }
  void apply_l_adj(std::vector<S>& x) const {  // L^* times x (unit upper)
    for (int i = 0; i < n_; ++i) {
      S s = x[i];
      for (int j = i + 1; j < n_; ++j) s += conj_of(packed_(j, i)) * x[j];
      x[i] = s;
    }
  }

  // ---- LDL^T (Bunch-Kaufman partial pivoting, transpose symmetry) ----

  void sym_swap(int i, int j) {
    // Swap rows/cols i and j of the working lower triangle.
    DenseMatrix<S>& a = packed_;
    if (i == j) return;
    if (i > j) std::swap(i, j);
    for (int k = 0; k < i; ++k) std::swap(a(i, k), a(j, k));
    for (int k = i + 1; k < j; ++k) std::swap(a(k, i), a(j, k));
    for (int k = j + 1; k < n_; ++k) std::swap(a(k, i), a(k, j));
    std::swap(a(i, i), a(j, j));
  }

  void factor_ldlt(double thresh) {
    DenseMatrix<S>& a = packed_;
    blk_.assign(n_, 1);
    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
    int k = 0;
    while (k < n_) {
      const double absakk = abs_of(a(k, k));
      int imax = k;
      double colmax = 0;
      for (int i = k + 1; i < n_; ++i) {
        const double v = abs_of(a(i, k));
        if (v > colmax) {
          colmax = v;
          imax = i;
        }
      }
      int pivot_size = 1;
      int swap_with = k;
      if (std::max(absakk, colmax) <= thresh)
        throw SingularBlock("LDLt zero pivot column " + std::to_string(k));
      if (absakk >= alpha * colmax) {
        pivot_size = 1;
      } else {
        double rowmax = 0;
        for (int j = k; j < imax; ++j) rowmax = std::max(rowmax, double(abs_of(a(imax, j))));
        for (int i = imax + 1; i < n_; ++i) rowmax = std::max(rowmax, double(abs_of(a(i, imax))));
        if (absakk * rowmax >= alpha * colmax * colmax) {
          pivot_size = 1;
        } else if (abs_of(a(imax, imax)) >= alpha * rowmax) {
          pivot_size = 1;
          swap_with = imax;
        } else {
          pivot_size = 2;
          swap_with = imax;
        }
      }

      if (pivot_size == 1) {
        if (swap_with != k) {
          swap_a_.push_back(k);
          swap_b_.push_back(swap_with);
          sym_swap(k, swap_with);
        }
        const S d = a(k, k);
        if (abs_of(d) <= thresh) throw SingularBlock("LDLt pivot " + std::to_string(k));
        // Update the trailing block from the original column, then scale it.
        for (int i = k + 1; i < n_; ++i) {
          const S lik = a(i, k) / d;
          if (lik == S(0)) continue;
          for (int j = k + 1; j <= i; ++j) a(i, j) -= lik * a(j, k);
        }
        for (int i = k + 1; i < n_; ++i) a(i, k) /= d;
        blk_[k] = 1;
        k += 1;
      } else {
        if (swap_with != k + 1) {
          swap_a_.push_back(k + 1);
          swap_b_.push_back(swap_with);
          sym_swap(k + 1, swap_with);
        }
        const S d11 = a(k, k), d21 = a(k + 1, k), d22 = a(k + 1, k + 1);
        const S det = d11 * d22 - d21 * d21;
        if (abs_of(det) <=
            thresh * std::max({abs_of(d11), abs_of(d21), abs_of(d22), 1e-300}))
          throw SingularBlock("LDLt 2x2 pivot at " + std::to_string(k));
        const S i11 = d22 / det, i21 = -d21 / det, i22 = d11 / det;
        std::vector<S> l1v(n_), l2v(n_);
        for (int i = k + 2; i < n_; ++i) {
          const S w1 = a(i, k), w2 = a(i, k + 1);
          l1v[i] = w1 * i11 + w2 * i21;
          l2v[i] = w1 * i21 + w2 * i22;
        }
        for (int i = k + 2; i < n_; ++i)
          for (int j = k + 2; j <= i; ++j) a(i, j) -= l1v[i] * a(j, k) + l2v[i] * a(j, k + 1);
        for (int i = k + 2; i < n_; ++i) {
          a(i, k) = l1v[i];
          a(i, k + 1) = l2v[i];
        }
        blk_[k] = 2;
        blk_[k + 1] = 0;
        k += 2;
      }
    }
  }

  void ldlt_solve_l(std::vector<S>& x) const {  // unit lower; 2x2 D region has L = I
    for (int j = 0; j < n_; ++j) {
      const int start = blk_[j] == 2 ? j + 2 : j + 1;
      const S xj = x[j];
      if (xj == S(0)) continue;
      for (int i = start; i < n_; ++i) x[i] -= packed_(i, j) * xj;
    }
  }
  void ldlt_solve_lt(std::vector<S>& x) const {
    for (int j = n_ - 1; j >= 0; --j) {
      const int start = blk_[j] == 2 ? j + 2 : j + 1;
      S s = x[j];
      for (int i = start; i < n_; ++i) s -= packed_(i, j) * x[i];
      x[j] = s;
    }
  }
  void ldlt_solve_d(std::vector<S>& x) const {
    int k = 0;
    while (k < n_) {
      if (blk_[k] == 1) {
        x[k] /= packed_(k, k);
        k += 1;
      } else {
        const S d11 = packed_(k, k), d21 = packed_(k + 1, k), d22 = packed_(k + 1, k + 1);
        const S det = d11 * d22 - d21 * d21;
        const S b1 = x[k], b2 = x[k + 1];
        x[k] = (d22 * b1 - d21 * b2) / det;
        x[k + 1] = (-d21 * b1 + d11 * b2) / det;
        k += 2;
      }
    }
  }
  void ldlt_apply_l(std::vector<S>& x) const {
    for (int i = n_ - 1; i >= 0; --i) {
      S s = x[i];
      for (int j = 0; j < i; ++j) {
        const int start = blk_[j] == 2 ? j + 2 : j + 1;
        if (i >= start) s += packed_(i, j) * x[j];
      }
      x[i] = s;
    }
  }
  void ldlt_apply_lt(std::vector<S>& x) const {
    for (int j = 0; j < n_; ++j) {
      S s = x[j];
      const int start = blk_[j] == 2 ? j + 2 : j + 1;
      for (int i = start; i < n_; ++i) s += packed_(i, j) * x[i];
      x[j] = s;
    }
  }
  void ldlt_apply_d(std::vector<S>& x) const {
    int k = 0;
    while (k < n_) {
      if (blk_[k] == 1) {
        x[k] *= packed_(k, k);
        k += 1;
      } else {
        const S d11 = packed_(k, k), d21 = packed_(k + 1, k), d22 = packed_(k + 1, k + 1);
        const S b1 = x[k], b2 = x[k + 1];
        x[k] = d11 * b1 + d21 * b2;
        x[k + 1] = d21 * b1 + d22 * b2;
        k += 2;
      }
    }
  }
};

/// Factor a square dense block (pivoted LU, or pivoted LDL^T when symmetric).
template <class S>
BlockFactor<S> factor_block(const DenseMatrix<S>& b, bool symmetric) {
  return BlockFactor<S>::factor(b, symmetric);
}

}  // namespace hifie
