#pragma once

// Test-only reference implementations, kept independent of the library's
// production paths: one-sided Jacobi SVD, composite tensor-Gauss quadrature,
// Bessel functions from their integral representations, and a dense
// skeletonization oracle that carries out the elimination with explicit
// full-size matrix products.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "hifie/dense.hpp"
#include "hifie/factor.hpp"

namespace oracles {

using hifie::DenseMatrix;

// ---- one-sided Jacobi SVD: singular values only ----------------------------

template <class S>
std::vector<double> singular_values(DenseMatrix<S> a) {
  const int m = a.rows(), n = a.cols();
  if (m < n) a = a.conj_transposed();
  const int rows = a.rows(), cols = a.cols();
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0, diagmax = 0;
    for (int p = 0; p < cols - 1; ++p)
      for (int q = p + 1; q < cols; ++q) {
        S apq = S(0);
        double app = 0, aqq = 0;
        for (int i = 0; i < rows; ++i) {
          apq += hifie::conj_of(a(i, p)) * a(i, q);
          app += double(hifie::abs_of(a(i, p))) * hifie::abs_of(a(i, p));
          aqq += double(hifie::abs_of(a(i, q))) * hifie::abs_of(a(i, q));
        }
        off = std::max(off, double(hifie::abs_of(apq)));
        diagmax = std::max({diagmax, app, aqq});
        if (hifie::abs_of(apq) <= 1e-15 * std::sqrt(app * aqq) || app * aqq == 0) continue;
        // complex Jacobi rotation zeroing the (p,q) Gram entry
        const double tau = (aqq - app) / (2.0 * hifie::abs_of(apq));
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const S phase = apq * S(1.0 / hifie::abs_of(apq));
        for (int i = 0; i < rows; ++i) {
          const S vp = a(i, p), vq = a(i, q);
          a(i, p) = S(c) * vp - S(s) * phase * vq;
          a(i, q) = S(c) * vq + S(s) * hifie::conj_of(phase) * vp;
        }
      }
    if (off <= 1e-14 * std::sqrt(std::max(diagmax, 1e-300))) break;
  }
  std::vector<double> sv(cols);
  for (int j = 0; j < cols; ++j) {
    double s = 0;
    for (int i = 0; i < rows; ++i) s += double(hifie::abs_of(a(i, j))) * hifie::abs_of(a(i, j));
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.rbegin(), sv.rend());
  return sv;
}

template <class S>
int numerical_rank(const DenseMatrix<S>& a, double rel_tol) {
  const auto sv = singular_values(a);
  if (sv.empty() || sv[0] == 0) return 0;
  int r = 0;
  for (double s : sv)
    if (s > rel_tol * sv[0]) ++r;
  return r;
}

// ---- composite tensor-Gauss reference quadrature ----------------------------
// Integral of f over the box [-h/2, h/2]^d with a singularity at the origin:
// dyadic shells graded toward the center, fixed 16-point Gauss per piece per
// axis, refined level count chosen so successive refinements agree to 1e-12.

inline const std::vector<double>& gl16_nodes() {
  static const std::vector<double> x = {
      -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
      -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
      0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
      0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
  return x;
}
inline const std::vector<double>& gl16_weights() {
  static const std::vector<double> w = {
      0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
      0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
      0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
      0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
  return w;
}

template <class F, class S>
S gl16_box(const F& f, const std::vector<double>& lo, const std::vector<double>& hi, int d) {
  const auto& xs = gl16_nodes();
  const auto& ws = gl16_weights();
  S total = S(0);
  std::array<double, 3> y{0, 0, 0};
  if (d == 2) {
    for (int i = 0; i < 16; ++i) {
      y[0] = 0.5 * (lo[0] + hi[0]) + 0.5 * (hi[0] - lo[0]) * xs[i];
      for (int j = 0; j < 16; ++j) {
        y[1] = 0.5 * (lo[1] + hi[1]) + 0.5 * (hi[1] - lo[1]) * xs[j];
        total += S(ws[i] * ws[j]) * f(y);
      }
    }
    return total * S(0.25 * (hi[0] - lo[0]) * (hi[1] - lo[1]));
  }
  for (int i = 0; i < 16; ++i) {
    y[0] = 0.5 * (lo[0] + hi[0]) + 0.5 * (hi[0] - lo[0]) * xs[i];
    for (int j = 0; j < 16; ++j) {
      y[1] = 0.5 * (lo[1] + hi[1]) + 0.5 * (hi[1] - lo[1]) * xs[j];
      for (int k = 0; k < 16; ++k) {
        y[2] = 0.5 * (lo[2] + hi[2]) + 0.5 * (hi[2] - lo[2]) * xs[k];
        total += S(ws[i] * ws[j] * ws[k]) * f(y);
      }
    }
  }
  return total * S(0.125 * (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]));
}

template <class F, class S>
S reference_singular_quadrature(const F& f, double h, int d, int levels) {
  // one corner quadrant [0, h/2]^d scaled by 2^d, shells graded dyadically
  S total = S(0);
  double s = 0.5 * h;
  for (int j = 0; j < levels; ++j) {
    const int nb = 1 << d;
    for (int q = 1; q < nb; ++q) {
      std::vector<double> lo(d), hi(d);
      for (int a = 0; a < d; ++a) {
        if ((q >> a) & 1) {
          lo[a] = 0.5 * s;
          hi[a] = s;
        } else {
          lo[a] = 0;
          hi[a] = 0.5 * s;
        }
      }
      total += gl16_box<F, S>(f, lo, hi, d);
    }
    s *= 0.5;
  }
  return total * S(1 << d);
}

// ---- Bessel functions from integral representations -------------------------

inline double composite_gl16(const std::function<double(double)>& f, double a, double b,
                             int panels) {
  const auto& xs = gl16_nodes();
  const auto& ws = gl16_weights();
  double total = 0;
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * w;
    for (int i = 0; i < 16; ++i) total += 0.5 * w * ws[i] * f(lo + 0.5 * w * (1.0 + xs[i]));
  }
  return total;
}

inline double j0_oracle(double x) {
  const int panels = 8 + int(x);
  return composite_gl16([x](double th) { return std::cos(x * std::sin(th)); }, 0, M_PI, panels) /
         M_PI;
}

inline double y0_oracle(double x) {
  const int panels = 8 + int(x);
  const double osc =
      composite_gl16([x](double th) { return std::sin(x * std::sin(th)); }, 0, M_PI, panels) /
      M_PI;
  const double tmax = std::asinh(745.0 / x);
  const double tail = composite_gl16([x](double t) { return std::exp(-x * std::sinh(t)); }, 0,
                                     tmax, 8 + int(4 * tmax)) *
                      2.0 / M_PI;
  return osc - tail;
}

// ---- dense skeletonization oracle -------------------------------------------
// Carry out one application of the elimination with explicit N x N operators:
// given a record (T, B factors, couplings) over global indices, build the
// elementary matrices and return Q^H A Q and the eliminated middle matrix.

template <class S>
DenseMatrix<S> identity(int n) {
  DenseMatrix<S> i(n, n);
  for (int k = 0; k < n; ++k) i(k, k) = S(1);
  return i;
}

/// Explicit level elimination with dense N x N products, including the
/// intermediate truncation step that enforces sparsity. Returns the middle
/// matrix; when `truncated_mass` is given, it receives the largest entry
/// magnitude discarded by the truncation (the ID error).
template <class S>
DenseMatrix<S> dense_eliminate_level(const DenseMatrix<S>& a,
                                     const std::vector<hifie::SkelRecord<S>>& records,
                                     bool symmetric, double* truncated_mass = nullptr) {
  const int n = a.rows();
  DenseMatrix<S> m = a;
  double trunc = 0;
  for (const auto& r : records) {
    if (r.rd.empty()) continue;
    // Q: identity with -T at the (sk, rd) block
    DenseMatrix<S> q = identity<S>(n);
    for (int j = 0; j < int(r.rd.size()); ++j)
      for (int i = 0; i < int(r.sk.size()); ++i) q(r.sk[i], r.rd[j]) -= r.T(i, j);
    DenseMatrix<S> qh = symmetric ? q.transposed() : q.conj_transposed();
    m = hifie::matmul(qh, hifie::matmul(m, q));

    // truncation: sparsify (rd, exterior) and (exterior, rd) explicitly
    std::vector<std::uint8_t> in_cluster(n, 0);
    for (int g : r.sk) in_cluster[g] = 1;
    for (int g : r.rd) in_cluster[g] = 1;
    for (int rdof : r.rd)
      for (int j = 0; j < n; ++j) {
        if (!in_cluster[j]) {
          trunc = std::max({trunc, double(hifie::abs_of(m(rdof, j))),
                            double(hifie::abs_of(m(j, rdof)))});
          m(rdof, j) = S(0);
          m(j, rdof) = S(0);
        }
      }

    if (r.sk.empty()) continue;
    // elimination operators from the stored factor and couplings
    DenseMatrix<S> cup = symmetric ? r.couple_dn.transposed() : r.couple_up;
    DenseMatrix<S> binv_cup = cup;  // Brr^{-1} B_rd,sk
    r.rd_factor.solve_mat(binv_cup);
    DenseMatrix<S> s_elim = identity<S>(n);
    for (int j = 0; j < int(r.sk.size()); ++j)
      for (int i = 0; i < int(r.rd.size()); ++i) s_elim(r.rd[i], r.sk[j]) -= binv_cup(i, j);
    DenseMatrix<S> cdn_binv;  // B_sk,rd Brr^{-1}
    if (symmetric) {
      cdn_binv = binv_cup.transposed();
    } else {
      DenseMatrix<S> t = r.couple_dn.conj_transposed();
      for (int j = 0; j < t.cols(); ++j) {
        std::vector<S> col(t.rows());
        std::copy_n(t.col(j), t.rows(), col.begin());
        r.rd_factor.solve_adjoint(col);
        std::copy_n(col.begin(), t.rows(), t.col(j));
      }
      cdn_binv = t.conj_transposed();
    }
    DenseMatrix<S> r_elim = identity<S>(n);  // stores R~^H directly
    for (int j = 0; j < int(r.rd.size()); ++j)
      for (int i = 0; i < int(r.sk.size()); ++i) r_elim(r.sk[i], r.rd[j]) -= cdn_binv(i, j);
    m = hifie::matmul(r_elim, hifie::matmul(m, s_elim));
  }
  if (truncated_mass) *truncated_mass = trunc;
  return m;
}

}  // namespace oracles
