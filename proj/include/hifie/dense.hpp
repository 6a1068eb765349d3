#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <type_traits>
#include <vector>

#include "hifie/errors.hpp"

namespace hifie {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class S>
struct scalar_traits {
  using real_type = S;
  static S conj(S x) { return x; }
  static real_type abs(S x) { return std::abs(x); }
  static real_type real(S x) { return x; }
};
template <class T>
struct scalar_traits<std::complex<T>> {
  using real_type = T;
  static std::complex<T> conj(std::complex<T> x) { return std::conj(x); }
  static T abs(std::complex<T> x) { return std::abs(x); }
  static T real(std::complex<T> x) { return x.real(); }
};

template <class S>
using real_t = typename scalar_traits<S>::real_type;

template <class S>
inline S conj_of(S x) {
  return scalar_traits<S>::conj(x);
}
template <class S>
inline real_t<S> abs_of(S x) {
  return scalar_traits<S>::abs(x);
}

/// Dense column-major matrix over real or complex double precision.
template <class S>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, S(0)) {
    assert(rows >= 0 && cols >= 0);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  S& operator()(int i, int j) { return data_[std::size_t(j) * rows_ + i]; }
  const S& operator()(int i, int j) const { return data_[std::size_t(j) * rows_ + i]; }

  S* col(int j) { return data_.data() + std::size_t(j) * rows_; }
  const S* col(int j) const { return data_.data() + std::size_t(j) * rows_; }

  S* data() { return data_.data(); }
  const S* data() const { return data_.data(); }
  std::size_t size() const { return data_.size(); }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (int j = 0; j < cols_; ++j)
      for (int i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
  }

  DenseMatrix conj_transposed() const {
    DenseMatrix t(cols_, rows_);
    for (int j = 0; j < cols_; ++j)
      for (int i = 0; i < rows_; ++i) t(j, i) = conj_of((*this)(i, j));
    return t;
  }

  /// Submatrix with the given row and column index lists.
  DenseMatrix gather(const std::vector<int>& ri, const std::vector<int>& ci) const {
    DenseMatrix g(int(ri.size()), int(ci.size()));
    for (int j = 0; j < g.cols(); ++j) {
      const S* src = col(ci[j]);
      S* dst = g.col(j);
      for (int i = 0; i < g.rows(); ++i) dst[i] = src[ri[i]];
    }
    return g;
  }

  DenseMatrix gather_cols(const std::vector<int>& ci) const {
    DenseMatrix g(rows_, int(ci.size()));
    for (int j = 0; j < g.cols(); ++j) std::copy_n(col(ci[j]), rows_, g.col(j));
    return g;
  }

  double frobenius_norm() const {
    double s = 0;
    for (const S& v : data_) s += double(abs_of(v)) * abs_of(v);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0;
    for (const S& v : data_) m = std::max(m, double(abs_of(v)));
    return m;
  }

  bool all_finite() const {
    for (const S& v : data_)
      if (!std::isfinite(double(abs_of(v)))) return false;
    return true;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<S> data_;
};

// ---- small vector helpers ----------------------------------------------

template <class S>
inline double vec_norm(const std::vector<S>& v) {
  double s = 0;
  for (const S& x : v) s += double(abs_of(x)) * abs_of(x);
  return std::sqrt(s);
}

template <class S>
inline S vec_dot(const std::vector<S>& a, const std::vector<S>& b) {
  assert(a.size() == b.size());
  S s = S(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += conj_of(a[i]) * b[i];
  return s;
}

template <class S>
inline void vec_scale(std::vector<S>& v, S alpha) {
  for (S& x : v) x *= alpha;
}

template <class S>
inline void vec_axpy(std::vector<S>& y, S alpha, const std::vector<S>& x) {
  assert(y.size() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// ---- matrix products -----------------------------------------------------
// op codes: 'N' = as-is, 'T' = transpose, 'C' = conjugate transpose.

template <class S>
inline std::pair<int, int> op_shape(char op, const DenseMatrix<S>& a) {
  return op == 'N' ? std::make_pair(a.rows(), a.cols()) : std::make_pair(a.cols(), a.rows());
}

/// C = opA(A) * opB(B).
template <class S>
DenseMatrix<S> matmul(char opa, const DenseMatrix<S>& a, char opb, const DenseMatrix<S>& b) {
  auto [m, ka] = op_shape(opa, a);
  auto [kb, n] = op_shape(opb, b);
  assert(ka == kb);
  (void)kb;
  DenseMatrix<S> c(m, n);
  if (a.empty() || b.empty()) return c;

  auto aval = [&](int i, int k) -> S {
    if (opa == 'N') return a(i, k);
    S v = a(k, i);
    return opa == 'C' ? conj_of(v) : v;
  };

  if (opa == 'N' && opb == 'N') {
    for (int j = 0; j < n; ++j) {
      S* cj = c.col(j);
      for (int k = 0; k < ka; ++k) {
        const S bkj = b(k, j);
        if (bkj == S(0)) continue;
        const S* ak = a.col(k);
        for (int i = 0; i < m; ++i) cj[i] += ak[i] * bkj;
      }
    }
  } else if (opa != 'N' && opb == 'N') {
    // (A^T or A^H) * B: dot products down columns, cache friendly.
    for (int j = 0; j < n; ++j) {
      const S* bj = b.col(j);
      S* cj = c.col(j);
      for (int i = 0; i < m; ++i) {
        const S* ai = a.col(i);
        S s = S(0);
        if (opa == 'C') {
          for (int k = 0; k < ka; ++k) s += conj_of(ai[k]) * bj[k];
        } else {
          for (int k = 0; k < ka; ++k) s += ai[k] * bj[k];
        }
        cj[i] = s;
      }
    }
  } else {
    // opB != 'N': fall back through an explicit transpose of B.
    DenseMatrix<S> bt = (opb == 'C') ? b.conj_transposed() : b.transposed();
    return matmul(opa, a, 'N', bt);
  }
  return c;
}

template <class S>
DenseMatrix<S> matmul(const DenseMatrix<S>& a, const DenseMatrix<S>& b) {
  return matmul('N', a, 'N', b);
}

/// y = opA(A) * x.
template <class S>
std::vector<S> matvec(char opa, const DenseMatrix<S>& a, const std::vector<S>& x) {
  auto [m, k] = op_shape(opa, a);
  assert(int(x.size()) == k);
  std::vector<S> y(m, S(0));
  if (opa == 'N') {
    for (int j = 0; j < k; ++j) {
      const S xj = x[j];
      if (xj == S(0)) continue;
      const S* aj = a.col(j);
      for (int i = 0; i < m; ++i) y[i] += aj[i] * xj;
    }
  } else {
    for (int i = 0; i < m; ++i) {
      const S* ai = a.col(i);
      S s = S(0);
      if (opa == 'C') {
        for (int j = 0; j < k; ++j) s += conj_of(ai[j]) * x[j];
      } else {
        for (int j = 0; j < k; ++j) s += ai[j] * x[j];
      }
      y[i] = s;
    }
  }
  return y;
}

template <class S>
void mat_add_scaled(DenseMatrix<S>& a, S alpha, const DenseMatrix<S>& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] += alpha * b.data()[i];
}

// ---- portable deterministic random streams --------------------------------
// Mapped from raw mt19937_64 output so the value sequence does not depend on
// the standard library's distribution implementations.

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // in (0, 1)
    return (double(eng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  template <class S>
  std::vector<S> uniform_vector(int n) {
    std::vector<S> v(n);
    for (auto& x : v) {
      if constexpr (is_complex_v<S>)
        x = S(uniform(), uniform());
      else
        x = uniform();
    }
    return v;
  }

  template <class S>
  std::vector<S> normal_vector(int n) {
    std::vector<S> v(n);
    for (auto& x : v) {
      if constexpr (is_complex_v<S>)
        x = S(normal(), normal());
      else
        x = normal();
    }
    return v;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0;
};

// ---- spectral norm estimate ------------------------------------------------

/// Power iteration on M*M: estimate of ||M||_2 within a factor of 2
/// (1e-2 relative convergence, at most 100 iterations). Zero matrix gives 0.
template <class S>
double two_norm_estimate(const DenseMatrix<S>& m) {
  if (m.empty() || m.max_abs() == 0) return 0;
  RandomStream rng(0x5eed2a0912ULL ^ (std::uint64_t(m.rows()) << 20) ^ std::uint64_t(m.cols()));
  std::vector<S> v = rng.uniform_vector<S>(m.cols());
  double nv = vec_norm(v);
  for (auto& x : v) x *= S(1.0 / nv);
  double sigma = 0;
  for (int it = 0; it < 100; ++it) {
    std::vector<S> w = matvec('N', m, v);
    const double s = vec_norm(w);
    if (s == 0) return 0;
    v = matvec('C', m, w);
    const double nv2 = vec_norm(v);
    if (nv2 == 0) return s;
    for (auto& x : v) x *= S(1.0 / nv2);
    if (it > 0 && std::abs(s - sigma) <= 1e-2 * s) return s;
    sigma = s;
  }
  return sigma;
}

}  // namespace hifie
