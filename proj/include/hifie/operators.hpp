#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hifie/factor.hpp"
#include "hifie/fft.hpp"
#include "hifie/problem.hpp"

namespace hifie {

/// Uniform handle over A, F, F^{-1}, differences: apply and adjoint-apply maps.
template <class S>
struct LinearOperator {
  long long n = 0;
  std::string label;
  std::function<std::vector<S>(const std::vector<S>&)> apply;
  std::function<std::vector<S>(const std::vector<S>&)> apply_adjoint;

  std::vector<S> operator()(const std::vector<S>& x) const { return apply(x); }
};

/// Exact A*x by on-demand entry generation, O(N^2) per product; rows are
/// accumulated in extended precision. Guarded by a size cap.
template <class S>
LinearOperator<S> dense_matvec_operator(const KernelProblem<S>& prob, long long cap = 65536) {
  const long long n = prob.points.count;
  if (n > cap)
    throw CapExceeded("dense matvec: N = " + std::to_string(n) + " exceeds cap " +
                      std::to_string(cap));
  auto mv = [&prob, n](const std::vector<S>& x, bool adj) {
    if ((long long)x.size() != n) throw DimensionMismatch("dense matvec length");
    using W = std::conditional_t<is_complex_v<S>, std::complex<long double>, long double>;
    std::vector<S> y(n);
    for (long long i = 0; i < n; ++i) {
      W acc = W(0);
      for (long long j = 0; j < n; ++j) {
        const S e = adj ? conj_of(prob.entry(int(j), int(i))) : prob.entry(int(i), int(j));
        acc += W(e) * W(x[j]);
      }
      y[i] = S(acc);
    }
    return y;
  };
  LinearOperator<S> op;
  op.n = n;
  op.label = "dense(A)";
  op.apply = [mv](const std::vector<S>& x) { return mv(x, false); };
  op.apply_adjoint = [mv](const std::vector<S>& x) { return mv(x, true); };
  return op;
}

namespace detail {

/// Circulant-embedded convolution with the kernel column of a
/// translation-invariant problem on a uniform grid.
template <class S>
class FftConvolution {
 public:
  explicit FftConvolution(const KernelProblem<S>& prob) : prob_(&prob) {
    const int d = prob.spec.dim;
    const int n = prob.spec.n;
    dims_.assign(d, next_pow2(2 * n - 1));
    total_ = 1;
    for (int v : dims_) total_ *= v;
    // kernel tensor over lags in (-n, n), wrapped into the embedding
    std::vector<std::complex<double>> t(total_, 0.0);
    const double hd = prob.points.element_measure();
    const double h = prob.spec.h();
    std::vector<int> lag(d, 0);
    const long long lags = [&] {
      long long p = 1;
      for (int a = 0; a < d; ++a) p *= 2 * n - 1;
      return p;
    }();
    for (long long li = 0; li < lags; ++li) {
      long long r = li;
      double r2 = 0;
      long long pos = 0, stride = 1;
      for (int a = 0; a < d; ++a) {
        const int la = int(r % (2 * n - 1)) - (n - 1);
        r /= 2 * n - 1;
        lag[a] = la;
        r2 += double(la) * la;
        pos += ((la + dims_[a]) % dims_[a]) * stride;
        stride *= dims_[a];
      }
      std::complex<double> v;
      if (r2 == 0)
        v = to_complex(prob.diag);
      else
        v = to_complex(prob.kernel_r(std::sqrt(r2) * h) * S(hd));
      t[pos] = v;
    }
    fft_nd(t, dims_, false);
    khat_ = std::move(t);
  }

  /// y = conv(x) over the n^d grid (x length N).
  std::vector<S> convolve(const std::vector<S>& x) const {
    const int d = prob_->spec.dim;
    const int n = prob_->spec.n;
    std::vector<std::complex<double>> buf(total_, 0.0);
    const long long N = prob_->points.count;
    for (long long i = 0; i < N; ++i) {
      long long r = i, pos = 0, stride = 1;
      for (int a = 0; a < d; ++a) {
        pos += (r % n) * stride;
        r /= n;
        stride *= dims_[a];
      }
      buf[pos] = to_complex(x[i]);
    }
    fft_nd(buf, dims_, false);
    for (long long i = 0; i < total_; ++i) buf[i] *= khat_[i];
    fft_nd(buf, dims_, true);
    std::vector<S> y(N);
    for (long long i = 0; i < N; ++i) {
      long long r = i, pos = 0, stride = 1;
      for (int a = 0; a < d; ++a) {
        pos += (r % n) * stride;
        r /= n;
        stride *= dims_[a];
      }
      y[i] = from_complex(buf[pos]);
    }
    return y;
  }

 private:
  static std::complex<double> to_complex(S v) {
    if constexpr (is_complex_v<S>)
      return v;
    else
      return {v, 0.0};
  }
  static S from_complex(std::complex<double> v) {
    if constexpr (is_complex_v<S>)
      return v;
    else
      return v.real();
  }

  const KernelProblem<S>* prob_;
  std::vector<int> dims_;
  long long total_ = 1;
  std::vector<std::complex<double>> khat_;
};

}  // namespace detail

/// A*x = a o x + b o conv(c o x) using fast Fourier convolution; exact to
/// roundoff for translation-invariant kernels on the uniform grid.
template <class S>
LinearOperator<S> fft_matvec_operator(const KernelProblem<S>& prob) {
  if (!prob.translation_invariant)
    throw NotTranslationInvariant("fft matvec requires a translation-invariant kernel");
  auto conv = std::make_shared<detail::FftConvolution<S>>(prob);
  const KernelProblem<S>* p = &prob;
  const long long n = prob.points.count;
  LinearOperator<S> op;
  op.n = n;
  op.label = "fft(A)";
  op.apply = [conv, p, n](const std::vector<S>& x) {
    if ((long long)x.size() != n) throw DimensionMismatch("fft matvec length");
    std::vector<S> t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) t[i] = p->c[i] * x[i];
    t = conv->convolve(t);
    for (std::size_t i = 0; i < x.size(); ++i) t[i] = p->a[i] * x[i] + p->b[i] * t[i];
    return t;
  };
  op.apply_adjoint = [conv, p, n](const std::vector<S>& x) {
    if ((long long)x.size() != n) throw DimensionMismatch("fft matvec length");
    // A^* x = conj(a) o x + conj(c) o conj(conv(b o conj(x)))
    std::vector<S> t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) t[i] = p->b[i] * conj_of(x[i]);
    t = conv->convolve(t);
    for (std::size_t i = 0; i < x.size(); ++i)
      t[i] = conj_of(p->a[i]) * x[i] + conj_of(p->c[i]) * conj_of(t[i]);
    return t;
  };
  return op;
}

/// Either matvec oracle by name; prefers the FFT path when legal.
template <class S>
LinearOperator<S> oracle_operator(const KernelProblem<S>& prob, const std::string& mode,
                                  long long dense_cap = 65536) {
  if (mode == "fft") return fft_matvec_operator(prob);
  if (mode == "dense") return dense_matvec_operator(prob, dense_cap);
  throw ConfigError("unknown oracle mode: " + mode);
}

template <class S>
LinearOperator<S> factor_apply_operator(const Factorization<S>& f) {
  LinearOperator<S> op;
  op.n = f.n_total;
  op.label = "F";
  op.apply = [&f](const std::vector<S>& x) { return f.apply(x); };
  op.apply_adjoint = [&f](const std::vector<S>& x) { return f.apply_adjoint(x); };
  return op;
}

template <class S>
LinearOperator<S> factor_solve_operator(const Factorization<S>& f) {
  LinearOperator<S> op;
  op.n = f.n_total;
  op.label = "Finv";
  op.apply = [&f](const std::vector<S>& x) { return f.solve(x); };
  op.apply_adjoint = [&f](const std::vector<S>& x) { return f.solve_adjoint(x); };
  return op;
}

template <class S>
LinearOperator<S> difference_operator(const LinearOperator<S>& a, const LinearOperator<S>& b) {
  if (a.n != b.n) throw DimensionMismatch("difference_operator");
  LinearOperator<S> op;
  op.n = a.n;
  op.label = a.label + "-" + b.label;
  op.apply = [a, b](const std::vector<S>& x) {
    auto ya = a.apply(x);
    const auto yb = b.apply(x);
    for (std::size_t i = 0; i < ya.size(); ++i) ya[i] -= yb[i];
    return ya;
  };
  op.apply_adjoint = [a, b](const std::vector<S>& x) {
    auto ya = a.apply_adjoint(x);
    const auto yb = b.apply_adjoint(x);
    for (std::size_t i = 0; i < ya.size(); ++i) ya[i] -= yb[i];
    return ya;
  };
  return op;
}

}  // namespace hifie
