#pragma once

#include <cmath>
#include <cstdint>

#include "hifie/operators.hpp"

namespace hifie {

struct ErrorEstimate {
  double value = 0;
  int iterations = 0;
  bool converged = false;
};

/// Power iteration on op* op with a standard uniform random start vector;
/// converges at 1e-2 relative precision in the matrix norm.
template <class S>
ErrorEstimate operator_norm_estimate(const LinearOperator<S>& op, std::uint64_t seed,
                                     double rel_tol = 1e-2, int maxit = 300) {
  ErrorEstimate est;
  RandomStream rng(seed);
  std::vector<S> v = rng.uniform_vector<S>(int(op.n));
  double nv = vec_norm(v);
  if (nv == 0) return est;
  for (auto& x : v) x *= S(1.0 / nv);
  double prev = -1;
  for (int it = 1; it <= maxit; ++it) {
    std::vector<S> w = op.apply(v);
    const double s = vec_norm(w);
    est.iterations = it;
    if (s == 0) {
      est.value = 0;
      est.converged = true;
      return est;
    }
    v = op.apply_adjoint(w);
    nv = vec_norm(v);
    if (nv == 0) {
      est.value = s;
      est.converged = true;
      return est;
    }
    for (auto& x : v) x *= S(1.0 / nv);
    est.value = s;
    if (prev >= 0 && std::abs(s - prev) <= rel_tol * s) {
      est.converged = true;
      return est;
    }
    prev = s;
  }
  return est;
}

/// e_a: a posteriori estimate of ||A - F|| / ||A|| by power iteration on the
/// difference operator and on A itself.
template <class S>
ErrorEstimate estimate_forward_error(const LinearOperator<S>& op_a, const Factorization<S>& f,
                                     std::uint64_t seed = 7001) {
  const auto diff = difference_operator(op_a, factor_apply_operator(f));
  ErrorEstimate top = operator_norm_estimate(diff, seed);
  const ErrorEstimate bottom = operator_norm_estimate(op_a, seed + 1);
  if (bottom.value > 0) top.value /= bottom.value;
  top.converged = top.converged && bottom.converged;
  top.iterations += bottom.iterations;
  return top;
}

/// e_s: estimate of ||I - A F^{-1}|| via x -> x - A solve(F, x).
template <class S>
ErrorEstimate estimate_inverse_error(const LinearOperator<S>& op_a, const Factorization<S>& f,
                                     std::uint64_t seed = 7002) {
  LinearOperator<S> op;
  op.n = op_a.n;
  op.label = "I-A*Finv";
  const LinearOperator<S>* pa = &op_a;
  const Factorization<S>* pf = &f;
  op.apply = [pa, pf](const std::vector<S>& x) {
    auto y = pa->apply(pf->solve(x));
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - y[i];
    return y;
  };
  op.apply_adjoint = [pa, pf](const std::vector<S>& x) {
    auto y = pf->solve_adjoint(pa->apply_adjoint(x));
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - y[i];
    return y;
  };
  return operator_norm_estimate(op, seed);
}

}  // namespace hifie
