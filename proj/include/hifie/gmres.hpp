#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "hifie/operators.hpp"

namespace hifie {

template <class S>
struct GmresResult {
  std::vector<S> x;               // solution (partial when not converged)
  int iterations = 0;             // n_i
  std::vector<double> residuals;  // relative residual after each iteration
  bool converged = false;
};

/// Full-memory GMRES with modified Gram-Schmidt and one reorthogonalization
/// pass. With a preconditioner M the iteration is left-preconditioned: the
/// residual is measured as ||M(Ax - b)|| / ||M b||. Non-convergence returns
/// the partial solution with converged = false.
template <class S>
GmresResult<S> gmres(const LinearOperator<S>& op, const std::vector<S>& b, double tol, int maxit,
                     const std::function<std::vector<S>(const std::vector<S>&)>& precond = {}) {
  if (tol <= 0) throw InvalidSpec("gmres: tol must be positive");
  if ((long long)b.size() != op.n) throw DimensionMismatch("gmres rhs length");
  GmresResult<S> out;
  out.x.assign(b.size(), S(0));

  auto apply_m = [&](std::vector<S> v) { return precond ? precond(v) : v; };

  std::vector<S> r0 = apply_m(b);
  const double beta = vec_norm(r0);
  if (beta == 0) {
    out.converged = true;
    return out;
  }

  std::vector<std::vector<S>> basis;
  std::vector<std::vector<S>> hcols;  // rotated Hessenberg columns
  std::vector<double> cs;
  std::vector<S> sn, g;
  for (auto& v : r0) v *= S(1.0 / beta);
  basis.push_back(std::move(r0));
  g.push_back(S(beta));

  const int mmax = int(std::min<long long>(maxit, op.n));
  for (int k = 0; k < mmax; ++k) {
    std::vector<S> w = apply_m(op.apply(basis[k]));
    std::vector<S> h(std::size_t(k) + 2, S(0));
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= k; ++i) {
        const S hik = vec_dot(basis[i], w);
        h[i] += hik;
        vec_axpy(w, -hik, basis[i]);
      }
    }
    const double wn = vec_norm(w);
    h[k + 1] = S(wn);

    for (int i = 0; i < k; ++i) {
      const S t = S(cs[i]) * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -conj_of(sn[i]) * h[i] + S(cs[i]) * h[i + 1];
      h[i] = t;
    }
    // new rotation eliminating h[k+1] with real cosine
    {
      const double af = abs_of(h[k]), ag = abs_of(h[k + 1]);
      double c;
      S s;
      if (ag == 0) {
        c = 1;
        s = S(0);
      } else if (af == 0) {
        c = 0;
        s = S(1);
      } else {
        const double rho = std::sqrt(af * af + ag * ag);
        c = af / rho;
        s = (h[k] * S(1.0 / af)) * conj_of(h[k + 1]) * S(1.0 / rho);
      }
      h[k] = S(c) * h[k] + s * h[k + 1];
      h[k + 1] = S(0);
      cs.push_back(c);
      sn.push_back(s);
      g.push_back(-conj_of(s) * g[k]);
      g[k] = S(c) * g[k];
    }
    hcols.push_back(std::move(h));
    const double res = abs_of(g[k + 1]) / beta;
    out.residuals.push_back(res);
    out.iterations = k + 1;
    if (res <= tol) {
      out.converged = true;
      break;
    }
    if (wn == 0) break;  // breakdown: Krylov space exhausted
    for (auto& v : w) v *= S(1.0 / wn);
    basis.push_back(std::move(w));
  }

  // back substitution on the rotated Hessenberg system
  const int m = out.iterations;
  std::vector<S> y(m, S(0));
  for (int i = m - 1; i >= 0; --i) {
    S s = g[i];
    for (int j = i + 1; j < m; ++j) s -= hcols[j][i] * y[j];
    y[i] = s / hcols[i][i];
  }
  for (int i = 0; i < m; ++i) vec_axpy(out.x, y[i], basis[i]);
  return out;
}

}  // namespace hifie
