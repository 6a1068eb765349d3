#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "hifie/dense.hpp"
#include "hifie/grid.hpp"
#include "hifie/kernels.hpp"
#include "hifie/sci.hpp"

namespace hifie {

/// Discretized integral operator a_i u_i + b_i sum_j K_ij c_j u_j on a
/// uniform grid: every matrix entry is generated on demand. Off-diagonal
/// entries use the one-point rule K(||x_i - x_j||) h^d; the diagonal entry
/// adds the adaptive quadrature of the kernel over one element.
template <class S>
struct KernelProblem {
  KernelKind kind = KernelKind::laplace2d;
  double wave_k = 0;
  GridSpec spec;
  PointSet points;
  std::vector<S> a, b, c;
  bool symmetric = false;             // A equals its conjugation-free transpose
  bool translation_invariant = true;  // kernel part depends on the lag only
  S diag = S(0);                      // cached element quadrature of K

  int size() const { return int(points.count); }

  S kernel_r(double r) const { return kernel_eval<S>(kind, wave_k, r); }

  S entry(int i, int j) const {
    if (i == j) return a[i] + b[i] * diag * c[i];
    const double r = points.dist(i, j);
    return b[i] * kernel_r(r) * S(points.element_measure()) * c[j];
  }
};

template <class S>
using CoefficientField = std::function<S(const std::array<double, 3>&)>;

template <class S>
KernelProblem<S> make_kernel_problem(KernelKind kind, const GridSpec& spec,
                                     const CoefficientField<S>& fa, const CoefficientField<S>& fb,
                                     const CoefficientField<S>& fc, double wave_k = 0,
                                     double quad_tol = 1e-12) {
  if (kind == KernelKind::helmholtz2d && !is_complex_v<S>)
    throw InvalidSpec("helmholtz problem requires complex scalars");
  if ((kind == KernelKind::laplace3d) != (spec.dim == 3))
    throw DimensionMismatch("kernel kind does not match grid dimension");
  KernelProblem<S> p;
  p.kind = kind;
  p.wave_k = wave_k;
  p.spec = spec;
  p.points = build_uniform_grid(spec);
  const int n = p.size();
  p.a.resize(n);
  p.b.resize(n);
  p.c.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto x = p.points.point(i);
    p.a[i] = fa(x);
    p.b[i] = fb(x);
    p.c[i] = fc(x);
  }
  p.symmetric = std::equal(p.b.begin(), p.b.end(), p.c.begin());
  p.diag = diag_quadrature<S>(kind, wave_k, spec.h(), spec.dim, quad_tol);
  return p;
}

/// Volume IE on the unit square/cube with b = c = 1 and constant a
/// (a = 0: first kind, a = 1: second kind).
inline KernelProblem<double> laplace_volume_problem(const GridSpec& spec, double a_const) {
  const KernelKind kind = spec.dim == 2 ? KernelKind::laplace2d : KernelKind::laplace3d;
  auto one = [](const std::array<double, 3>&) { return 1.0; };
  auto ca = [a_const](const std::array<double, 3>&) { return a_const; };
  return make_kernel_problem<double>(kind, spec, ca, one, one);
}

/// Symmetrized Lippmann-Schwinger scattering problem: a = 1 and
/// b = c = k sqrt(omega) with omega a Gaussian bump at x0, k = 2 pi kappa.
inline KernelProblem<std::complex<double>> lippmann_schwinger_problem(
    double kappa, const GridSpec& spec, std::array<double, 3> x0 = {0.5, 0.5, 0}) {
  using C = std::complex<double>;
  if (spec.dim != 2) throw DimensionMismatch("lippmann_schwinger_problem is 2D");
  const double k = 2.0 * M_PI * kappa;
  auto one = [](const std::array<double, 3>&) { return C(1.0); };
  auto bump = [k, x0](const std::array<double, 3>& x) {
    double d2 = 0;
    for (int a = 0; a < 2; ++a) d2 += (x[a] - x0[a]) * (x[a] - x0[a]);
    return C(k * std::sqrt(std::exp(-32.0 * d2)));
  };
  return make_kernel_problem<C>(KernelKind::helmholtz2d, spec, one, bump, bump, k);
}

/// Block of the level matrix over rows p and columns q: kernel entries plus
/// all overlapping SCI deltas. When `mask` is given it marks delta entries.
template <class S>
DenseMatrix<S> assemble_block(const KernelProblem<S>& prob, const std::vector<int>& p,
                              const std::vector<int>& q, const SciStore<S>* sci = nullptr,
                              std::vector<std::uint8_t>* mask = nullptr) {
  DenseMatrix<S> m(int(p.size()), int(q.size()));
  if (mask) mask->assign(m.size(), 0);
  for (int j = 0; j < m.cols(); ++j) {
    S* col = m.col(j);
    const int qj = q[j];
    for (int i = 0; i < m.rows(); ++i) col[i] = prob.entry(p[i], qj);
  }
  if (sci) sci->overlay(m, p, q, mask);
  return m;
}

}  // namespace hifie
