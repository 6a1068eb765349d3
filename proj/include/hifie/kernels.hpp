#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "hifie/errors.hpp"

namespace hifie {

enum class KernelKind : std::uint8_t { laplace2d = 0, laplace3d = 1, helmholtz2d = 2 };

inline const char* kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::laplace2d: return "laplace2d";
    case KernelKind::laplace3d: return "laplace3d";
    default: return "helmholtz2d";
  }
}

// ---- Bessel J0 / Y0 ---------------------------------------------------------
// Small arguments by ascending series; larger arguments by backward (Miller)
// recurrence with the Neumann series for Y0. Both branches agree to ~1e-14
// at the crossover and are validated against quadrature oracles in the tests.

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286060651209;

inline void bessel_j0y0_series(double x, double& j0, double& y0) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum_j = 1.0, sum_y = 0.0, harmonic = 0.0;
  for (int k = 1; k < 40; ++k) {
    term *= -q / (double(k) * k);
    sum_j += term;
    harmonic += 1.0 / k;
    sum_y += -term * harmonic;  // (-1)^{k+1} H_k q^k / (k!)^2
    if (std::abs(term) < 1e-18) break;
  }
  j0 = sum_j;
  y0 = (2.0 / M_PI) * ((std::log(0.5 * x) + kEulerGamma) * j0 + sum_y);
}

inline void bessel_j0y0_miller(double x, double& j0, double& y0) {
  int m = int(x + 24.0 + 12.0 * std::sqrt(x));
  m += m & 1;  // even start order
  std::vector<double> b(std::size_t(m) + 2, 0.0);
  b[m + 1] = 0.0;
  b[m] = 1e-250;
  for (int k = m; k >= 1; --k) {
    b[k - 1] = (2.0 * k / x) * b[k] - b[k + 1];
    if (std::abs(b[k - 1]) > 1e250) {
      for (int i = k - 1; i <= m + 1; ++i) b[i] *= 1e-250;
    }
  }
  double norm = b[0];
  for (int k = 2; k <= m; k += 2) norm += 2.0 * b[k];
  j0 = b[0] / norm;
  // Neumann series: Y0 = (2/pi)[(ln(x/2)+gamma) J0 - 2 sum (-1)^k J_{2k}/k]
  double s = 0.0;
  double sign = -1.0;
  for (int k = 1; 2 * k <= m; ++k) {
    s += sign * (b[2 * k] / norm) / k;
    sign = -sign;
  }
  y0 = (2.0 / M_PI) * ((std::log(0.5 * x) + kEulerGamma) * j0 - 2.0 * s);
}

}  // namespace detail

inline double bessel_j0(double x) {
  x = std::abs(x);
  double j0, y0;
  if (x == 0) return 1.0;
  if (x <= 2.0)
    detail::bessel_j0y0_series(x, j0, y0);
  else
    detail::bessel_j0y0_miller(x, j0, y0);
  return j0;
}

inline double bessel_y0(double x) {
  if (x <= 0) throw NonpositiveDistance("bessel_y0 requires x > 0");
  double j0, y0;
  if (x <= 2.0)
    detail::bessel_j0y0_series(x, j0, y0);
  else
    detail::bessel_j0y0_miller(x, j0, y0);
  return y0;
}

/// Zeroth-order Hankel function of the first kind, H0^(1)(x) = J0 + i Y0.
inline std::complex<double> hankel1_0(double x) {
  if (x <= 0) throw NonpositiveDistance("hankel1_0 requires x > 0");
  double j0, y0;
  if (x <= 2.0)
    detail::bessel_j0y0_series(x, j0, y0);
  else
    detail::bessel_j0y0_miller(x, j0, y0);
  return {j0, y0};
}

// ---- kernel values ----------------------------------------------------------

inline double laplace_kernel(int dim, double r) {
  if (r <= 0) throw NonpositiveDistance("laplace kernel at r <= 0");
  return dim == 2 ? -std::log(r) / (2.0 * M_PI) : 1.0 / (4.0 * M_PI * r);
}

inline std::complex<double> helmholtz2d_kernel(double k, double r) {
  if (r <= 0) throw NonpositiveDistance("helmholtz kernel at r <= 0");
  return std::complex<double>(0.0, 0.25) * hankel1_0(k * r);
}

/// Kernel value in the problem's scalar field. Laplace kernels are real;
/// Helmholtz requires a complex scalar.
template <class S>
inline S kernel_eval(KernelKind kind, double wave_k, double r) {
  if (kind == KernelKind::laplace2d) return S(laplace_kernel(2, r));
  if (kind == KernelKind::laplace3d) return S(laplace_kernel(3, r));
  if constexpr (std::is_same_v<S, std::complex<double>>) {
    return helmholtz2d_kernel(wave_k, r);
  } else {
    throw InvalidSpec("helmholtz kernel requires a complex scalar field");
  }
}

// ---- singular diagonal quadrature -------------------------------------------
// Integral of K(||y||) over the element [-h/2, h/2]^d. The box is symmetric
// and the kernel radial, so one corner-singular quadrant is integrated and
// scaled by 2^d. The quadrant is subdivided geometrically toward the corner;
// each shell panel is smooth and handled by adaptive tensor Gauss; the
// innermost panel terminates once its contribution bound drops below the
// tolerance share.

namespace detail {

// 8-point Gauss-Legendre nodes/weights on [0, 1].
inline const std::array<double, 8>& gauss_nodes() {
  static const std::array<double, 8> x = {
      0.01985507175123188415821957, 0.10166676129318663020422303,
      0.23723379504183550709113047, 0.40828267875217509753026193,
      0.59171732124782490246973807, 0.76276620495816449290886953,
      0.89833323870681336979577697, 0.98014492824876811584178043};
  return x;
}
inline const std::array<double, 8>& gauss_weights() {
  static const std::array<double, 8> w = {
      0.05061426814518812957626567, 0.11119051722668723527217800,
      0.15685332293894364366898110, 0.18134189168918099148257522,
      0.18134189168918099148257522, 0.15685332293894364366898110,
      0.11119051722668723527217800, 0.05061426814518812957626567};
  return w;
}

template <class F, class S>
S gauss_panel(const F& f, const std::array<double, 3>& lo, const std::array<double, 3>& hi,
              int dim) {
  const auto& xs = gauss_nodes();
  const auto& ws = gauss_weights();
  S total = S(0);
  std::array<double, 3> y{0, 0, 0};
  if (dim == 2) {
    for (int i = 0; i < 8; ++i) {
      y[0] = lo[0] + (hi[0] - lo[0]) * xs[i];
      for (int j = 0; j < 8; ++j) {
        y[1] = lo[1] + (hi[1] - lo[1]) * xs[j];
        total += S(ws[i] * ws[j]) * f(y);
      }
    }
    return total * S((hi[0] - lo[0]) * (hi[1] - lo[1]));
  }
  for (int i = 0; i < 8; ++i) {
    y[0] = lo[0] + (hi[0] - lo[0]) * xs[i];
    for (int j = 0; j < 8; ++j) {
      y[1] = lo[1] + (hi[1] - lo[1]) * xs[j];
      for (int k = 0; k < 8; ++k) {
        y[2] = lo[2] + (hi[2] - lo[2]) * xs[k];
        total += S(ws[i] * ws[j] * ws[k]) * f(y);
      }
    }
  }
  return total * S((hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]));
}

template <class F, class S>
S adapt_smooth(const F& f, std::array<double, 3> lo, std::array<double, 3> hi, int dim, double tol,
               int depth) {
  const S coarse = gauss_panel<F, S>(f, lo, hi, dim);
  S fine = S(0);
  const int nb = 1 << dim;
  for (int q = 0; q < nb; ++q) {
    std::array<double, 3> l = lo, h = hi;
    for (int a = 0; a < dim; ++a) {
      const double mid = 0.5 * (lo[a] + hi[a]);
      if ((q >> a) & 1)
        l[a] = mid;
      else
        h[a] = mid;
    }
    fine += gauss_panel<F, S>(f, l, h, dim);
  }
  if (std::abs(fine - coarse) <= tol || depth >= 24) return fine;
  S total = S(0);
  for (int q = 0; q < nb; ++q) {
    std::array<double, 3> l = lo, h = hi;
    for (int a = 0; a < dim; ++a) {
      const double mid = 0.5 * (lo[a] + hi[a]);
      if ((q >> a) & 1)
        l[a] = mid;
      else
        h[a] = mid;
    }
    total += adapt_smooth<F, S>(f, l, h, dim, tol / nb, depth + 1);
  }
  return total;
}

inline double corner_bound(KernelKind kind, double wave_k, double s, int dim) {
  // Safe overestimate of |∫ K| over [0, s]^d.
  if (kind == KernelKind::laplace3d) return 0.2 * s * s;
  const double lg = std::abs(std::log(std::min(1.0, s) * (kind == KernelKind::helmholtz2d
                                                              ? std::max(wave_k, 1e-30) * 0.5
                                                              : 1.0))) +
                    3.0;
  return s * s * lg;  // covers both (1/2pi)|log r| and |H0| log growth
}

}  // namespace detail

/// Quadrature of the kernel over one grid element centered on the singular
/// point, to absolute tolerance `tol`.
template <class S>
S diag_quadrature(KernelKind kind, double wave_k, double h, int dim, double tol = 1e-12) {
  auto f = [&](const std::array<double, 3>& y) -> S {
    double r2 = 0;
    for (int a = 0; a < dim; ++a) r2 += y[a] * y[a];
    return kernel_eval<S>(kind, wave_k, std::sqrt(r2));
  };
  const double a = 0.5 * h;
  const int nb = 1 << dim;
  S total = S(0);
  double s = a;
  for (int j = 0; j < 200; ++j) {
    if (detail::corner_bound(kind, wave_k, s, dim) * nb < 0.25 * tol) break;
    // shell = [0, s]^d minus [0, s/2]^d: the 2^d - 1 sub-boxes not at the corner
    const double shell_tol = tol * std::pow(0.5, j + 2) / nb;
    for (int q = 1; q < nb; ++q) {
      std::array<double, 3> lo{0, 0, 0}, hi{0, 0, 0};
      for (int axis = 0; axis < dim; ++axis) {
        if ((q >> axis) & 1) {
          lo[axis] = 0.5 * s;
          hi[axis] = s;
        } else {
          lo[axis] = 0;
          hi[axis] = 0.5 * s;
        }
      }
      total += detail::adapt_smooth<decltype(f), S>(f, lo, hi, dim, shell_tol, 0);
    }
    s *= 0.5;
  }
  return total * S(nb);
}

}  // namespace hifie
