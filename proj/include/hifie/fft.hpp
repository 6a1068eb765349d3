#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "hifie/errors.hpp"

namespace hifie {

/// In-place radix-2 complex FFT; inverse includes the 1/n scaling.
inline void fft_radix2(std::complex<double>* a, int n, bool inverse) {
  if (n <= 1) return;
  if (n & (n - 1)) throw InvalidSpec("fft_radix2: length must be a power of two");
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / len;
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double s = 1.0 / n;
    for (int i = 0; i < n; ++i) a[i] *= s;
  }
}

/// d-dimensional FFT over a dense tensor, dims[0] fastest varying.
inline void fft_nd(std::vector<std::complex<double>>& buf, const std::vector<int>& dims,
                   bool inverse) {
  long long total = 1;
  for (int d : dims) total *= d;
  if ((long long)buf.size() != total) throw DimensionMismatch("fft_nd: buffer size");
  std::vector<std::complex<double>> line;
  long long stride = 1;
  for (std::size_t ax = 0; ax < dims.size(); ++ax) {
    const int n = dims[ax];
    line.resize(n);
    const long long lines = total / n;
    for (long long l = 0; l < lines; ++l) {
      // decompose l into (inner, outer) around this axis
      const long long inner = l % stride;
      const long long outer = l / stride;
      const long long base = outer * stride * n + inner;
      for (int t = 0; t < n; ++t) line[t] = buf[base + t * stride];
      fft_radix2(line.data(), n, inverse);
      for (int t = 0; t < n; ++t) buf[base + t * stride] = line[t];
    }
    stride *= n;
  }
}

inline int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace hifie
