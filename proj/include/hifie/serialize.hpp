#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <streambuf>
#include <string>

#include "hifie/factor.hpp"

namespace hifie {

// Versioned binary container for a factorization. Layout (little endian):
//   u32 magic 'HIFB', u16 version, u8 scalar (0 real / 1 complex), u8 scheme,
//   u8 variant, u8 symmetric, u8 dim, u8 reserved, i32 n, i32 depth, i32 leaf,
//   f64 eps, i64 N, then the level list (tag, kind, records) and the terminal
//   block. Matrices are (i32 rows, i32 cols, f64 entries [x2 if complex]).
// Record layout: center f64[3], width f64, kind u8, sk, rd, T, couple_dn,
//   u8 has_couple_up [+ couple_up], block factor (kind u8, packed matrix,
//   swap lists, block-size bytes).

namespace ser {

constexpr std::uint32_t kMagic = 0x42464948u;  // "HIFB"
constexpr std::uint16_t kVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("truncated factorization stream");
  return v;
}

inline void put_ints(std::ostream& os, const std::vector<int>& v) {
  put<std::int64_t>(os, (std::int64_t)v.size());
  os.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * sizeof(int)));
}
inline std::vector<int> get_ints(std::istream& is) {
  const auto n = get<std::int64_t>(is);
  std::vector<int> v(static_cast<std::size_t>(n));
  is.read(reinterpret_cast<char*>(v.data()), std::streamsize(v.size() * sizeof(int)));
  if (!is) throw IoError("truncated index list");
  return v;
}

inline void put_bytes(std::ostream& os, const std::vector<std::uint8_t>& v) {
  put<std::int64_t>(os, (std::int64_t)v.size());
  os.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size()));
}
inline std::vector<std::uint8_t> get_bytes(std::istream& is) {
  const auto n = get<std::int64_t>(is);
  std::vector<std::uint8_t> v(static_cast<std::size_t>(n));
  is.read(reinterpret_cast<char*>(v.data()), std::streamsize(v.size()));
  if (!is) throw IoError("truncated byte list");
  return v;
}

template <class S>
void put_matrix(std::ostream& os, const DenseMatrix<S>& m) {
  put<std::int32_t>(os, m.rows());
  put<std::int32_t>(os, m.cols());
  os.write(reinterpret_cast<const char*>(m.data()), std::streamsize(m.size() * sizeof(S)));
}
template <class S>
DenseMatrix<S> get_matrix(std::istream& is) {
  const auto r = get<std::int32_t>(is);
  const auto c = get<std::int32_t>(is);
  DenseMatrix<S> m(r, c);
  is.read(reinterpret_cast<char*>(m.data()), std::streamsize(m.size() * sizeof(S)));
  if (!is) throw IoError("truncated matrix");
  return m;
}

template <class S>
void put_factor(std::ostream& os, const BlockFactor<S>& f) {
  put<std::uint8_t>(os, std::uint8_t(f.kind()));
  put_matrix(os, f.packed());
  put_ints(os, f.swaps_a());
  put_ints(os, f.swaps_b());
  put_bytes(os, f.block_sizes());
}
template <class S>
BlockFactor<S> get_factor(std::istream& is) {
  const auto kind = FactorKind(get<std::uint8_t>(is));
  auto packed = get_matrix<S>(is);
  auto sa = get_ints(is);
  auto sb = get_ints(is);
  auto blk = get_bytes(is);
  return BlockFactor<S>::from_raw(kind, std::move(packed), std::move(sa), std::move(sb),
                                  std::move(blk));
}

}  // namespace ser

template <class S>
void write_factorization(std::ostream& os, const Factorization<S>& f) {
  ser::put(os, ser::kMagic);
  ser::put(os, ser::kVersion);
  ser::put<std::uint8_t>(os, is_complex_v<S> ? 1 : 0);
  ser::put<std::uint8_t>(os, std::uint8_t(f.scheme));
  ser::put<std::uint8_t>(os, std::uint8_t(f.variant));
  ser::put<std::uint8_t>(os, f.symmetric ? 1 : 0);
  ser::put<std::uint8_t>(os, std::uint8_t(f.spec.dim));
  ser::put<std::uint8_t>(os, 0);
  ser::put<std::int32_t>(os, f.spec.n);
  ser::put<std::int32_t>(os, f.spec.depth);
  ser::put<std::int32_t>(os, f.spec.leaf);
  ser::put<double>(os, f.eps);
  ser::put<std::int64_t>(os, f.n_total);
  ser::put<std::int32_t>(os, int(f.levels.size()));
  for (const auto& lvl : f.levels) {
    ser::put<std::int32_t>(os, lvl.tag.whole);
    ser::put<std::int32_t>(os, lvl.tag.num);
    ser::put<std::int32_t>(os, lvl.tag.den);
    ser::put<std::int64_t>(os, lvl.active_after);
    ser::put<std::int32_t>(os, int(lvl.records.size()));
    for (const auto& r : lvl.records) {
      for (double c : r.center) ser::put<double>(os, c);
      ser::put<double>(os, r.width);
      ser::put<std::uint8_t>(os, std::uint8_t(r.kind));
      ser::put_ints(os, r.sk);
      ser::put_ints(os, r.rd);
      ser::put_matrix(os, r.T);
      ser::put_matrix(os, r.couple_dn);
      ser::put<std::uint8_t>(os, r.couple_up.empty() ? 0 : 1);
      if (!r.couple_up.empty()) ser::put_matrix(os, r.couple_up);
      ser::put_factor(os, r.rd_factor);
    }
  }
  ser::put_ints(os, f.terminal_idx);
  ser::put_factor(os, f.terminal);
  if (!os) throw IoError("failed to write factorization");
}

template <class S>
Factorization<S> read_factorization(std::istream& is) {
  if (ser::get<std::uint32_t>(is) != ser::kMagic) throw IoError("bad factorization magic");
  if (ser::get<std::uint16_t>(is) != ser::kVersion) throw IoError("unsupported version");
  const auto scalar = ser::get<std::uint8_t>(is);
  if (scalar != (is_complex_v<S> ? 1 : 0)) throw IoError("scalar type mismatch");
  Factorization<S> f;
  f.scheme = Scheme(ser::get<std::uint8_t>(is));
  f.variant = Variant(ser::get<std::uint8_t>(is));
  f.symmetric = ser::get<std::uint8_t>(is) != 0;
  const int dim = ser::get<std::uint8_t>(is);
  ser::get<std::uint8_t>(is);
  const int n = ser::get<std::int32_t>(is);
  const int depth = ser::get<std::int32_t>(is);
  const int leaf = ser::get<std::int32_t>(is);
  f.spec = GridSpec::with_depth(dim, n, depth);
  if (f.spec.leaf != leaf) throw IoError("inconsistent grid header");
  f.eps = ser::get<double>(is);
  f.n_total = ser::get<std::int64_t>(is);
  const int nlvl = ser::get<std::int32_t>(is);
  f.levels.resize(nlvl);
  for (auto& lvl : f.levels) {
    lvl.tag.whole = ser::get<std::int32_t>(is);
    lvl.tag.num = ser::get<std::int32_t>(is);
    lvl.tag.den = ser::get<std::int32_t>(is);
    lvl.active_after = ser::get<std::int64_t>(is);
    const int nrec = ser::get<std::int32_t>(is);
    lvl.records.resize(nrec);
    for (auto& r : lvl.records) {
      for (double& c : r.center) c = ser::get<double>(is);
      r.width = ser::get<double>(is);
      r.kind = ClusterKind(ser::get<std::uint8_t>(is));
      r.sk = ser::get_ints(is);
      r.rd = ser::get_ints(is);
      r.T = ser::get_matrix<S>(is);
      r.couple_dn = ser::get_matrix<S>(is);
      if (ser::get<std::uint8_t>(is)) r.couple_up = ser::get_matrix<S>(is);
      r.rd_factor = ser::get_factor<S>(is);
    }
  }
  f.terminal_idx = ser::get_ints(is);
  f.terminal = ser::get_factor<S>(is);
  return f;
}

namespace ser {

struct CountingBuf : std::streambuf {
  std::size_t count = 0;
  int overflow(int c) override {
    ++count;
    return c;
  }
  std::streamsize xsputn(const char*, std::streamsize n) override {
    count += std::size_t(n);
    return n;
  }
};

}  // namespace ser

/// Serialized byte size of a factorization (the m_f storage measure).
template <class S>
std::size_t serialized_size(const Factorization<S>& f) {
  ser::CountingBuf buf;
  std::ostream os(&buf);
  write_factorization(os, f);
  return buf.count;
}

}  // namespace hifie
