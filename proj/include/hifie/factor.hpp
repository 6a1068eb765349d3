#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hifie/block_factor.hpp"
#include "hifie/compression.hpp"
#include "hifie/problem.hpp"

namespace hifie {

enum class Scheme : std::uint8_t { rskelf = 0, hifie = 1 };
enum class Variant : std::uint8_t { standard = 0, second_kind = 1 };

inline const char* scheme_name(Scheme s, Variant v) {
  if (s == Scheme::rskelf) return "rskelf";
  return v == Variant::second_kind ? "hifie_x" : "hifie";
}

/// Implicit level matrix: active DOFs plus the SCI delta store.
template <class S>
struct ActiveState {
  std::vector<int> active;  // ascending
  SciStore<S> sci;
  LevelTag level;
};

/// One application of skeletonization to a cluster: index split, interpolation
/// matrix, factored redundant block, and the two coupling blocks (the second
/// is implied by transposition for symmetric problems).
template <class S>
struct SkelRecord {
  std::array<double, 3> center{0, 0, 0};
  double width = 0;
  ClusterKind kind = ClusterKind::cell;
  std::vector<int> sk, rd;    // global DOF indices
  DenseMatrix<S> T;           // |sk| x |rd|
  BlockFactor<S> rd_factor;   // B_rd,rd
  DenseMatrix<S> couple_dn;   // B_sk,rd
  DenseMatrix<S> couple_up;   // B_rd,sk (empty when symmetric)
};

struct FactorOptions {
  double eps = 1e-6;
  Variant variant = Variant::standard;
  std::vector<int> skip;  // fractional-level ordinals to omit
  std::uint64_t seed = 20140331;
  int threads = 1;
  int target_leaf = 0;  // 0 = library default
};

template <class S>
struct SkeletonizeResult {
  SkelRecord<S> rec;
  DenseMatrix<S> delta;  // SCI update on sk x sk (B'_sk,sk - A_sk,sk)
};

/// Skeletonize one cluster against a level snapshot: compression matrix,
/// (optionally split and rescaled) ID, coupling blocks, factored redundant
/// block, and the Schur complement delta for the skeleton block.
template <class S>
SkeletonizeResult<S> skeletonize_cluster(const KernelProblem<S>& prob, const ActiveState<S>& state,
                                         const Cluster& cluster, double eps, Variant variant,
                                         std::uint64_t seed) {
  SkeletonizeResult<S> out;
  SkelRecord<S>& rec = out.rec;
  rec.center = cluster.center;
  rec.width = cluster.width;
  rec.kind = cluster.kind;

  const std::vector<int> near = near_field(cluster, prob.points, state.active, state.sci);
  const ProxySurface proxy = proxy_surface(cluster.center, cluster.width, prob.points.dim, seed);
  const CompressionMatrix<S> y =
      assemble_compression_matrix(prob, cluster, near, proxy, state.sci, prob.symmetric);

  const int nc = int(cluster.indices.size());
  std::vector<int> sk_loc, rd_loc;
  DenseMatrix<S> T;
  if (variant == Variant::second_kind && y.has_s_rows()) {
    const auto groups = split_by_sparsity(y);
    std::vector<IdResult<S>> ids(groups.size());
    int total_sk = 0, total_rd = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      CompressionMatrix<S> yg = gather_columns(y, groups[g]);
      const double tol = scaled_tolerance(yg, eps);
      ids[g] = interpolative_decompose(yg.y, tol);
      total_sk += int(ids[g].sk.size());
      total_rd += int(ids[g].rd.size());
    }
    T = DenseMatrix<S>(total_sk, total_rd);
    int so = 0, ro = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& id = ids[g];
      for (std::size_t i = 0; i < id.sk.size(); ++i) sk_loc.push_back(groups[g][id.sk[i]]);
      for (std::size_t j = 0; j < id.rd.size(); ++j) rd_loc.push_back(groups[g][id.rd[j]]);
      for (int j = 0; j < id.T.cols(); ++j)
        for (int i = 0; i < id.T.rows(); ++i) T(so + i, ro + j) = id.T(i, j);
      so += int(id.sk.size());
      ro += int(id.rd.size());
    }
  } else {
    IdResult<S> id = interpolative_decompose(y.y, eps);
    sk_loc = std::move(id.sk);
    rd_loc = std::move(id.rd);
    T = std::move(id.T);
  }

  rec.sk.resize(sk_loc.size());
  rec.rd.resize(rd_loc.size());
  for (std::size_t i = 0; i < sk_loc.size(); ++i) rec.sk[i] = cluster.indices[sk_loc[i]];
  for (std::size_t i = 0; i < rd_loc.size(); ++i) rec.rd[i] = cluster.indices[rd_loc[i]];
  rec.T = std::move(T);

  if (rec.rd.empty()) return out;  // nothing to eliminate: no-op record

  const DenseMatrix<S> acc = assemble_block(prob, cluster.indices, cluster.indices, &state.sci);
  const DenseMatrix<S> ass = acc.gather(sk_loc, sk_loc);
  const DenseMatrix<S> asr = acc.gather(sk_loc, rd_loc);
  const DenseMatrix<S> ars = acc.gather(rd_loc, sk_loc);
  const DenseMatrix<S> arr = acc.gather(rd_loc, rd_loc);

  const char hop = prob.symmetric ? 'T' : 'C';
  DenseMatrix<S> ass_t = matmul(ass, rec.T);          // A_sk,sk T
  DenseMatrix<S> th_asr = matmul(hop, rec.T, 'N', asr);  // T^H A_sk,rd

  DenseMatrix<S> brr = arr;
  mat_add_scaled(brr, S(-1), th_asr);
  DenseMatrix<S> ars_t = matmul(ars, rec.T);
  mat_add_scaled(brr, S(-1), ars_t);
  DenseMatrix<S> th_ass_t = matmul(hop, rec.T, 'N', ass_t);
  mat_add_scaled(brr, S(1), th_ass_t);

  rec.couple_dn = asr;
  mat_add_scaled(rec.couple_dn, S(-1), ass_t);  // B_sk,rd = A_sk,rd - A_sk,sk T
  if (!prob.symmetric) {
    rec.couple_up = ars;
    DenseMatrix<S> th_ass = matmul(hop, rec.T, 'N', ass);
    mat_add_scaled(rec.couple_up, S(-1), th_ass);  // B_rd,sk = A_rd,sk - T^H A_sk,sk
  }

  try {
    rec.rd_factor = factor_block(brr, prob.symmetric);
  } catch (const SingularBlock& e) {
    throw SingularRedundantBlock(
        std::string(e.what()) + " [" + cluster_kind_name(cluster.kind) + " level " +
        state.level.label() + " center (" + std::to_string(cluster.center[0]) + "," +
        std::to_string(cluster.center[1]) + "," + std::to_string(cluster.center[2]) + ") |c|=" +
        std::to_string(nc) + " rank=" + std::to_string(rec.sk.size()) + "]");
  }

  if (!rec.sk.empty()) {
    // delta = -B_sk,rd B_rd,rd^{-1} B_rd,sk on sk x sk
    DenseMatrix<S> x = prob.symmetric ? rec.couple_dn.transposed() : rec.couple_up;
    rec.rd_factor.solve_mat(x);
    out.delta = matmul(rec.couple_dn, x);
    for (std::size_t i = 0; i < out.delta.size(); ++i) out.delta.data()[i] = -out.delta.data()[i];
  }
  return out;
}

/// Generalized LU factorization: ordered skeletonization records by level and
/// the terminal block-diagonal factor. Supports apply/solve and adjoints.
template <class S>
class Factorization {
 public:
  struct Level {
    LevelTag tag;
    std::vector<SkelRecord<S>> records;
    long long active_after = 0;
  };

  GridSpec spec;
  Scheme scheme = Scheme::rskelf;
  Variant variant = Variant::standard;
  double eps = 0;
  bool symmetric = false;
  long long n_total = 0;
  std::vector<Level> levels;
  std::vector<int> terminal_idx;
  BlockFactor<S> terminal;

  long long terminal_count() const { return (long long)terminal_idx.size(); }
  const char* scheme_label() const { return scheme_name(scheme, variant); }

  std::vector<S> apply(const std::vector<S>& x) const {
    check(x);
    std::vector<S> w = x;
    for (const auto& lvl : levels)
      for (const auto& r : lvl.records) v_phase_apply(r, w);
    middle_apply(w);
    for (auto lit = levels.rbegin(); lit != levels.rend(); ++lit)
      for (const auto& r : lit->records) u_phase_apply(r, w);
    return w;
  }

  std::vector<S> solve(const std::vector<S>& b) const {
    check(b);
    std::vector<S> w = b;
    for (const auto& lvl : levels)
      for (const auto& r : lvl.records) u_phase_solve(r, w);
    middle_solve(w);
    for (auto lit = levels.rbegin(); lit != levels.rend(); ++lit)
      for (const auto& r : lit->records) v_phase_solve(r, w);
    return w;
  }

  std::vector<S> apply_adjoint(const std::vector<S>& x) const {
    check(x);
    if (symmetric) return conj_wrap(x, [this](const std::vector<S>& v) { return apply(v); });
    std::vector<S> w = x;
    for (const auto& lvl : levels)
      for (const auto& r : lvl.records) uinv_phase_adjoint(r, w);
    middle_apply_adjoint(w);
    for (auto lit = levels.rbegin(); lit != levels.rend(); ++lit)
      for (const auto& r : lit->records) vinv_phase_adjoint(r, w);
    return w;
  }

  std::vector<S> solve_adjoint(const std::vector<S>& b) const {
    check(b);
    if (symmetric) return conj_wrap(b, [this](const std::vector<S>& v) { return solve(v); });
    std::vector<S> w = b;
    for (const auto& lvl : levels)
      for (const auto& r : lvl.records) vstar_phase_adjsolve(r, w);
    middle_solve_adjoint(w);
    for (auto lit = levels.rbegin(); lit != levels.rend(); ++lit)
      for (const auto& r : lit->records) u_phase_adjsolve(r, w);
    return w;
  }

 private:
  void check(const std::vector<S>& x) const {
    if ((long long)x.size() != n_total) throw DimensionMismatch("Factorization: vector length");
  }

  template <class Fn>
  std::vector<S> conj_wrap(const std::vector<S>& x, Fn&& fn) const {
    if constexpr (!is_complex_v<S>) {
      return fn(x);
    } else {
      std::vector<S> t(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) t[i] = conj_of(x[i]);
      t = fn(t);
      for (auto& v : t) v = conj_of(v);
      return t;
    }
  }

  static std::vector<S> take(const std::vector<S>& x, const std::vector<int>& idx) {
    std::vector<S> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = x[idx[i]];
    return out;
  }
  static void put_add(std::vector<S>& x, const std::vector<int>& idx, const std::vector<S>& v,
                      S alpha) {
    for (std::size_t i = 0; i < idx.size(); ++i) x[idx[i]] += alpha * v[i];
  }
  static void put(std::vector<S>& x, const std::vector<int>& idx, const std::vector<S>& v) {
    for (std::size_t i = 0; i < idx.size(); ++i) x[idx[i]] = v[i];
  }

  // B_rd,sk * xs, using couple_dn^T when the symmetric path stores one block.
  std::vector<S> cup_times(const SkelRecord<S>& r, const std::vector<S>& xs) const {
    return symmetric ? matvec('T', r.couple_dn, xs) : matvec('N', r.couple_up, xs);
  }
  char hop() const { return symmetric ? 'T' : 'C'; }

  // apply: x_sk += T x_rd ; x_rd += Brr^{-1} (B_rd,sk x_sk)
  void v_phase_apply(const SkelRecord<S>& r, std::vector<S>& x) const {
    if (r.rd.empty()) return;
    std::vector<S> xr = take(x, r.rd);
    if (!r.sk.empty()) {
      put_add(x, r.sk, matvec('N', r.T, xr), S(1));
      std::vector<S> t = cup_times(r, take(x, r.sk));
      r.rd_factor.solve(t);
      vec_axpy(xr, S(1), t);
      put(x, r.rd, xr);
    }
  }
  void middle_apply(std::vector<S>& x) const {
    for (const auto& lvl : levels)
      for (const auto& r : lvl.records) {
        if (r.rd.empty()) continue;
        std::vector<S> xr = take(x, r.rd);
        r.rd_factor.apply(xr);
        put(x, r.rd, xr);
      }
    if (!terminal_idx.empty()) {
      std::vector<S> xt = take(x, terminal_idx);
      terminal.apply(xt);
      put(x, terminal_idx, xt);
    }
  }
  // apply: x_sk += B_sk,rd Brr^{-1} x_rd ; x_rd += T^H x_sk
  void u_phase_apply(const SkelRecord<S>& r, std::vector<S>& x) const {
    if (r.rd.empty() || r.sk.empty()) return;
    std::vector<S> t = take(x, r.rd);
    r.rd_factor.solve(t);
    put_add(x, r.sk, matvec('N', r.couple_dn, t), S(1));
    put_add(x, r.rd, matvec(hop(), r.T, take(x, r.sk)), S(1));
  }

  // solve: x_rd -= T^H x_sk ; x_sk -= B_sk,rd Brr^{-1} x_rd
  void u_phase_solve(const SkelRecord<S>& r, std::vector<S>& x) const {
    if (r.rd.empty()) return;
    if (!r.sk.empty()) {
      put_add(x, r.rd, matvec(hop(), r.T, take(x, r.sk)), S(-1));
      std::vector<S> t = take(x, r.rd);
      r.rd_factor.solve(t);
      put_add(x, r.sk, matvec('N', r.couple_dn, t), S(-1));
    }
  }
  void middle_solve(std::vector<S>& x) const {
    for (const auto& lvl : levels)
      for (const auto& r : lvl.records) {
        if (r.rd.empty()) continue;
        std::vector<S> xr = take(x, r.rd);
        r.rd_factor.solve(xr);
        put(x, r.rd, xr);
      }
    if (!terminal_idx.empty()) {
      std::vector<S> xt = take(x, terminal_idx);
      terminal.solve(xt);
      put(x, terminal_idx, xt);
    }
  }
  // solve: x_rd -= Brr^{-1} (B_rd,sk x_sk) ; x_sk -= T x_rd
  void v_phase_solve(const SkelRecord<S>& r, std::vector<S>& x) const {
    if (r.rd.empty()) return;
    if (!r.sk.empty()) {
      std::vector<S> t = cup_times(r, take(x, r.sk));
      r.rd_factor.solve(t);
      put_add(x, r.rd, t, S(-1));
      put_add(x, r.sk, matvec('N', r.T, take(x, r.rd)), S(-1));
    }
  }

  // adjoint apply phases (unsymmetric path only)
  void uinv_phase_adjoint(const SkelRecord<S>& r, std::vector<S>& x) const {
    if (r.rd.empty() || r.sk.empty()) return;
    put_add(x, r.sk, matvec('N', r.T, take(x, r.rd)), S(1));
    std::vector<S> t = matvec('C', r.couple_dn, take(x, r.sk));
    r.rd_factor.solve_adjoint(t);
    put_add(x, r.rd, t, S(1));
  }
  void middle_apply_adjoint(std::vector<S>& x) const {
    for (const auto& lvl : levels)
      for (const auto& r : lvl.records) {
        if (r.rd.empty()) continue;
        std::vector<S> xr = take(x, r.rd);
        r.rd_factor.apply_adjoint(xr);
        put(x, r.rd, xr);
      }
    if (!terminal_idx.empty()) {
      std::vector<S> xt = take(x, terminal_idx);
      terminal.apply_adjoint(xt);
      put(x, terminal_idx, xt);
    }
  }
  void vinv_phase_adjoint(const SkelRecord<S>& r, std::vector<S>& x) const {
    if (r.rd.empty() || r.sk.empty()) return;
    std::vector<S> t = take(x, r.rd);
    r.rd_factor.solve_adjoint(t);
    put_add(x, r.sk, matvec('C', r.couple_up, t), S(1));
    put_add(x, r.rd, matvec('C', r.T, take(x, r.sk)), S(1));
  }

  // adjoint solve phases (unsymmetric path only)
  void vstar_phase_adjsolve(const SkelRecord<S>& r, std::vector<S>& x) const {
    if (r.rd.empty()) return;
    if (!r.sk.empty()) {
      put_add(x, r.rd, matvec('C', r.T, take(x, r.sk)), S(-1));
      std::vector<S> t = take(x, r.rd);
      r.rd_factor.solve_adjoint(t);
      put_add(x, r.sk, matvec('C', r.couple_up, t), S(-1));
    }
  }
  void middle_solve_adjoint(std::vector<S>& x) const {
    for (const auto& lvl : levels)
      for (const auto& r : lvl.records) {
        if (r.rd.empty()) continue;
        std::vector<S> xr = take(x, r.rd);
        r.rd_factor.solve_adjoint(xr);
        put(x, r.rd, xr);
      }
    if (!terminal_idx.empty()) {
      std::vector<S> xt = take(x, terminal_idx);
      terminal.solve_adjoint(xt);
      put(x, terminal_idx, xt);
    }
  }
  void u_phase_adjsolve(const SkelRecord<S>& r, std::vector<S>& x) const {
    if (r.rd.empty()) return;
    if (!r.sk.empty()) {
      std::vector<S> t = matvec('C', r.couple_dn, take(x, r.sk));
      r.rd_factor.solve_adjoint(t);
      put_add(x, r.rd, t, S(-1));
      put_add(x, r.sk, matvec('N', r.T, take(x, r.rd)), S(-1));
    }
  }
};

namespace detail {

template <class S>
void run_level(const KernelProblem<S>& prob, ActiveState<S>& state, const PlanLevel& lvl,
               const FactorOptions& opt, std::vector<SkelRecord<S>>& records_out) {
  const auto clusters = partition_level(prob.points, prob.spec, lvl, state.active);
  state.level = lvl.tag;
  std::vector<SkeletonizeResult<S>> results(clusters.size());
  const int nthreads = std::max(1, opt.threads);
  if (nthreads == 1 || clusters.size() < 2) {
    for (std::size_t i = 0; i < clusters.size(); ++i)
      results[i] = skeletonize_cluster(prob, state, clusters[i], opt.eps, opt.variant, opt.seed);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nthreads);
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t]() {
        try {
          for (std::size_t i = t; i < clusters.size(); i += nthreads)
            results[i] =
                skeletonize_cluster(prob, state, clusters[i], opt.eps, opt.variant, opt.seed);
        } catch (...) {
          errs[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  // Publish: new deltas, records, and the shrunken active set.
  std::vector<int> eliminated;
  for (auto& res : results) {
    if (!res.rec.rd.empty() && !res.rec.sk.empty())
      state.sci.add(res.rec.sk, std::move(res.delta));
    eliminated.insert(eliminated.end(), res.rec.rd.begin(), res.rec.rd.end());
    records_out.push_back(std::move(res.rec));
  }
  std::sort(eliminated.begin(), eliminated.end());
  std::vector<int> remaining;
  remaining.reserve(state.active.size() - eliminated.size());
  std::set_difference(state.active.begin(), state.active.end(), eliminated.begin(),
                      eliminated.end(), std::back_inserter(remaining));
  state.active = std::move(remaining);
}

template <class S>
Factorization<S> factor_problem(const KernelProblem<S>& prob, Scheme scheme,
                                const FactorOptions& opt) {
  if (opt.eps <= 0) throw InvalidSpec("factorization eps must be positive");
  Factorization<S> f;
  f.spec = prob.spec;
  f.scheme = scheme;
  f.variant = opt.variant;
  f.eps = opt.eps;
  f.symmetric = prob.symmetric;
  f.n_total = prob.points.count;

  const PlanKind pk = scheme == Scheme::rskelf ? PlanKind::cells_only : PlanKind::interleaved;
  const LevelPlan plan = build_level_plan(prob.spec, pk, opt.skip);

  ActiveState<S> state;
  state.active.resize(prob.points.count);
  for (long long i = 0; i < prob.points.count; ++i) state.active[i] = int(i);

  for (const auto& lvl : plan.levels) {
    typename Factorization<S>::Level flevel;
    flevel.tag = lvl.tag;
    run_level(prob, state, lvl, opt, flevel.records);
    flevel.active_after = (long long)state.active.size();
    f.levels.push_back(std::move(flevel));
  }

  f.terminal_idx = state.active;
  DenseMatrix<S> d = assemble_block(prob, f.terminal_idx, f.terminal_idx, &state.sci);
  try {
    f.terminal = factor_block(d, prob.symmetric);
  } catch (const SingularBlock& e) {
    throw SingularRedundantBlock(std::string(e.what()) + " [terminal block, |s_L| = " +
                                 std::to_string(f.terminal_idx.size()) + "]");
  }
  return f;
}

}  // namespace detail

/// Recursive skeletonization factorization: cell levels only.
template <class S>
Factorization<S> rsf_factor(const KernelProblem<S>& prob, const FactorOptions& opt) {
  FactorOptions o = opt;
  o.variant = Variant::standard;
  o.skip.clear();
  return detail::factor_problem(prob, Scheme::rskelf, o);
}

/// Hierarchical interpolative factorization: interleaved cell and edge (and
/// face) levels; variant second_kind activates the two-scale tolerance and
/// the sparsity-pattern split.
template <class S>
Factorization<S> hifie_factor(const KernelProblem<S>& prob, const FactorOptions& opt) {
  return detail::factor_problem(prob, Scheme::hifie, opt);
}

}  // namespace hifie
