#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <sstream>

#include "hifie/factor.hpp"
#include "hifie/operators.hpp"
#include "hifie/serialize.hpp"
#include "oracles.hpp"

using namespace hifie;
using C = std::complex<double>;

namespace {

template <class S>
DenseMatrix<S> dense_of_problem(const KernelProblem<S>& p) {
  std::vector<int> all(p.size());
  for (int i = 0; i < p.size(); ++i) all[i] = i;
  return assemble_block(p, all, all);
}

template <class S>
DenseMatrix<S> dense_of_apply(const Factorization<S>& f) {
  const int n = int(f.n_total);
  DenseMatrix<S> m(n, n);
  std::vector<S> e(n, S(0));
  for (int j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), S(0));
    e[j] = S(1);
    const auto col = f.apply(e);
    for (int i = 0; i < n; ++i) m(i, j) = col[i];
  }
  return m;
}

template <class S>
double rel_reconstruction_error(const KernelProblem<S>& p, const Factorization<S>& f) {
  auto a = dense_of_problem(p);
  auto fa = dense_of_apply(f);
  hifie::mat_add_scaled(fa, S(-1), a);
  return fa.frobenius_norm() / a.frobenius_norm();
}

template <class S>
double inverse_pair_error(const Factorization<S>& f, int trials, std::uint64_t seed) {
  RandomStream rng(seed);
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    const auto x = rng.template uniform_vector<S>(int(f.n_total));
    const auto y = f.solve(f.apply(x));
    double err = 0, scale = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      err += std::norm(C(y[i]) - C(x[i]));
      scale += std::norm(C(x[i]));
    }
    worst = std::max(worst, std::sqrt(err / scale));
  }
  return worst;
}

KernelProblem<double> identity_problem(int n) {
  return make_kernel_problem<double>(
      KernelKind::laplace2d, GridSpec::with_depth(2, n, 1),
      [](const std::array<double, 3>&) { return 1.0; },
      [](const std::array<double, 3>&) { return 0.0; },
      [](const std::array<double, 3>&) { return 0.0; });
}

}  // namespace

TEST_CASE("identity problem factors to the identity") {
  auto p = identity_problem(8);
  FactorOptions opt;
  opt.eps = 1e-10;
  for (auto scheme : {0, 1}) {
    auto f = scheme == 0 ? rsf_factor(p, opt) : hifie_factor(p, opt);
    RandomStream rng(5);
    const auto x = rng.uniform_vector<double>(p.size());
    const auto ax = f.apply(x);
    const auto sx = f.solve(x);
    for (int i = 0; i < p.size(); ++i) {
      CHECK(ax[i] == doctest::Approx(x[i]).epsilon(1e-12));
      CHECK(sx[i] == doctest::Approx(x[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("rsf dense reconstruction at N=16") {
  auto p = laplace_volume_problem(GridSpec::with_depth(2, 4, 1), 0.0);
  FactorOptions opt;
  opt.eps = 1e-12;
  auto f = rsf_factor(p, opt);
  CHECK(rel_reconstruction_error(p, f) <= 1e-10);
}

TEST_CASE("rsf and hifie dense reconstruction, first kind 16x16") {
  auto p = laplace_volume_problem(GridSpec::with_depth(2, 16, 2), 0.0);
  for (double eps : {1e-6, 1e-9}) {
    FactorOptions opt;
    opt.eps = eps;
    auto fr = rsf_factor(p, opt);
    CHECK(rel_reconstruction_error(p, fr) <= 10 * eps);
    auto fh = hifie_factor(p, opt);
    CHECK(rel_reconstruction_error(p, fh) <= 10 * eps);
  }
}

TEST_CASE("hifie_x dense reconstruction, second kind 16x16") {
  auto p = laplace_volume_problem(GridSpec::with_depth(2, 16, 2), 1.0);
  FactorOptions opt;
  opt.eps = 1e-9;
  opt.variant = Variant::second_kind;
  auto f = hifie_factor(p, opt);
  CHECK(f.scheme_label() == std::string("hifie_x"));
  CHECK(rel_reconstruction_error(p, f) <= 10 * opt.eps);
}

TEST_CASE("3D factorization reconstructs (8^3, one level)") {
  auto p = laplace_volume_problem(GridSpec::with_depth(3, 8, 1), 0.0);
  FactorOptions opt;
  opt.eps = 1e-8;
  auto f = hifie_factor(p, opt);
  CHECK(rel_reconstruction_error(p, f) <= 10 * opt.eps);
  CHECK(f.levels.size() == 3);  // cell, face, edge passes
}

TEST_CASE("complex symmetric factorization (Lippmann-Schwinger)") {
  auto p = lippmann_schwinger_problem(1.0, GridSpec::with_depth(2, 16, 1));
  FactorOptions opt;
  opt.eps = 1e-9;
  opt.variant = Variant::second_kind;
  auto f = hifie_factor(p, opt);
  auto a = dense_of_problem(p);
  auto fa = dense_of_apply(f);
  // symmetric factorization of a symmetric matrix
  for (int i = 0; i < fa.rows(); ++i)
    for (int j = 0; j < i; ++j) CHECK(std::abs(fa(i, j) - fa(j, i)) <= 1e-11 * a.max_abs());
  hifie::mat_add_scaled(fa, C(-1), a);
  CHECK(fa.frobenius_norm() / a.frobenius_norm() <= 10 * opt.eps);
  CHECK(inverse_pair_error<C>(f, 20, 77) <= 1e-9);
}

TEST_CASE("inverse pair identity across schemes and problems") {
  {
    auto p = laplace_volume_problem(GridSpec::with_depth(2, 32, 2), 0.0);
    FactorOptions opt;
    opt.eps = 1e-6;
    CHECK(inverse_pair_error<double>(rsf_factor(p, opt), 100, 1) <= 1e-9);
    CHECK(inverse_pair_error<double>(hifie_factor(p, opt), 100, 2) <= 1e-9);
  }
  {
    auto p = laplace_volume_problem(GridSpec::with_depth(2, 32, 2), 1.0);
    FactorOptions opt;
    opt.eps = 1e-6;
    opt.variant = Variant::second_kind;
    CHECK(inverse_pair_error<double>(hifie_factor(p, opt), 100, 3) <= 1e-9);
  }
}

TEST_CASE("adjoint consistency") {
  // unsymmetric problem (b != c) exercises the native adjoint path
  auto p = make_kernel_problem<double>(
      KernelKind::laplace2d, GridSpec::with_depth(2, 16, 1),
      [](const std::array<double, 3>&) { return 1.0; },
      [](const std::array<double, 3>& x) { return 1.0 + x[0]; },
      [](const std::array<double, 3>& x) { return 1.0 + x[1]; });
  REQUIRE(!p.symmetric);
  FactorOptions opt;
  opt.eps = 1e-8;
  auto f = hifie_factor(p, opt);
  RandomStream rng(9);
  for (int t = 0; t < 10; ++t) {
    const auto x = rng.uniform_vector<double>(p.size());
    const auto y = rng.uniform_vector<double>(p.size());
    const double lhs = vec_dot(f.apply(x), y);
    const double rhs = vec_dot(x, f.apply_adjoint(y));
    CHECK(std::abs(lhs - rhs) <= 1e-11 * std::max(std::abs(lhs), 1.0));
    // solve adjoint pairs too
    const double l2 = vec_dot(f.solve(x), y);
    const double r2 = vec_dot(x, f.solve_adjoint(y));
    CHECK(std::abs(l2 - r2) <= 1e-9 * std::max(std::abs(l2), 1.0));
  }
  // reconstruction for the unsymmetric path
  CHECK(rel_reconstruction_error(p, f) <= 10 * opt.eps);
}

TEST_CASE("real symmetric problems: apply equals apply_adjoint") {
  auto p = laplace_volume_problem(GridSpec::with_depth(2, 16, 2), 0.0);
  FactorOptions opt;
  opt.eps = 1e-6;
  auto f = hifie_factor(p, opt);
  RandomStream rng(21);
  const auto x = rng.uniform_vector<double>(p.size());
  const auto a = f.apply(x);
  const auto b = f.apply_adjoint(x);
  for (int i = 0; i < p.size(); ++i)
    CHECK(std::abs(a[i] - b[i]) <= 1e-11 * (1.0 + std::abs(a[i])));
}

TEST_CASE("monotone elimination and level bookkeeping") {
  // default leaf sizing, as in the benchmark protocol
  for (int n : {16, 32}) {
    auto p = laplace_volume_problem(GridSpec::auto_depth(2, n), 0.0);
    FactorOptions opt;
    opt.eps = 1e-6;
    auto f = hifie_factor(p, opt);
    long long prev = p.size();
    for (const auto& lvl : f.levels) {
      CHECK(lvl.active_after < prev);
      prev = lvl.active_after;
    }
    CHECK(f.terminal_count() == prev);
    // every DOF is either in exactly one rd set or terminal
    std::vector<int> seen;
    for (const auto& lvl : f.levels)
      for (const auto& r : lvl.records) seen.insert(seen.end(), r.rd.begin(), r.rd.end());
    seen.insert(seen.end(), f.terminal_idx.begin(), f.terminal_idx.end());
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    CHECK((long long)seen.size() == f.n_total);
  }
}

TEST_CASE("within-level record order does not matter") {
  auto p = laplace_volume_problem(GridSpec::with_depth(2, 16, 1), 0.0);
  FactorOptions opt;
  opt.eps = 1e-9;
  auto f = hifie_factor(p, opt);
  auto g = f;
  for (auto& lvl : g.levels) std::reverse(lvl.records.begin(), lvl.records.end());
  RandomStream rng(31);
  const auto x = rng.uniform_vector<double>(p.size());
  const auto fa = f.apply(x);
  const auto ga = g.apply(x);
  const auto fs = f.solve(x);
  const auto gs = g.solve(x);
  double scale_a = vec_norm(fa), scale_s = vec_norm(fs);
  for (int i = 0; i < p.size(); ++i) {
    CHECK(std::abs(fa[i] - ga[i]) <= 1e-14 * scale_a);
    CHECK(std::abs(fs[i] - gs[i]) <= 1e-14 * scale_s);
  }
}

TEST_CASE("zero operator fails with context") {
  auto p = make_kernel_problem<double>(
      KernelKind::laplace2d, GridSpec::with_depth(2, 4, 1),
      [](const std::array<double, 3>&) { return 0.0; },
      [](const std::array<double, 3>&) { return 0.0; },
      [](const std::array<double, 3>&) { return 0.0; });
  FactorOptions opt;
  opt.eps = 1e-6;
  CHECK_THROWS_AS((void)rsf_factor(p, opt), SingularRedundantBlock);
}

TEST_CASE("threaded factorization matches sequential bit for bit") {
  auto p = laplace_volume_problem(GridSpec::with_depth(2, 16, 2), 0.0);
  FactorOptions opt;
  opt.eps = 1e-6;
  auto f1 = hifie_factor(p, opt);
  opt.threads = 2;
  auto f2 = hifie_factor(p, opt);
  REQUIRE(f1.levels.size() == f2.levels.size());
  CHECK(f1.terminal_idx == f2.terminal_idx);
  RandomStream rng(41);
  const auto x = rng.uniform_vector<double>(p.size());
  const auto a1 = f1.apply(x);
  const auto a2 = f2.apply(x);
  for (int i = 0; i < p.size(); ++i) CHECK(a1[i] == a2[i]);
}

TEST_CASE("serialization round trip preserves the operator exactly") {
  auto p = laplace_volume_problem(GridSpec::with_depth(2, 16, 2), 1.0);
  FactorOptions opt;
  opt.eps = 1e-6;
  opt.variant = Variant::second_kind;
  auto f = hifie_factor(p, opt);

  std::stringstream ss;
  write_factorization(ss, f);
  CHECK(serialized_size(f) == ss.str().size());
  auto g = read_factorization<double>(ss);
  CHECK(g.eps == f.eps);
  CHECK(g.scheme_label() == std::string("hifie_x"));
  CHECK(g.terminal_idx == f.terminal_idx);
  RandomStream rng(51);
  const auto x = rng.uniform_vector<double>(p.size());
  const auto a = f.apply(x);
  const auto b = g.apply(x);
  const auto s = f.solve(x);
  const auto t = g.solve(x);
  for (int i = 0; i < p.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(s[i] == t[i]);
  }
  // scalar tag is validated
  std::stringstream ss2;
  write_factorization(ss2, f);
  CHECK_THROWS_AS((void)read_factorization<C>(ss2), IoError);
}

TEST_CASE("second-kind direct solve residual (64^2, eps = 1e-9)") {
  auto p = laplace_volume_problem(GridSpec::auto_depth(2, 64), 1.0);
  FactorOptions opt;
  opt.eps = 1e-9;
  opt.variant = Variant::second_kind;
  auto f = hifie_factor(p, opt);
  const auto op = dense_matvec_operator(p);
  RandomStream rng(61);
  const auto b = rng.uniform_vector<double>(p.size());
  const auto ax = op.apply(f.solve(b));
  double num = 0, den = 0;
  for (int i = 0; i < p.size(); ++i) {
    num += (ax[i] - b[i]) * (ax[i] - b[i]);
    den += b[i] * b[i];
  }
  CHECK(std::sqrt(num / den) <= 1e-7);
}

TEST_CASE("proxy sufficiency: ID of Y_c interpolates the exact global block") {
  // first-kind Laplace, no SCIs at level 0: the Y_c ID must interpolate the
  // dense off-diagonal block W_c to 10 eps
  auto p = laplace_volume_problem(GridSpec::with_depth(2, 16, 1), 0.0);
  const double eps = 1e-9;
  ActiveState<double> state;
  state.active.resize(p.size());
  for (int i = 0; i < p.size(); ++i) state.active[i] = i;
  auto a = dense_of_problem(p);
  auto cells = cell_partition(p.points, p.spec, 0, state.active);
  for (const auto& c : cells) {
    auto res = skeletonize_cluster(p, state, c, eps, Variant::standard, 1);
    std::vector<int> comp;
    std::set_difference(state.active.begin(), state.active.end(), c.indices.begin(),
                        c.indices.end(), std::back_inserter(comp));
    // W = [A_comp,c ; A_c,comp^*]
    DenseMatrix<double> w(2 * int(comp.size()), int(c.indices.size()));
    for (int j = 0; j < int(c.indices.size()); ++j)
      for (int i = 0; i < int(comp.size()); ++i) {
        w(i, j) = a(comp[i], c.indices[j]);
        w(int(comp.size()) + i, j) = a(c.indices[j], comp[i]);
      }
    // residual of the interpolation W_rd ~ W_sk T over local positions
    std::vector<int> sk_loc, rd_loc;
    for (int g : res.rec.sk)
      sk_loc.push_back(int(std::lower_bound(c.indices.begin(), c.indices.end(), g) -
                           c.indices.begin()));
    for (int g : res.rec.rd)
      rd_loc.push_back(int(std::lower_bound(c.indices.begin(), c.indices.end(), g) -
                           c.indices.begin()));
    auto wrd = w.gather_cols(rd_loc);
    auto wsk = w.gather_cols(sk_loc);
    auto rec = matmul(wsk, res.rec.T);
    mat_add_scaled(rec, -1.0, wrd);
    CHECK(rec.frobenius_norm() <= 10 * eps * w.frobenius_norm());
  }
}
