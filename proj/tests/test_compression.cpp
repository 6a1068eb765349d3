#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "hifie/compression.hpp"
#include "hifie/factor.hpp"

using namespace hifie;

namespace {

std::vector<int> iota_vec(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST_CASE("proxy surface 2D: 64 points on the 1.5-width circle") {
  auto s = proxy_surface({0, 0, 0}, 1.0, 2, 1);
  REQUIRE(s.count == 64);
  CHECK(s.pts[0] == doctest::Approx(1.5));
  CHECK(s.pts[1] == doctest::Approx(0.0));
  for (int i = 0; i < s.count; ++i) {
    const double r = std::hypot(s.pts[2 * i], s.pts[2 * i + 1]);
    CHECK(r == doctest::Approx(1.5).epsilon(1e-13));
  }
  CHECK(s.weight == doctest::Approx(2.0 * M_PI * 1.5 / 64));

  auto t = proxy_surface({1, 1, 0}, 2.0, 2, 1);
  for (int i = 0; i < t.count; ++i) {
    const double r = std::hypot(t.pts[2 * i] - 1.0, t.pts[2 * i + 1] - 1.0);
    CHECK(r == doctest::Approx(3.0).epsilon(1e-13));
  }
}

TEST_CASE("proxy surface 3D: 512 seeded points at radius 1.5") {
  auto s = proxy_surface({0.5, 0.5, 0.5}, 1.0, 3, 42);
  REQUIRE(s.count == 512);
  for (int i = 0; i < s.count; ++i) {
    double r2 = 0;
    for (int a = 0; a < 3; ++a) {
      const double d = s.pts[3 * i + a] - 0.5;
      r2 += d * d;
    }
    CHECK(std::abs(std::sqrt(r2) - 1.5) <= 1e-12);
  }
  auto s2 = proxy_surface({0.5, 0.5, 0.5}, 1.0, 3, 42);
  CHECK(s.pts == s2.pts);  // reproducible from the seed
  auto s3 = proxy_surface({0.5, 0.5, 0.5}, 1.0, 3, 43);
  CHECK(s.pts != s3.pts);
}

TEST_CASE("near field: geometry only") {
  auto prob = laplace_volume_problem(GridSpec::with_depth(2, 8, 1), 0.0);
  SciStore<double> sci;
  auto active = iota_vec(prob.size());
  auto cells = cell_partition(prob.points, prob.spec, 0, active);
  REQUIRE(cells.size() == 4);
  const auto& c = cells[0];
  auto nf = near_field(c, prob.points, active, sci);
  // inside ball of radius 1.5 * width, outside the cluster
  const double r = 1.5 * c.width;
  for (int g : nf) {
    CHECK(!std::binary_search(c.indices.begin(), c.indices.end(), g));
    double d2 = 0;
    for (int a = 0; a < 2; ++a) {
      const double d = prob.points.coord(g, a) - c.center[a];
      d2 += d * d;
    }
    CHECK(std::sqrt(d2) < r + 1e-12);
  }

  // a cluster covering the whole domain has an empty near field
  Cluster whole;
  whole.indices = active;
  whole.center = {0.5, 0.5, 0};
  whole.width = 1.0;
  whole.icenter = {8, 8, 0};
  whole.iwidth = 16;
  CHECK(near_field(whole, prob.points, active, sci).empty());
}

TEST_CASE("near field includes SCI-coupled DOFs (brute-force overlap check)") {
  // run one HIF cell level, then check each edge cluster's near field covers
  // every DOF sharing a delta block with it
  auto prob = laplace_volume_problem(GridSpec::with_depth(2, 16, 1), 1.0);
  ActiveState<double> state;
  state.active = iota_vec(prob.size());
  auto cells = cell_partition(prob.points, prob.spec, 0, state.active);
  std::vector<int> eliminated;
  for (const auto& c : cells) {
    auto res = skeletonize_cluster(prob, state, c, 1e-6, Variant::standard, 1);
    if (!res.rec.rd.empty() && !res.rec.sk.empty()) state.sci.add(res.rec.sk, std::move(res.delta));
    eliminated.insert(eliminated.end(), res.rec.rd.begin(), res.rec.rd.end());
  }
  std::sort(eliminated.begin(), eliminated.end());
  std::vector<int> active1;
  std::set_difference(state.active.begin(), state.active.end(), eliminated.begin(),
                      eliminated.end(), std::back_inserter(active1));
  state.active = active1;

  auto edges = edge_partition(prob.points, prob.spec, 0, state.active);
  REQUIRE(!edges.empty());
  for (const auto& e : edges) {
    auto nf = near_field(e, prob.points, state.active, state.sci);
    std::set<int> nfset(nf.begin(), nf.end());
    // brute force over all deltas
    for (const auto& d : state.sci.deltas()) {
      const bool touches = std::any_of(d.idx.begin(), d.idx.end(), [&](int g) {
        return std::binary_search(e.indices.begin(), e.indices.end(), g);
      });
      if (!touches) continue;
      for (int g : d.idx) {
        if (std::binary_search(e.indices.begin(), e.indices.end(), g)) continue;
        if (!std::binary_search(state.active.begin(), state.active.end(), g)) continue;
        CHECK(nfset.count(g) == 1);
      }
    }
  }
}

TEST_CASE("compression matrix shapes and proxy rows") {
  auto prob = laplace_volume_problem(GridSpec::with_depth(2, 8, 1), 0.0);
  SciStore<double> sci;
  auto active = iota_vec(prob.size());
  auto cells = cell_partition(prob.points, prob.spec, 0, active);
  const auto& c = cells[0];
  auto nf = near_field(c, prob.points, active, sci);
  auto proxy = proxy_surface(c.center, c.width, 2, 7);

  auto ysym = assemble_compression_matrix(prob, c, nf, proxy, sci, true);
  CHECK(ysym.y.rows() == int(nf.size()) + 64);
  CHECK(ysym.y.cols() == int(c.indices.size()));
  CHECK_FALSE(ysym.has_s_rows());  // level 0: no SCIs anywhere

  auto yuns = assemble_compression_matrix(prob, c, nf, proxy, sci, false);
  CHECK(yuns.y.rows() == 2 * (int(nf.size()) + 64));

  // with b = c = 1 the proxy rows are raw kernel values times h^d
  const double hd = prob.points.element_measure();
  for (int j = 0; j < 3; ++j) {
    const auto xj = prob.points.point(c.indices[j]);
    const double d0 = std::hypot(proxy.pts[0] - xj[0], proxy.pts[1] - xj[1]);
    CHECK(ysym.y(int(nf.size()), j) ==
          doctest::Approx(-std::log(d0) / (2.0 * M_PI) * hd).epsilon(1e-13));
  }
}

TEST_CASE("scaled tolerance: two-scale rule") {
  CompressionMatrix<double> y;
  y.y = DenseMatrix<double>(4, 2);
  y.smask.assign(y.y.size(), 0);
  y.y(0, 0) = 1e-4;
  y.y(1, 1) = 1e-4;
  y.y(2, 0) = 1.0;
  y.y(3, 1) = 1.0;
  // no S rows: plain eps
  CHECK(scaled_tolerance(y, 1e-6) == doctest::Approx(1e-6));
  // rows 2,3 tagged S: rho = 1e-4 / 1
  y.smask[std::size_t(0) * 4 + 2] = 1;
  y.smask[std::size_t(1) * 4 + 3] = 1;
  CHECK(scaled_tolerance(y, 1e-6) == doctest::Approx(1e-10).epsilon(0.05));
  // dominant kernel rows clamp at eps
  y.y(0, 0) = 10.0;
  y.y(1, 1) = 10.0;
  CHECK(scaled_tolerance(y, 1e-6) == doctest::Approx(1e-6));
}

TEST_CASE("split by sparsity: supports {1,2},{1,2},{3} -> two groups") {
  CompressionMatrix<double> y;
  y.y = DenseMatrix<double>(4, 3);
  y.smask.assign(y.y.size(), 0);
  auto mark = [&](int i, int j) { y.smask[std::size_t(j) * 4 + i] = 1; };
  mark(1, 0);
  mark(2, 0);
  mark(1, 1);
  mark(2, 1);
  mark(3, 2);
  auto groups = split_by_sparsity(y);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0] == std::vector<int>{0, 1});
  CHECK(groups[1] == std::vector<int>{2});

  // permutation invariance up to relabeling: swap columns 0 and 2
  CompressionMatrix<double> yp;
  yp.y = DenseMatrix<double>(4, 3);
  yp.smask.assign(yp.y.size(), 0);
  auto markp = [&](int i, int j) { yp.smask[std::size_t(j) * 4 + i] = 1; };
  markp(3, 0);
  markp(1, 1);
  markp(2, 1);
  markp(1, 2);
  markp(2, 2);
  auto groupsp = split_by_sparsity(yp);
  REQUIRE(groupsp.size() == 2);
  CHECK(groupsp[0] == std::vector<int>{0});
  CHECK(groupsp[1] == std::vector<int>{1, 2});
}

TEST_CASE("split by sparsity: no S rows keeps the cluster whole") {
  CompressionMatrix<double> y;
  y.y = DenseMatrix<double>(3, 5);
  y.smask.assign(y.y.size(), 0);
  auto groups = split_by_sparsity(y);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].size() == 5);
}

TEST_CASE("split groups on a real edge cluster separate the half-edges") {
  // after one cell level, an edge cluster's S-supported columns group by the
  // source cell of each DOF (the half-edges)
  auto prob = laplace_volume_problem(GridSpec::with_depth(2, 16, 1), 1.0);
  ActiveState<double> state;
  state.active = iota_vec(prob.size());
  auto cells = cell_partition(prob.points, prob.spec, 0, state.active);
  std::vector<int> cell_of(prob.size(), -1);
  for (int ci = 0; ci < int(cells.size()); ++ci)
    for (int g : cells[ci].indices) cell_of[g] = ci;
  std::vector<int> eliminated;
  for (const auto& c : cells) {
    auto res = skeletonize_cluster(prob, state, c, 1e-6, Variant::standard, 1);
    if (!res.rec.rd.empty() && !res.rec.sk.empty()) state.sci.add(res.rec.sk, std::move(res.delta));
    eliminated.insert(eliminated.end(), res.rec.rd.begin(), res.rec.rd.end());
  }
  std::sort(eliminated.begin(), eliminated.end());
  std::vector<int> active1;
  std::set_difference(state.active.begin(), state.active.end(), eliminated.begin(),
                      eliminated.end(), std::back_inserter(active1));
  state.active = active1;

  auto edges = edge_partition(prob.points, prob.spec, 0, state.active);
  bool saw_multi_cell_edge = false;
  for (const auto& e : edges) {
    std::set<int> cells_present;
    for (int g : e.indices) cells_present.insert(cell_of[g]);
    if (cells_present.size() < 2) continue;
    saw_multi_cell_edge = true;
    auto nf = near_field(e, prob.points, state.active, state.sci);
    auto proxy = proxy_surface(e.center, e.width, 2, 1);
    auto y = assemble_compression_matrix(prob, e, nf, proxy, state.sci, prob.symmetric);
    REQUIRE(y.has_s_rows());
    auto groups = split_by_sparsity(y);
    CHECK(groups.size() >= cells_present.size());
    for (const auto& g : groups) {
      // a group with any S support draws all its columns from one cell
      bool has_support = false;
      for (int col : g)
        for (int i = 0; i < y.y.rows(); ++i)
          has_support = has_support || y.smask[std::size_t(col) * y.y.rows() + i];
      if (!has_support) continue;
      std::set<int> src;
      for (int col : g) src.insert(cell_of[e.indices[col]]);
      CHECK(src.size() == 1);
    }
  }
  CHECK(saw_multi_cell_edge);
}

TEST_CASE("split groups partition the cluster") {
  RandomStream rng(17);
  CompressionMatrix<double> y;
  y.y = DenseMatrix<double>(10, 12);
  y.smask.assign(y.y.size(), 0);
  for (int j = 0; j < 12; ++j) {
    const int pattern = int(rng.uniform() * 4);
    for (int i = 0; i < 3; ++i) y.smask[std::size_t(j) * 10 + (pattern * 2 + i) % 10] = 1;
  }
  auto groups = split_by_sparsity(y);
  std::vector<int> seen;
  for (const auto& g : groups) seen.insert(seen.end(), g.begin(), g.end());
  std::sort(seen.begin(), seen.end());
  CHECK(seen == iota_vec(12));
}
