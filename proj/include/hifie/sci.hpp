#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "hifie/dense.hpp"

namespace hifie {

// Store of Schur complement interaction (SCI) blocks. Each skeletonization
// writes one dense delta over its skeleton indices; the level matrix is the
// kernel entries plus the sum of all overlapping deltas.
template <class S>
class SciStore {
 public:
  struct Delta {
    std::vector<int> idx;  // global DOF indices (ascending)
    DenseMatrix<S> block;  // |idx| x |idx|
  };

  bool empty() const { return deltas_.empty(); }
  std::size_t count() const { return deltas_.size(); }
  const std::vector<Delta>& deltas() const { return deltas_; }

  void add(std::vector<int> idx, DenseMatrix<S> block) {
    const int id = int(deltas_.size());
    for (int g : idx) touch_[g].push_back(id);
    deltas_.push_back(Delta{std::move(idx), std::move(block)});
  }

  /// Delta ids having at least one index in `dofs`.
  std::vector<int> touching(const std::vector<int>& dofs) const {
    std::vector<int> ids;
    for (int g : dofs) {
      auto it = touch_.find(g);
      if (it == touch_.end()) continue;
      ids.insert(ids.end(), it->second.begin(), it->second.end());
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }

  /// All DOFs coupled to `cluster` through some shared delta (cluster members
  /// included; callers filter).
  std::vector<int> coupled(const std::vector<int>& cluster) const {
    std::vector<int> out;
    for (int id : touching(cluster)) {
      const auto& d = deltas_[id];
      out.insert(out.end(), d.idx.begin(), d.idx.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Add every overlapping delta into M over rows p and columns q. When
  /// `mask` is non-null it is marked 1 (col-major, same shape as M) wherever
  /// an entry received a contribution.
  void overlay(DenseMatrix<S>& m, const std::vector<int>& p, const std::vector<int>& q,
               std::vector<std::uint8_t>* mask = nullptr) const {
    if (deltas_.empty()) return;
    std::unordered_map<int, int> prow, qcol;
    prow.reserve(p.size() * 2);
    qcol.reserve(q.size() * 2);
    for (int i = 0; i < int(p.size()); ++i) prow.emplace(p[i], i);
    for (int j = 0; j < int(q.size()); ++j) qcol.emplace(q[j], j);
    std::vector<int> cand = touching(p);
    for (int id : cand) {
      const auto& d = deltas_[id];
      // local positions present in p and q
      std::vector<std::pair<int, int>> rp, cq;  // (delta-local, M-local)
      for (int t = 0; t < int(d.idx.size()); ++t) {
        auto ip = prow.find(d.idx[t]);
        if (ip != prow.end()) rp.emplace_back(t, ip->second);
        auto iq = qcol.find(d.idx[t]);
        if (iq != qcol.end()) cq.emplace_back(t, iq->second);
      }
      if (rp.empty() || cq.empty()) continue;
      for (const auto& [tc, jc] : cq) {
        S* mcol = m.col(jc);
        const S* dcol = d.block.col(tc);
        for (const auto& [tr, ir] : rp) {
          mcol[ir] += dcol[tr];
          if (mask) (*mask)[std::size_t(jc) * m.rows() + ir] = 1;
        }
      }
    }
  }

 private:
  std::vector<Delta> deltas_;
  std::unordered_map<int, std::vector<int>> touch_;
};

}  // namespace hifie
