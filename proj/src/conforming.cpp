// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpfeec/conforming.hpp"

#include <algorithm>

#include "mpfeec/errors.hpp"

namespace mpfeec {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::SparseMatrix<double> from_triplets(const Triplets& t, int rows,
                                          int cols) {
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

int flat0(const MultipatchComplex& cx, int k, int i1, int i2) {
  int n1 = cx.spaces(k).n() + 1;
  return cx.offset(0, k) + i1 + n1 * i2;
}

} // namespace

ConformingLayer::ConformingLayer(const MultipatchComplex& cx) : cx_(&cx) {
  build();
}

int ConformingLayer::edge_n(int e) const {
  const auto& er = cx_->edges[e];
  return cx_->spaces(er.sides[er.owner_side()].patch).n();
}

int ConformingLayer::edge_dof(int e, int side, int j) const {
  const auto& f = cx_->edges[e].sides[side];
  int n = cx_->spaces(f.patch).n();
  int i[2];
  i[f.axis_par] = j;
  i[f.axis_perp()] = f.perp_index(n);
  return flat0(*cx_, f.patch, i[0], i[1]);
}

int ConformingLayer::corner_dof(int v, int k) const {
  const auto& vr = cx_->vertices[v];
  int ci = vr.corner_of(k);
  if (ci < 0) throw InvalidTarget("patch not at vertex");
  int n = cx_->spaces(k).n();
  return flat0(*cx_, k, vr.corner[ci][0] * n, vr.corner[ci][1] * n);
}

int ConformingLayer::vertex_parallel_index(int e, int side, int v) const {
  const auto& f = cx_->edges[e].sides[side];
  const auto& vr = cx_->vertices[v];
  int ci = vr.corner_of(f.patch);
  if (ci < 0) throw InvalidTarget("patch not at vertex");
  return vr.corner[ci][f.axis_par] * cx_->spaces(f.patch).n();
}

Eigen::VectorXd ConformingLayer::edge_function(int e, int i) const {
  const auto& er = cx_->edges[e];
  Eigen::VectorXd col = Eigen::VectorXd::Zero(cx_->dim(0));
  int own = er.owner_side();
  col[edge_dof(e, own, i)] = 1.0;
  if (!er.boundary) {
    int other = 1 - own;
    const Eigen::MatrixXd& W = expansion_[e];
    for (int j = 0; j < W.rows(); ++j)
      if (W(j, i) != 0.0) col[edge_dof(e, other, j)] += W(j, i);
  }
  return col;
}

Eigen::VectorXd ConformingLayer::vertex_function(int v) const {
  const auto& vr = cx_->vertices[v];
  Eigen::VectorXd col = Eigen::VectorXd::Zero(cx_->dim(0));
  for (int e : vr.edges) {
    int own = cx_->edges[e].owner_side();
    col += edge_function(e, vertex_parallel_index(e, own, v));
  }
  for (int k : vr.patches) col[corner_dof(v, k)] -= 1.0;
  return col;
}

const Eigen::SparseMatrix<double>& ConformingLayer::Iev(int e, int v) const {
  auto it = Iev_.find({e, v});
  if (it == Iev_.end()) throw InvalidTarget("vertex not on edge");
  return it->second;
}
const Eigen::SparseMatrix<double>& ConformingLayer::Pev(int e, int v) const {
  auto it = Pev_.find({e, v});
  if (it == Pev_.end()) throw InvalidTarget("vertex not on edge");
  return it->second;
}
const Eigen::SparseMatrix<double>& ConformingLayer::Ibar_ev(int e,
                                                            int v) const {
  auto it = Ibev_.find({e, v});
  if (it == Ibev_.end()) throw InvalidTarget("vertex not on edge");
  return it->second;
}

BrokenField ConformingLayer::apply_P(const BrokenField& f0) const {
  if (f0.ell != 0) throw DimensionMismatch("apply_P needs ell=0");
  return unflatten(*cx_, 0, P_ * flatten(*cx_, f0));
}

void ConformingLayer::build() {
  const auto& cx = *cx_;
  const int N = cx.dim(0);
  const bool homog = cx.bc == BcMode::Homogeneous;

  // edge trace expansions (coarse basis, possibly reversed, in fine basis)
  expansion_.resize(cx.edges.size());
  for (const auto& er : cx.edges) {
    if (er.boundary) continue;
    const auto& vm = cx.spaces(er.kminus()).v0();
    const auto& vp = cx.spaces(er.kplus()).v0();
    double res = 0;
    expansion_[er.id] = expansion_matrix(vm, vp, er.flip, &res);
    if (res > 1e-10)
      throw NestednessExpansionFailed("edge " + std::to_string(er.id) +
                                      ": trace expansion residual " +
                                      std::to_string(res));
  }

  // I^k_0
  Ik0_.clear();
  for (int k = 0; k < cx.num_patches(); ++k) {
    Triplets t;
    int n = cx.spaces(k).n();
    for (int i2 = 1; i2 < n; ++i2)
      for (int i1 = 1; i1 < n; ++i1) {
        int d = flat0(cx, k, i1, i2);
        t.emplace_back(d, d, 1.0);
      }
    Ik0_.push_back(from_triplets(t, N, N));
  }

  // I^e, P^e
  Ie_.assign(cx.edges.size(), {});
  Pe_.assign(cx.edges.size(), {});
  for (const auto& er : cx.edges) {
    Triplets ti, tp;
    for (size_t s = 0; s < er.sides.size(); ++s) {
      int n = cx.spaces(er.sides[s].patch).n();
      for (int j = 0; j <= n; ++j) {
        int d = edge_dof(er.id, int(s), j);
        ti.emplace_back(d, d, 1.0);
      }
    }
    Ie_[er.id] = from_triplets(ti, N, N);
    bool has_pe = !(homog && er.boundary);
    if (has_pe) {
      int ne = edge_n(er.id);
      int own = er.owner_side();
      for (int i = 0; i <= ne; ++i) {
        Eigen::VectorXd col = edge_function(er.id, i);
        int src = edge_dof(er.id, own, i);
        for (int r = 0; r < N; ++r)
          if (col[r] != 0.0) tp.emplace_back(r, src, col[r]);
      }
    }
    Pe_[er.id] = from_triplets(tp, N, N);
  }

  // vertex-based projectors
  Iv_.assign(cx.vertices.size(), {});
  Pv_.assign(cx.vertices.size(), {});
  Ibv_.assign(cx.vertices.size(), {});
  for (const auto& vr : cx.vertices) {
    Triplets ti, tp, tb;
    for (int k : vr.patches) {
      int d = corner_dof(vr.id, k);
      ti.emplace_back(d, d, 1.0);
    }
    Iv_[vr.id] = from_triplets(ti, N, N);

    Eigen::VectorXd lv = vertex_function(vr.id);
    bool has_pv = !(homog && vr.boundary);
    if (has_pv) {
      if (vr.coarse_patch < 0)
        throw InvalidTarget("vertex " + std::to_string(vr.id) +
                            " lacks a coarse patch");
      int src = corner_dof(vr.id, vr.coarse_patch);
      for (int r = 0; r < N; ++r)
        if (lv[r] != 0.0) tp.emplace_back(r, src, lv[r]);
    }
    Pv_[vr.id] = from_triplets(tp, N, N);

    for (int k : vr.patches) {
      int src = corner_dof(vr.id, k);
      int lo = cx.offset(0, k), hi = lo + cx.patch_dim(0, k);
      for (int r = lo; r < hi; ++r)
        if (lv[r] != 0.0) tb.emplace_back(r, src, lv[r]);
    }
    Ibv_[vr.id] = from_triplets(tb, N, N);
  }

  // edge-vertex projectors for every (edge, endpoint vertex) pair
  for (const auto& er : cx.edges) {
    for (int v : cx.vertices_of_edge(er.id)) {
      Triplets ti, tp, tb;
      for (size_t s = 0; s < er.sides.size(); ++s) {
        int k = er.sides[s].patch;
        int d = corner_dof(v, k);
        ti.emplace_back(d, d, 1.0);
      }
      Iev_[{er.id, v}] = from_triplets(ti, N, N);

      int own = er.owner_side();
      Eigen::VectorXd lev =
          edge_function(er.id, vertex_parallel_index(er.id, own, v));
      if (er.minus >= 0 && !(homog && er.boundary)) {
        int src = corner_dof(v, er.kminus());
        for (int r = 0; r < N; ++r)
          if (lev[r] != 0.0) tp.emplace_back(r, src, lev[r]);
      }
      Pev_[{er.id, v}] = from_triplets(tp, N, N);

      for (size_t s = 0; s < er.sides.size(); ++s) {
        int k = er.sides[s].patch;
        int src = corner_dof(v, k);
        int lo = cx.offset(0, k), hi = lo + cx.patch_dim(0, k);
        for (int r = lo; r < hi; ++r)
          if (lev[r] != 0.0) tb.emplace_back(r, src, lev[r]);
      }
      Ibev_[{er.id, v}] = from_triplets(tb, N, N);
    }
  }

  // I^e_0 = I^e - sum_v I^e_v,  P^e_0 = P^e - sum_v P^e_v
  Ie0_.assign(cx.edges.size(), {});
  Pe0_.assign(cx.edges.size(), {});
  for (const auto& er : cx.edges) {
    Eigen::SparseMatrix<double> ie0 = Ie_[er.id];
    Eigen::SparseMatrix<double> pe0 = Pe_[er.id];
    for (int v : cx.vertices_of_edge(er.id)) {
      ie0 = ie0 - Iev_[{er.id, v}];
      pe0 = pe0 - Pev_[{er.id, v}];
    }
    ie0.prune(0.0);
    pe0.prune(0.0);
    Ie0_[er.id] = ie0;
    Pe0_[er.id] = pe0;
  }

  // conforming projection
  Eigen::SparseMatrix<double> P(N, N);
  for (int k = 0; k < cx.num_patches(); ++k) P = P + Ik0_[k];
  for (const auto& er : cx.edges) P = P + Pe0_[er.id];
  for (const auto& vr : cx.vertices) P = P + Pv_[vr.id];
  P.prune(0.0);
  P_ = P;

  // conforming basis and embedding
  basis_.clear();
  Triplets emb;
  int col = 0;
  for (int k = 0; k < cx.num_patches(); ++k) {
    int n = cx.spaces(k).n();
    for (int i2 = 1; i2 < n; ++i2)
      for (int i1 = 1; i1 < n; ++i1) {
        basis_.push_back({ConformingBasisEntry::Kind::Interior, k, i1, i2});
        emb.emplace_back(flat0(cx, k, i1, i2), col, 1.0);
        ++col;
      }
  }
  for (const auto& er : cx.edges) {
    if (er.boundary && (homog || er.minus < 0)) continue;
    int ne = edge_n(er.id);
    for (int i = 1; i < ne; ++i) {
      basis_.push_back({ConformingBasisEntry::Kind::Edge, er.id, i, 0});
      Eigen::VectorXd c = edge_function(er.id, i);
      for (int r = 0; r < N; ++r)
        if (c[r] != 0.0) emb.emplace_back(r, col, c[r]);
      ++col;
    }
  }
  for (const auto& vr : cx.vertices) {
    if (homog && vr.boundary) continue;
    basis_.push_back({ConformingBasisEntry::Kind::Vertex, vr.id, 0, 0});
    Eigen::VectorXd c = vertex_function(vr.id);
    for (int r = 0; r < N; ++r)
      if (c[r] != 0.0) emb.emplace_back(r, col, c[r]);
    ++col;
  }
  embedding_ = from_triplets(emb, N, col);
}

namespace {

LogicalBox hull(const LogicalBox& a, const LogicalBox& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  LogicalBox h;
  h.lo = a.lo.cwiseMin(b.lo);
  h.hi = a.hi.cwiseMax(b.hi);
  return h;
}

bool intersects(const LogicalBox& a, const LogicalBox& b) {
  if (a.empty() || b.empty()) return false;
  return a.lo[0] < b.hi[0] + 1e-14 && b.lo[0] < a.hi[0] + 1e-14 &&
         a.lo[1] < b.hi[1] + 1e-14 && b.lo[1] < a.hi[1] + 1e-14;
}

LogicalBox clamp01(LogicalBox b) {
  b.lo = b.lo.cwiseMax(Vec2(0, 0)).cwiseMin(Vec2(1, 1));
  b.hi = b.hi.cwiseMax(Vec2(0, 0)).cwiseMin(Vec2(1, 1));
  return b;
}

LogicalBox box_from_frame(const SideFrame& f, double s0, double s1, double t0,
                          double t1) {
  Vec2 a = f.to_logical(s0, t0);
  Vec2 b = f.to_logical(s1, t1);
  LogicalBox box;
  box.lo = a.cwiseMin(b);
  box.hi = a.cwiseMax(b);
  return clamp01(box);
}

std::pair<double, double> interval_map(const EdgeRecord& er, double a,
                                       double b) {
  if (!er.flip) return {a, b};
  return {1.0 - b, 1.0 - a};
}

} // namespace

PatchBoxes extend_patch(const MultipatchComplex& cx, int k,
                        const LogicalBox& box) {
  PatchBoxes out;
  auto r = extension_index_set(cx.spaces(k), box);
  if (!r.empty()) out[k] = r.extension;
  return out;
}

PatchBoxes extend_edge(const MultipatchComplex& cx, int e,
                       const PatchBoxes& region) {
  const auto& er = cx.edges[e];
  for (const auto& [k, b] : region)
    if (!er.touches(k))
      throw RegionOutsideNeighborhood("region leaves Omega(e)");

  PatchBoxes out;
  for (const auto& [k, b] : region) {
    auto ext = extend_patch(cx, k, b);
    for (const auto& [kk, bb] : ext)
      out[kk] = out.count(kk) ? hull(out[kk], bb) : bb;
  }

  // include supports of edge functions meeting the region
  int own = er.owner_side();
  const auto& fo = er.sides[own];
  const auto& vo = cx.spaces(fo.patch).v0();
  int ne = vo.last_index();
  for (int i = 0; i <= ne; ++i) {
    auto [sa, sb] = vo.support(i);
    std::vector<std::pair<int, LogicalBox>> pieces;
    for (size_t s = 0; s < er.sides.size(); ++s) {
      const auto& f = er.sides[s];
      const auto& vs = cx.spaces(f.patch).v0();
      double pa = sa, pb = sb;
      if (int(s) != own) std::tie(pa, pb) = interval_map(er, sa, sb);
      auto [ta, tb] = vs.support(f.perp_index(vs.last_index()));
      double tdiam = tb - ta;
      pieces.push_back({f.patch, box_from_frame(f, pa, pb, 0.0, tdiam)});
    }
    bool meets = false;
    for (const auto& [k, b] : pieces) {
      auto it = region.find(k);
      if (it != region.end() && intersects(b, it->second)) meets = true;
    }
    if (meets)
      for (const auto& [k, b] : pieces)
        out[k] = out.count(k) ? hull(out[k], b) : b;
  }

  // one symmetrization pass: both sides share the same parallel trace
  if (!er.boundary && out.count(er.kminus()) && out.count(er.kplus())) {
    const auto& fm = er.sides[er.minus];
    const auto& fp = er.sides[er.plus];
    auto sm = std::make_pair(out[fm.patch].lo[fm.axis_par],
                             out[fm.patch].hi[fm.axis_par]);
    auto sp = std::make_pair(out[fp.patch].lo[fp.axis_par],
                             out[fp.patch].hi[fp.axis_par]);
    auto spm = interval_map(er, sp.first, sp.second); // plus -> minus coords
    double lo = std::min(sm.first, spm.first);
    double hi = std::max(sm.second, spm.second);
    out[fm.patch].lo[fm.axis_par] = lo;
    out[fm.patch].hi[fm.axis_par] = hi;
    auto back = interval_map(er, lo, hi);
    out[fp.patch].lo[fp.axis_par] = back.first;
    out[fp.patch].hi[fp.axis_par] = back.second;
  }
  for (auto& [k, b] : out) b = clamp01(b);
  return out;
}

PatchBoxes extend_vertex(const MultipatchComplex& cx, int v,
                         const PatchBoxes& region) {
  const auto& vr = cx.vertices[v];
  for (const auto& [k, b] : region)
    if (vr.corner_of(k) < 0)
      throw RegionOutsideNeighborhood("region leaves Omega(v)");

  PatchBoxes out;
  for (const auto& [k, b] : region) {
    auto ext = extend_patch(cx, k, b);
    for (const auto& [kk, bb] : ext)
      out[kk] = out.count(kk) ? hull(out[kk], bb) : bb;
  }

  // S^v: corner supports and the edge-function supports at the vertex
  for (size_t pi = 0; pi < vr.patches.size(); ++pi) {
    int k = vr.patches[pi];
    const auto& vs = cx.spaces(k).v0();
    int n = vs.last_index();
    LogicalBox b;
    auto [a1, b1] = vs.support(vr.corner[pi][0] == 0 ? 0 : n);
    auto [a2, b2] = vs.support(vr.corner[pi][1] == 0 ? 0 : n);
    b.lo = Vec2(a1, a2);
    b.hi = Vec2(b1, b2);
    out[k] = out.count(k) ? hull(out[k], clamp01(b)) : clamp01(b);
  }
  for (int e : vr.edges) {
    const auto& er = cx.edges[e];
    int own = er.owner_side();
    const auto& fo = er.sides[own];
    const auto& vo = cx.spaces(fo.patch).v0();
    int iv = vr.corner[vr.corner_of(fo.patch)][fo.axis_par] * vo.last_index();
    auto [sa, sb] = vo.support(iv);
    for (size_t s = 0; s < er.sides.size(); ++s) {
      const auto& f = er.sides[s];
      const auto& vs = cx.spaces(f.patch).v0();
      double pa = sa, pb = sb;
      if (int(s) != own) std::tie(pa, pb) = interval_map(er, sa, sb);
      auto [ta, tb] = vs.support(f.perp_index(vs.last_index()));
      LogicalBox b = box_from_frame(f, pa, pb, 0.0, tb - ta);
      out[f.patch] = out.count(f.patch) ? hull(out[f.patch], b) : b;
    }
  }

  // continuity across the interior edges inside Omega(v)
  for (int pass = 0; pass < 8; ++pass) {
    bool changed = false;
    for (int e : vr.edges) {
      const auto& er = cx.edges[e];
      if (er.boundary) continue;
      if (!out.count(er.kminus()) || !out.count(er.kplus())) continue;
      const auto& fm = er.sides[er.minus];
      const auto& fp = er.sides[er.plus];
      double lo_m = out[fm.patch].lo[fm.axis_par];
      double hi_m = out[fm.patch].hi[fm.axis_par];
      auto [lo_pm, hi_pm] = interval_map(er, out[fp.patch].lo[fp.axis_par],
                                         out[fp.patch].hi[fp.axis_par]);
      double lo = std::min(lo_m, lo_pm), hi = std::max(hi_m, hi_pm);
      if (lo < lo_m - 1e-14 || hi > hi_m + 1e-14) changed = true;
      if (lo < lo_pm - 1e-14 || hi > hi_pm + 1e-14) changed = true;
      out[fm.patch].lo[fm.axis_par] = lo;
      out[fm.patch].hi[fm.axis_par] = hi;
      auto back = interval_map(er, lo, hi);
      out[fp.patch].lo[fp.axis_par] = back.first;
      out[fp.patch].hi[fp.axis_par] = back.second;
    }
    if (!changed) break;
  }
  for (auto& [k, b] : out) b = clamp01(b);
  return out;
}

PatchBoxes boxes_union(const PatchBoxes& a, const PatchBoxes& b) {
  PatchBoxes out = a;
  for (const auto& [k, box] : b)
    out[k] = out.count(k) ? hull(out[k], box) : box;
  return out;
}

bool boxes_contain(const PatchBoxes& outer, const PatchBoxes& inner) {
  for (const auto& [k, box] : inner) {
    if (box.empty()) continue;
    auto it = outer.find(k);
    if (it == outer.end() || !it->second.contains(box)) return false;
  }
  return true;
}

} // namespace mpfeec
