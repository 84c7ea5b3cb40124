// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpfeec/antiderivatives.hpp"

#include <algorithm>
#include <cmath>

#include "mpfeec/errors.hpp"
#include "mpfeec/geometry.hpp"

namespace mpfeec {

namespace {

// breakpoints of the patch space expressed in the frame's t coordinate
std::vector<double> t_breaks(const MultipatchComplex& cx, const SideFrame& f) {
  const auto& b = cx.spaces(f.patch).v0().breakpoints();
  std::vector<double> out;
  for (double x : b) out.push_back(f.perp_dir() * (x - f.perp_edge));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> s_breaks(const MultipatchComplex& cx, int patch) {
  return cx.spaces(patch).v0().breakpoints();
}

double eta_zero(const EdgeRecord& er, int side) {
  if (er.boundary) return 0.0;
  return (side == er.plus && er.flip) ? 1.0 : 0.0;
}

} // namespace

double circulation(const MultipatchComplex& cx, const VectorOnPatches& u,
                   const CurvePlan& plan, int quad_points) {
  double total = 0.0;
  for (const auto& seg : plan) {
    if (std::abs(seg.to - seg.from) < 1e-15) continue;
    const auto& m = cx.mapping(seg.patch);
    auto integrand = [&](double z) {
      Vec2 xh;
      xh[seg.axis] = z;
      xh[1 - seg.axis] = seg.fixed;
      Vec2 uhat = m.DF(xh).transpose() * u(seg.patch, xh);
      return uhat[seg.axis];
    };
    total += integrate_subdivided(integrand, seg.from, seg.to,
                                  s_breaks(cx, seg.patch), quad_points);
  }
  return total;
}

double curve_plan_gap(const MultipatchComplex& cx, const CurvePlan& plan) {
  double gap = 0.0;
  auto endpoint = [&](const CurveSegment& s, bool end) {
    Vec2 xh;
    xh[s.axis] = end ? s.to : s.from;
    xh[1 - s.axis] = s.fixed;
    return cx.mapping(s.patch).F(xh);
  };
  for (size_t i = 0; i + 1 < plan.size(); ++i)
    gap = std::max(gap, (endpoint(plan[i], true) - endpoint(plan[i + 1], false)).norm());
  return gap;
}

int PerpCurveSystem::patch_role(int k) const {
  if (k == coarse_patch) return 0;
  if (k == fine_patch) return 1;
  return -1;
}

PerpCurveSystem edge_perp_system(const MultipatchComplex& cx, int e) {
  const auto& er = cx.edges[e];
  PerpCurveSystem s;
  s.central_edge = e;
  s.s0 = 0.0;
  if (er.minus >= 0) {
    s.coarse_patch = er.kminus();
    s.cframe = er.sides[er.minus];
  }
  if (er.plus >= 0) {
    s.fine_patch = er.kplus();
    s.fframe = er.sides[er.plus];
  }
  return s;
}

VertexCurveRule build_vertex_curves(const MultipatchComplex& cx, int v) {
  const auto& vr = cx.vertices[v];
  if (!vr.seq_valid)
    throw InvalidSequences("vertex " + std::to_string(v) +
                           " has no valid sequence decomposition");
  VertexCurveRule rule;
  rule.vertex = v;
  rule.avg_len = vr.h_vertex;
  for (const auto& seq : vr.seqs) {
    PerpCurveSystem s;
    s.central_edge = seq.central_edge;
    const auto& er = cx.edges[seq.central_edge];
    if (seq.fine_only) {
      s.fine_patch = seq.patches[0];
      s.fframe = er.sides[er.side_of(s.fine_patch)];
    } else {
      s.coarse_patch = seq.patches[0];
      s.cframe = er.sides[er.side_of(s.coarse_patch)];
      int ci = vr.corner_of(s.coarse_patch);
      s.s0 = vr.corner[ci][s.cframe.axis_par];
      if (seq.patches.size() > 1) {
        s.fine_patch = seq.patches[1];
        s.fframe = er.sides[er.side_of(s.fine_patch)];
      }
    }
    rule.systems.push_back(s);
  }
  return rule;
}

int VertexCurveRule::system_of_patch(int k) const {
  for (size_t i = 0; i < systems.size(); ++i)
    if (systems[i].patch_role(k) >= 0) return int(i);
  return -1;
}

AverageRule make_average_rule(const MultipatchComplex& cx,
                              const std::vector<PerpCurveSystem>& systems,
                              double len, int n_avg) {
  AverageRule rule;
  rule.len = len;
  std::vector<double> cuts{0.0, len};
  for (const auto& s : systems) {
    const SideFrame& f = s.fine_only() ? s.fframe : s.cframe;
    for (double t : t_breaks(cx, f))
      if (t > 1e-14 && t < len - 1e-14) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-13; }),
             cuts.end());
  const GaussRule& g = gauss_legendre(n_avg);
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    double half = 0.5 * (cuts[i + 1] - cuts[i]);
    for (int q = 0; q < n_avg; ++q) {
      rule.nodes.push_back(mid + half * g.nodes[q]);
      rule.weights.push_back(half * g.weights[q]);
    }
  }
  return rule;
}

CurvePlan perp_curve_plan(const MultipatchComplex& cx,
                          const PerpCurveSystem& s, int k, const Vec2& xhat,
                          double a) {
  const auto& er = cx.edges[s.central_edge];
  CurvePlan plan;
  int role = s.patch_role(k);
  if (role < 0) throw PatchNotOnEdge("patch not in curve system");
  auto coarse_part = [&](double s_target) {
    const SideFrame& f = s.cframe;
    double level = f.perp_edge + f.perp_dir() * a;
    plan.push_back({f.patch, f.axis_par, level, s.s0, s_target});
  };
  if (role == 0) {
    auto [sx, tx] = s.cframe.from_logical(xhat);
    coarse_part(sx);
    const SideFrame& f = s.cframe;
    plan.push_back({f.patch, f.axis_perp(), sx, f.perp_edge + f.perp_dir() * a,
                    xhat[f.axis_perp()]});
  } else {
    auto [sx, tx] = s.fframe.from_logical(xhat);
    if (!s.fine_only()) {
      double sc = er.pmap(sx);
      coarse_part(sc);
      const SideFrame& f = s.cframe;
      plan.push_back({f.patch, f.axis_perp(), sc,
                      f.perp_edge + f.perp_dir() * a, f.perp_edge});
    }
    const SideFrame& f = s.fframe;
    plan.push_back({f.patch, f.axis_perp(), sx, f.perp_edge,
                    xhat[f.axis_perp()]});
  }
  return plan;
}

CurvePlan parallel_curve_plan(const MultipatchComplex& cx, int e, int k,
                              const Vec2& xhat) {
  const auto& er = cx.edges[e];
  int side = er.side_of(k);
  if (side < 0) throw PatchNotOnEdge("patch not on edge");
  const SideFrame& f = er.sides[side];
  CurvePlan plan;
  plan.push_back({k, f.axis_par, xhat[f.axis_perp()], eta_zero(er, side),
                  xhat[f.axis_par]});
  return plan;
}

namespace {

CurvePlan reversed(CurvePlan plan) {
  std::reverse(plan.begin(), plan.end());
  for (auto& s : plan) std::swap(s.from, s.to);
  return plan;
}

// beta path of a T-chain anchored at vertex v: along the central edge from
// the vertex corner to (s0, 0), then up the starting edge to level a. For
// fine-only systems the path runs along the central (boundary) edge to the
// foot of x's perpendicular segment.
CurvePlan beta_path(const MultipatchComplex& cx, const PerpCurveSystem& s,
                    int v, const Vec2* xhat_fine, double a) {
  const auto& vr = cx.vertices[v];
  CurvePlan plan;
  if (s.fine_only()) {
    const SideFrame& f = s.fframe;
    int ci = vr.corner_of(f.patch);
    double sv = vr.corner[ci][f.axis_par];
    double sx = (*xhat_fine)[f.axis_par];
    plan.push_back({f.patch, f.axis_par, f.perp_edge, sv, sx});
    return plan;
  }
  const SideFrame& f = s.cframe;
  int ci = vr.corner_of(f.patch);
  double sv = vr.corner[ci][f.axis_par];
  plan.push_back({f.patch, f.axis_par, f.perp_edge, sv, s.s0});
  plan.push_back({f.patch, f.axis_perp(), s.s0, f.perp_edge,
                  f.perp_edge + f.perp_dir() * a});
  return plan;
}

} // namespace

CurvePlan tilde_edge_plan(const MultipatchComplex& cx,
                          const PerpCurveSystem& s, int k, const Vec2& xhat,
                          double a) {
  const auto& er = cx.edges[s.central_edge];
  int side = er.side_of(k);
  const SideFrame& fx = er.sides[side];
  // reverse of beta_par: from the parallel-curve start back to the anchor
  CurvePlan beta_par;
  beta_par.push_back({k, fx.axis_perp(), eta_zero(er, side), fx.perp_edge,
                      xhat[fx.axis_perp()]});
  CurvePlan plan = reversed(beta_par);
  if (s.fine_only()) {
    // homogeneous boundary edge: anchor-to-start runs along the edge itself
    const SideFrame& f = s.fframe;
    plan.push_back({f.patch, f.axis_par, f.perp_edge, 0.0, xhat[f.axis_par]});
  } else {
    const SideFrame& f = s.cframe;
    plan.push_back({f.patch, f.axis_perp(), s.s0, f.perp_edge,
                    f.perp_edge + f.perp_dir() * a});
  }
  return plan;
}

CurvePlan tilde_edge_vertex_plan(const MultipatchComplex& cx,
                                 const PerpCurveSystem& se,
                                 const PerpCurveSystem& sv, int v, int k,
                                 const Vec2& xhat, double a_e, double a_v) {
  (void)k;
  CurvePlan be = beta_path(cx, se, v, &xhat, a_e);
  CurvePlan bv = beta_path(cx, sv, v, &xhat, a_v);
  CurvePlan plan = reversed(bv);
  for (const auto& s : be) plan.push_back(s);
  return plan;
}

PhiPatch::PhiPatch(const MultipatchComplex& cx, int k, int axis,
                   const VectorOnPatches& u, int quad_points)
    : cx_(&cx), k_(k), axis_(axis), nq_(quad_points), u_(&u) {}

double PhiPatch::eval(const Vec2& xhat) const {
  double other = xhat[1 - axis_];
  auto it = tables_.find(other);
  if (it == tables_.end()) {
    const auto& m = cx_->mapping(k_);
    const VectorOnPatches* u = u_;
    int k = k_, axis = axis_;
    std::function<double(double)> g = [&m, u, k, axis, other](double z) {
      Vec2 xh;
      xh[axis] = z;
      xh[1 - axis] = other;
      Vec2 uhat = m.DF(xh).transpose() * (*u)(k, xh);
      return uhat[axis];
    };
    it = tables_.emplace(other, Prefix1D(std::move(g), s_breaks(*cx_, k_), nq_))
             .first;
  }
  return it->second.eval(xhat[axis_]);
}

PhiEdgeParallel::PhiEdgeParallel(const MultipatchComplex& cx, int e,
                                 const VectorOnPatches& u, int quad_points)
    : cx_(&cx), e_(e), nq_(quad_points), u_(&u) {}

double PhiEdgeParallel::eval(int k, const Vec2& xhat) const {
  const auto& er = cx_->edges[e_];
  int side = er.side_of(k);
  if (side < 0) throw PatchNotOnEdge("patch not on edge");
  const SideFrame& f = er.sides[side];
  double t = xhat[f.axis_perp()];
  auto key = std::make_pair(side, t);
  auto it = tables_.find(key);
  if (it == tables_.end()) {
    const auto& m = cx_->mapping(k);
    const VectorOnPatches* u = u_;
    int axis = f.axis_par;
    std::function<double(double)> g = [&m, u, k, axis, t](double z) {
      Vec2 xh;
      xh[axis] = z;
      xh[1 - axis] = t;
      Vec2 uhat = m.DF(xh).transpose() * (*u)(k, xh);
      return uhat[axis];
    };
    it = tables_.emplace(key, Prefix1D(std::move(g), s_breaks(*cx_, k), nq_))
             .first;
  }
  return it->second.eval(xhat[f.axis_par]) - it->second.eval(eta_zero(er, side));
}

PhiPerp::PhiPerp(const MultipatchComplex& cx,
                 std::vector<PerpCurveSystem> systems, const AverageRule& rule,
                 const VectorOnPatches& u, int quad_points)
    : cx_(&cx), systems_(std::move(systems)), rule_(rule), u_(&u),
      nq_(quad_points) {
  tables_.resize(systems_.size());
}

double PhiPerp::coarse_value(int sys, double s, double t, double a) const {
  const auto& S = systems_[sys];
  const SideFrame& f = S.cframe;
  auto& tab = tables_[sys];
  auto it = tab.par_at_level.find(a);
  if (it == tab.par_at_level.end()) {
    const auto& m = cx_->mapping(f.patch);
    const VectorOnPatches* u = u_;
    SideFrame fr = f;
    std::function<double(double)> g = [&m, u, fr, a](double z) {
      Vec2 xh = fr.to_logical(z, a);
      Vec2 uhat = m.DF(xh).transpose() * (*u)(fr.patch, xh);
      return uhat[fr.axis_par];
    };
    it = tab.par_at_level
             .emplace(a, Prefix1D(std::move(g), s_breaks(*cx_, f.patch), nq_))
             .first;
  }
  double A = it->second.eval(s) - it->second.eval(S.s0);

  auto ip = tab.perp_at_s_coarse.find(s);
  if (ip == tab.perp_at_s_coarse.end()) {
    const auto& m = cx_->mapping(f.patch);
    const VectorOnPatches* u = u_;
    SideFrame fr = f;
    std::function<double(double)> g = [&m, u, fr, s](double tau) {
      Vec2 xh = fr.to_logical(s, tau);
      Vec2 uhat = m.DF(xh).transpose() * (*u)(fr.patch, xh);
      return fr.perp_dir() * uhat[fr.axis_perp()];
    };
    std::vector<double> tb = t_breaks(*cx_, f);
    ip = tab.perp_at_s_coarse.emplace(s, Prefix1D(std::move(g), tb, nq_)).first;
  }
  return A + ip->second.eval(t) - ip->second.eval(a);
}

double PhiPerp::fine_delta(int sys, double s, double t) const {
  const auto& S = systems_[sys];
  const SideFrame& f = S.fframe;
  auto& tab = tables_[sys];
  auto ip = tab.perp_at_s_fine.find(s);
  if (ip == tab.perp_at_s_fine.end()) {
    const auto& m = cx_->mapping(f.patch);
    const VectorOnPatches* u = u_;
    SideFrame fr = f;
    std::function<double(double)> g = [&m, u, fr, s](double tau) {
      Vec2 xh = fr.to_logical(s, tau);
      Vec2 uhat = m.DF(xh).transpose() * (*u)(fr.patch, xh);
      return fr.perp_dir() * uhat[fr.axis_perp()];
    };
    std::vector<double> tb = t_breaks(*cx_, f);
    ip = tab.perp_at_s_fine.emplace(s, Prefix1D(std::move(g), tb, nq_)).first;
  }
  return ip->second.eval(t);
}

double PhiPerp::eval_at(int k, const Vec2& xhat, double a) const {
  for (size_t i = 0; i < systems_.size(); ++i) {
    const auto& S = systems_[i];
    int role = S.patch_role(k);
    if (role < 0) continue;
    if (role == 0) {
      auto [s, t] = S.cframe.from_logical(xhat);
      return coarse_value(int(i), s, t, a);
    }
    auto [s, t] = S.fframe.from_logical(xhat);
    double v = fine_delta(int(i), s, t);
    if (!S.fine_only())
      v += coarse_value(int(i), cx_->edges[S.central_edge].pmap(s), 0.0, a);
    return v;
  }
  throw PatchNotOnEdge("patch not covered by curve systems");
}

double PhiPerp::eval(int k, const Vec2& xhat) const {
  double acc = 0.0;
  for (size_t q = 0; q < rule_.nodes.size(); ++q)
    acc += rule_.weights[q] * eval_at(k, xhat, rule_.nodes[q]);
  return acc / rule_.len;
}

PsiWorkspace::PsiWorkspace(const MultipatchComplex& cx,
                           const ScalarOnPatches& f, int quad_points) {
  for (int k = 0; k < cx.num_patches(); ++k) {
    const auto& m = cx.mapping(k);
    auto fhat = [&m, &f, k](const Vec2& xh) {
      return m.jacobian_det(xh) * f(k, xh);
    };
    const auto& b = cx.spaces(k).v0().breakpoints();
    per_patch_.push_back(
        std::make_unique<BoxIntegral2D>(fhat, b, b, quad_points));
  }
}

double PsiWorkspace::corner(int k, double x1, double x2) const {
  return per_patch_[k]->corner(x1, x2);
}

double PsiWorkspace::box(int k, const LogicalBox& b) const {
  if (b.empty()) return 0.0;
  return per_patch_[k]->box(b.lo, b.hi);
}

namespace {

// Winding decomposition of a closed axis-aligned polyline (raw logical
// coordinates of one patch) into multiplicity-weighted cells.
void sweep_loop(int patch, const std::vector<Vec2>& pts, double sign,
                SurfacePlan& out) {
  const size_t m = pts.size();
  std::vector<double> xs, ys;
  for (const auto& p : pts) {
    xs.push_back(p[0]);
    ys.push_back(p[1]);
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-14; }),
            v.end());
  };
  uniq(xs);
  uniq(ys);
  for (size_t i = 0; i + 1 < xs.size(); ++i)
    for (size_t j = 0; j + 1 < ys.size(); ++j) {
      double cxm = 0.5 * (xs[i] + xs[i + 1]);
      double cym = 0.5 * (ys[j] + ys[j + 1]);
      int w = 0;
      for (size_t q = 0; q < m; ++q) {
        const Vec2& a = pts[q];
        const Vec2& b = pts[(q + 1) % m];
        if (std::abs(a[0] - b[0]) < 1e-14) { // vertical segment
          if (a[0] > cxm && std::min(a[1], b[1]) < cym &&
              cym < std::max(a[1], b[1]))
            w += (b[1] > a[1]) ? 1 : -1;
        }
      }
      if (w != 0) {
        SignedRect r;
        r.patch = patch;
        r.box.lo = Vec2(xs[i], ys[j]);
        r.box.hi = Vec2(xs[i + 1], ys[j + 1]);
        r.sign = sign * w;
        out.push_back(r);
      }
    }
}

std::vector<Vec2> frame_loop(const SideFrame& f,
                             const std::vector<std::pair<double, double>>& st) {
  std::vector<Vec2> out;
  for (const auto& [s, t] : st) out.push_back(f.to_logical(s, t));
  return out;
}

} // namespace

SurfacePlan surface_plan_edge(const MultipatchComplex& cx,
                              const PerpCurveSystem& s, int k,
                              const Vec2& xhat, double a) {
  const auto& er = cx.edges[s.central_edge];
  SurfacePlan plan;
  int role = s.patch_role(k);
  if (role < 0) throw PatchNotOnEdge("patch not in curve system");
  if (role == 0) {
    auto [sx, tx] = s.cframe.from_logical(xhat);
    sweep_loop(s.coarse_patch,
               frame_loop(s.cframe, {{s.s0, a},
                                     {sx, a},
                                     {sx, tx},
                                     {sx, 0.0},
                                     {s.s0, 0.0}}),
               1.0, plan);
    sweep_loop(s.coarse_patch,
               frame_loop(s.cframe,
                          {{s.s0, tx}, {sx, tx}, {sx, 0.0}, {s.s0, 0.0}}),
               -1.0, plan);
  } else {
    auto [sx, tx] = s.fframe.from_logical(xhat);
    double sa = eta_zero(er, er.side_of(k));
    if (!s.fine_only()) {
      double sc = er.pmap(sx);
      sweep_loop(s.coarse_patch,
                 frame_loop(s.cframe,
                            {{s.s0, a}, {sc, a}, {sc, 0.0}, {s.s0, 0.0}}),
                 1.0, plan);
    }
    sweep_loop(s.fine_patch,
               frame_loop(s.fframe,
                          {{sa, tx}, {sx, tx}, {sx, 0.0}, {sa, 0.0}}),
               -1.0, plan);
  }
  return plan;
}

namespace {

// T-chain of a curve system relative to the raw-axis reference path from
// the vertex corner to x (axis 1 first), anchored at v.
void t_chain_vertex(const MultipatchComplex& cx, const PerpCurveSystem& s,
                    int v, int k, const Vec2& xhat, double a, double sign,
                    SurfacePlan& plan) {
  const auto& vr = cx.vertices[v];
  const auto& er = cx.edges[s.central_edge];
  int role = s.patch_role(k);
  if (role < 0) throw PatchNotOnEdge("patch not in curve system");

  if (role == 0) {
    const SideFrame& f = s.cframe;
    Vec2 vc(double(vr.corner[vr.corner_of(k)][0]),
            double(vr.corner[vr.corner_of(k)][1]));
    auto [sx, tx] = f.from_logical(xhat);
    std::vector<Vec2> pts = {f.to_logical(s.s0, a), f.to_logical(sx, a), xhat,
                             Vec2(xhat[0], vc[1]), vc, f.to_logical(s.s0, 0.0)};
    sweep_loop(k, pts, sign, plan);
    return;
  }
  // fine chart part
  const SideFrame& ff = s.fframe;
  Vec2 vf(double(vr.corner[vr.corner_of(k)][0]),
          double(vr.corner[vr.corner_of(k)][1]));
  auto [sx, tx] = ff.from_logical(xhat);
  std::vector<Vec2> fine_pts = {ff.to_logical(sx, 0.0), xhat,
                                Vec2(xhat[0], vf[1]), vf};
  sweep_loop(k, fine_pts, sign, plan);
  if (s.fine_only()) return;
  // coarse chart part
  const SideFrame& fc = s.cframe;
  int cc = vr.corner_of(s.coarse_patch);
  double svc = vr.corner[cc][fc.axis_par];
  double sc = er.pmap(sx);
  std::vector<Vec2> coarse_pts = {fc.to_logical(s.s0, a), fc.to_logical(sc, a),
                                  fc.to_logical(sc, 0.0),
                                  fc.to_logical(svc, 0.0),
                                  fc.to_logical(s.s0, 0.0)};
  sweep_loop(s.coarse_patch, coarse_pts, sign, plan);
}

} // namespace

SurfacePlan surface_plan_edge_vertex(const MultipatchComplex& cx,
                                     const PerpCurveSystem& se,
                                     const PerpCurveSystem& sv, int v, int k,
                                     const Vec2& xhat, double a_e, double a_v) {
  SurfacePlan plan;
  t_chain_vertex(cx, se, v, k, xhat, a_e, 1.0, plan);
  t_chain_vertex(cx, sv, v, k, xhat, a_v, -1.0, plan);
  return plan;
}

double integrate_plan(const PsiWorkspace& ws, const SurfacePlan& plan) {
  double total = 0.0;
  for (const auto& r : plan) total += r.sign * ws.box(r.patch, r.box);
  return total;
}

namespace {

int physical_winding(const MultipatchComplex& cx,
                     const std::vector<CurvePlan>& boundary, const Vec2& p) {
  double angle = 0.0;
  const int sub = 256;
  for (const auto& cp : boundary)
    for (const auto& seg : cp) {
      if (std::abs(seg.to - seg.from) < 1e-15) continue;
      const auto& m = cx.mapping(seg.patch);
      Vec2 prev;
      for (int i = 0; i <= sub; ++i) {
        Vec2 xh;
        xh[seg.axis] = seg.from + (seg.to - seg.from) * double(i) / sub;
        xh[1 - seg.axis] = seg.fixed;
        Vec2 d = m.F(xh) - p;
        if (i > 0) {
          double cross = prev[0] * d[1] - prev[1] * d[0];
          double dot = prev.dot(d);
          angle += std::atan2(cross, dot);
        }
        prev = d;
      }
    }
  return int(std::lround(angle / (2 * M_PI)));
}

struct Arrangement {
  int patch;
  std::vector<double> xs, ys;
  std::vector<std::vector<int>> winding; // per cell
};

std::vector<Arrangement> build_arrangements(
    const MultipatchComplex& cx, const SurfacePlan& plan,
    const std::vector<CurvePlan>& boundary) {
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> lines;
  auto add_line = [&](int patch, int axis, double v) {
    auto& [xs, ys] = lines[patch];
    (axis == 0 ? xs : ys).push_back(v);
  };
  for (const auto& r : plan) {
    add_line(r.patch, 0, r.box.lo[0]);
    add_line(r.patch, 0, r.box.hi[0]);
    add_line(r.patch, 1, r.box.lo[1]);
    add_line(r.patch, 1, r.box.hi[1]);
  }
  for (const auto& cp : boundary)
    for (const auto& seg : cp) {
      add_line(seg.patch, 1 - seg.axis, seg.fixed);
      add_line(seg.patch, seg.axis, seg.from);
      add_line(seg.patch, seg.axis, seg.to);
    }
  std::vector<Arrangement> out;
  for (auto& [patch, xy] : lines) {
    Arrangement a;
    a.patch = patch;
    a.xs = xy.first;
    a.ys = xy.second;
    for (auto* v : {&a.xs, &a.ys}) {
      v->push_back(0.0);
      v->push_back(1.0);
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end(),
                           [](double p, double q) {
                             return std::abs(p - q) < 1e-13;
                           }),
               v->end());
    }
    a.winding.assign(a.xs.size() - 1,
                     std::vector<int>(a.ys.size() - 1, 0));
    for (size_t i = 0; i + 1 < a.xs.size(); ++i)
      for (size_t j = 0; j + 1 < a.ys.size(); ++j) {
        Vec2 c(0.5 * (a.xs[i] + a.xs[i + 1]), 0.5 * (a.ys[j] + a.ys[j + 1]));
        a.winding[i][j] = physical_winding(cx, boundary, cx.mapping(patch).F(c));
      }
    out.push_back(std::move(a));
  }
  return out;
}

int locate(const std::vector<double>& grid, double t) {
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  int i = int(it - grid.begin()) - 1;
  return std::clamp(i, 0, int(grid.size()) - 2);
}

} // namespace

int winding_mismatch(const MultipatchComplex& cx, const SurfacePlan& plan,
                     const std::vector<CurvePlan>& boundary, int raster) {
  auto arrs = build_arrangements(cx, plan, boundary);
  int mism = 0;
  for (const auto& a : arrs) {
    auto near_line = [](const std::vector<double>& v, double t) {
      for (double x : v)
        if (std::abs(x - t) < 1e-9) return true;
      return false;
    };
    for (int i = 0; i < raster; ++i)
      for (int j = 0; j < raster; ++j) {
        Vec2 xh((i + 0.5) / raster, (j + 0.5) / raster);
        if (near_line(a.xs, xh[0]) || near_line(a.ys, xh[1])) continue;
        int ind = 0;
        for (const auto& r : plan)
          if (r.patch == a.patch && r.box.lo[0] < xh[0] &&
              xh[0] < r.box.hi[0] && r.box.lo[1] < xh[1] &&
              xh[1] < r.box.hi[1])
            ind += int(std::lround(r.sign));
        int w = a.winding[locate(a.xs, xh[0])][locate(a.ys, xh[1])];
        if (w != ind) ++mism;
      }
  }
  return mism;
}

double winding_oracle_value(const MultipatchComplex& cx,
                            const std::vector<CurvePlan>& boundary,
                            const ScalarOnPatches& f, int quad_points) {
  auto arrs = build_arrangements(cx, {}, boundary);
  double total = 0.0;
  for (const auto& a : arrs) {
    const auto& m = cx.mapping(a.patch);
    const auto& brk = cx.spaces(a.patch).v0().breakpoints();
    for (size_t i = 0; i + 1 < a.xs.size(); ++i)
      for (size_t j = 0; j + 1 < a.ys.size(); ++j) {
        int w = a.winding[i][j];
        if (w == 0) continue;
        auto inner = [&](double x1) {
          auto g = [&](double x2) {
            Vec2 xh(x1, x2);
            return m.jacobian_det(xh) * f(a.patch, xh);
          };
          return integrate_subdivided(g, a.ys[j], a.ys[j + 1], brk,
                                      quad_points);
        };
        total += w * integrate_subdivided(inner, a.xs[i], a.xs[i + 1], brk,
                                          quad_points);
      }
  }
  return total;
}

Psi::Psi(const MultipatchComplex& cx, const ScalarOnPatches& f,
         const QuadratureSpec& quad, int n_avg)
    : cx_(&cx), ws_(cx, f, quad.points_for(max_degree(cx))) {
  for (const auto& er : cx.edges) {
    auto s = edge_perp_system(cx, er.id);
    edge_systems_[er.id] = s;
    int p = cx.spaces(er.sides[0].patch).v0().degree();
    int na = n_avg > 0 ? n_avg : p + 3;
    edge_rules_[er.id] = make_average_rule(cx, {s}, er.h_edge, na);
  }
  for (const auto& vr : cx.vertices) {
    if (!vr.seq_valid) continue;
    vertex_rules_[vr.id] = build_vertex_curves(cx, vr.id);
    for (int e : vr.edges) {
      // abar-rule on [0,1] subdivided where either scaled parameter crosses
      // a knot line
      std::vector<double> cuts{0.0, 1.0};
      auto add_cuts = [&](const std::vector<PerpCurveSystem>& systems,
                          double len) {
        for (const auto& s : systems) {
          const SideFrame& fr = s.fine_only() ? s.fframe : s.cframe;
          for (double t : t_breaks(*cx_, fr)) {
            double ab = t / len;
            if (ab > 1e-14 && ab < 1.0 - 1e-14) cuts.push_back(ab);
          }
        }
      };
      add_cuts({edge_systems_[e]}, cx.edges[e].h_edge);
      add_cuts(vertex_rules_[vr.id].systems, vr.h_vertex);
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end(),
                             [](double a, double b) {
                               return std::abs(a - b) < 1e-13;
                             }),
                 cuts.end());
      int p = cx.spaces(cx.edges[e].sides[0].patch).v0().degree();
      int na = n_avg > 0 ? n_avg : p + 3;
      AverageRule rule;
      rule.len = 1.0;
      const GaussRule& g = gauss_legendre(na);
      for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        double half = 0.5 * (cuts[i + 1] - cuts[i]);
        for (int q = 0; q < na; ++q) {
          rule.nodes.push_back(mid + half * g.nodes[q]);
          rule.weights.push_back(half * g.weights[q]);
        }
      }
      ev_rules_[{e, vr.id}] = rule;
    }
  }
}

int max_degree(const MultipatchComplex& cx) {
  int p = 1;
  for (int k = 0; k < cx.num_patches(); ++k)
    p = std::max(p, cx.spaces(k).v0().degree());
  return p;
}

double Psi::eval_patch(int k, const Vec2& xhat) const {
  return ws_.corner(k, xhat[0], xhat[1]);
}

double Psi::eval_edge(int e, int k, const Vec2& xhat) const {
  const auto& sys = edge_systems_.at(e);
  const auto& rule = edge_rules_.at(e);
  double acc = 0.0;
  for (size_t q = 0; q < rule.nodes.size(); ++q) {
    auto plan = surface_plan_edge(*cx_, sys, k, xhat, rule.nodes[q]);
    acc += rule.weights[q] * integrate_plan(ws_, plan);
  }
  return acc / rule.len;
}

double Psi::eval_edge_vertex(int e, int v, int k, const Vec2& xhat) const {
  const auto& se = edge_systems_.at(e);
  const auto& vrule = vertex_rules_.at(v);
  int si = vrule.system_of_patch(k);
  if (si < 0) throw PatchNotOnEdge("patch not at vertex");
  const auto& sv = vrule.systems[si];
  const auto& rule = ev_rules_.at({e, v});
  double he = cx_->edges[e].h_edge;
  double hv = cx_->vertices[v].h_vertex;
  double acc = 0.0;
  for (size_t q = 0; q < rule.nodes.size(); ++q) {
    double ab = rule.nodes[q];
    auto plan =
        surface_plan_edge_vertex(*cx_, se, sv, v, k, xhat, he * ab, hv * ab);
    acc += rule.weights[q] * integrate_plan(ws_, plan);
  }
  return acc;
}

} // namespace mpfeec
