// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpfeec/topology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "mpfeec/errors.hpp"

namespace mpfeec {

namespace {

// side order: 0 south (x2=0), 1 east (x1=1), 2 north (x2=1), 3 west (x1=0)
SideFrame side_frame(int patch, int side) {
  SideFrame f;
  f.patch = patch;
  switch (side) {
    case 0: f.axis_par = 0; f.perp_edge = 0; break;
    case 1: f.axis_par = 1; f.perp_edge = 1; break;
    case 2: f.axis_par = 0; f.perp_edge = 1; break;
    default: f.axis_par = 1; f.perp_edge = 0; break;
  }
  return f;
}

Vec2 side_point(const PatchMapping& m, const SideFrame& f, double s) {
  return m.F(f.to_logical(s, 0.0));
}

bool nested_spaces(const UnivariateSplineSpace& a,
                   const UnivariateSplineSpace& b) {
  return is_nested(a, b) || is_nested(a.mirrored(), b);
}

double support_diam(const UnivariateSplineSpace& s, int i) {
  auto [a, b] = s.support(i);
  return b - a;
}

} // namespace

int MultipatchComplex::patch_dim(int ell, int k) const {
  const auto& sp = patches[k].spaces;
  return ell == 0 ? sp.dim0() : (ell == 1 ? sp.dim1() : sp.dim2());
}

int MultipatchComplex::offset(int ell, int k) const {
  int off = 0;
  for (int j = 0; j < k; ++j) off += patch_dim(ell, j);
  return off;
}

int MultipatchComplex::dim(int ell) const {
  return offset(ell, num_patches());
}

std::vector<int> MultipatchComplex::edges_of_patch(int k) const {
  std::vector<int> out;
  for (const auto& e : edges)
    if (e.touches(k)) out.push_back(e.id);
  return out;
}

std::vector<int> MultipatchComplex::vertices_of_edge(int e) const {
  std::vector<int> out;
  const auto& er = edges[e];
  const SideFrame& f = er.sides[0];
  Vec2 p0 = side_point(patches[f.patch].mapping, f, 0.0);
  Vec2 p1 = side_point(patches[f.patch].mapping, f, 1.0);
  for (const auto& v : vertices)
    if ((v.position - p0).norm() < 1e-8 || (v.position - p1).norm() < 1e-8)
      out.push_back(v.id);
  return out;
}

SideFrame edge_frame(const MultipatchComplex& complex, int e, int k) {
  const auto& er = complex.edges[e];
  int s = er.side_of(k);
  if (s < 0) throw PatchNotOnEdge("patch not contiguous to edge");
  return er.sides[s];
}

namespace {

// Decomposes K(v) into one or two nested sequences per the vertex
// nestedness assumption, selecting e*(v)/k*(v) deterministically.
void decompose_vertex(const MultipatchComplex& cx, VertexRecord& v) {
  v.seqs.clear();
  v.seq_violations.clear();
  v.seq_valid = false;
  const int m = int(v.patches.size());

  // adjacency via interior edges at v
  auto shared_edge = [&](int ka, int kb) -> int {
    for (int e : v.edges) {
      const auto& er = cx.edges[e];
      if (!er.boundary && er.touches(ka) && er.touches(kb)) return e;
    }
    return -1;
  };
  auto vedges_of = [&](int k) {
    std::vector<int> out;
    for (int e : v.edges)
      if (cx.edges[e].touches(k)) out.push_back(e);
    return out;
  };
  auto boundary_vedges_of = [&](int k) {
    std::vector<int> out;
    for (int e : vedges_of(k))
      if (cx.edges[e].boundary) out.push_back(e);
    return out;
  };
  auto other_vedge = [&](int k, int e) -> int {
    for (int e2 : vedges_of(k))
      if (e2 != e) return e2;
    return -1;
  };
  auto nested = [&](int ka, int kb) {
    return nested_spaces(cx.spaces(ka).v0(), cx.spaces(kb).v0());
  };
  auto coarser_of = [&](int ka, int kb) {
    int da = cx.spaces(ka).v0().dimension();
    int db = cx.spaces(kb).v0().dimension();
    if (da != db) return da < db ? ka : kb;
    return std::min(ka, kb);
  };

  if (!v.boundary) {
    if (m != 4) {
      v.seq_violations.push_back("interior vertex must have 4 patches, has " +
                                 std::to_string(m));
      return;
    }
    // cyclic order from adjacency
    std::vector<int> cyc;
    cyc.push_back(*std::min_element(v.patches.begin(), v.patches.end()));
    std::set<int> used{cyc[0]};
    while (int(cyc.size()) < 4) {
      int cur = cyc.back();
      int next = -1;
      for (int k : v.patches)
        if (!used.count(k) && shared_edge(cur, k) >= 0)
          next = (next < 0 || k < next) ? k : next;
      if (next < 0) {
        v.seq_violations.push_back("patches around interior vertex do not form a cycle");
        return;
      }
      cyc.push_back(next);
      used.insert(next);
    }
    if (shared_edge(cyc.back(), cyc.front()) < 0) {
      v.seq_violations.push_back("patches around interior vertex do not close a cycle");
      return;
    }
    // rotations: l = (cyc[r+1] coarse, cyc[r] fine), r = (cyc[r+2], cyc[r+3])
    int best = -1;
    std::pair<int, int> best_score{INT32_MAX, INT32_MAX};
    for (int r = 0; r < 4; ++r) {
      int lf = cyc[r], lc = cyc[(r + 1) % 4];
      int rc = cyc[(r + 2) % 4], rf = cyc[(r + 3) % 4];
      if (!nested(lc, lf) || !nested(rc, rf)) continue;
      int estar = shared_edge(lc, rc);
      int coarse = coarser_of(lc, rc);
      std::pair<int, int> score{cx.spaces(coarse).v0().dimension(), estar};
      if (best < 0 || score < best_score) {
        best = r;
        best_score = score;
      }
    }
    if (best < 0) {
      v.seq_violations.push_back("no valid nested sequence decomposition at interior vertex");
      return;
    }
    int lf = cyc[best], lc = cyc[(best + 1) % 4];
    int rc = cyc[(best + 2) % 4], rf = cyc[(best + 3) % 4];
    int estar = shared_edge(lc, rc);
    VertexSeq L, R;
    L.patches = {lc, lf};
    L.central_edge = shared_edge(lc, lf);
    L.start_edge = estar;
    R.patches = {rc, rf};
    R.central_edge = shared_edge(rc, rf);
    R.start_edge = estar;
    v.seqs = {L, R};
    v.coarse_edge = estar;
    v.coarse_patch = coarser_of(lc, rc);
    v.seq_valid = true;
    return;
  }

  // boundary vertex: order patches along the chain
  std::vector<int> chain;
  {
    // chain ends are patches with a boundary v-edge
    std::vector<int> ends;
    for (int k : v.patches)
      if (!boundary_vedges_of(k).empty()) ends.push_back(k);
    if (m == 1) {
      chain = {v.patches[0]};
    } else {
      if (ends.empty()) {
        v.seq_violations.push_back("boundary vertex without boundary edges");
        return;
      }
      int start = *std::min_element(ends.begin(), ends.end());
      chain.push_back(start);
      std::set<int> used{start};
      while (int(chain.size()) < m) {
        int cur = chain.back();
        int next = -1;
        for (int k : v.patches)
          if (!used.count(k) && shared_edge(cur, k) >= 0)
            next = (next < 0 || k < next) ? k : next;
        if (next < 0) {
          v.seq_violations.push_back("patches at boundary vertex do not form a chain");
          return;
        }
        chain.push_back(next);
        used.insert(next);
      }
    }
  }
  const bool homog = cx.bc == BcMode::Homogeneous;

  auto single_seq = [&](int k) -> VertexSeq {
    VertexSeq s;
    s.patches = {k};
    auto be = boundary_vedges_of(k);
    std::sort(be.begin(), be.end());
    if (be.empty()) {
      v.seq_violations.push_back("single-patch sequence without boundary edge");
      return s;
    }
    s.central_edge = be.front();
    if (homog) {
      s.fine_only = true;
    } else {
      s.start_edge = other_vedge(k, s.central_edge);
    }
    return s;
  };

  if (m == 1) {
    v.seqs = {single_seq(chain[0])};
    if (!homog) {
      v.coarse_edge = v.seqs[0].start_edge;
      v.coarse_patch = chain[0];
    }
    v.seq_valid = v.seq_violations.empty();
    return;
  }
  if (m == 2) {
    int a = chain[0], b = chain[1];
    int c, f;
    if (nested(a, b) && (!nested(b, a) || a < b)) {
      c = a; f = b;
    } else if (nested(b, a)) {
      c = b; f = a;
    } else {
      v.seq_violations.push_back("two-patch boundary vertex is not nested");
      return;
    }
    VertexSeq s;
    s.patches = {c, f};
    s.central_edge = shared_edge(c, f);
    s.start_edge = other_vedge(c, s.central_edge);
    v.seqs = {s};
    if (!homog) {
      v.coarse_edge = s.start_edge;
      v.coarse_patch = c;
    }
    v.seq_valid = true;
    return;
  }

  // m == 3 or 4: two sequences covering the chain
  struct Cand {
    VertexSeq A, B;
    int estar = -1, kstar = -1;
    std::pair<int, int> score{INT32_MAX, INT32_MAX};
  };
  std::vector<Cand> cands;
  for (int j = 1; j < m; ++j) {
    int la = j, lb = m - j; // arc sizes
    if (la > 2 || lb > 2) continue;
    Cand cd;
    if (!homog) {
      // coarse patches at the split, fine at the chain ends
      cd.A.patches = la == 2 ? std::vector<int>{chain[j - 1], chain[j - 2]}
                             : std::vector<int>{chain[0]};
      cd.B.patches = lb == 2 ? std::vector<int>{chain[j], chain[j + 1]}
                             : std::vector<int>{chain[m - 1]};
    } else {
      // coarse patches at the chain ends, fine at the split
      cd.A.patches = la == 2 ? std::vector<int>{chain[0], chain[1]}
                             : std::vector<int>{chain[0]};
      cd.B.patches = lb == 2 ? std::vector<int>{chain[m - 1], chain[m - 2]}
                             : std::vector<int>{chain[m - 1]};
    }
    bool ok = true;
    for (auto* s : {&cd.A, &cd.B}) {
      if (s->patches.size() == 2) {
        if (!nested(s->patches[0], s->patches[1])) ok = false;
        s->central_edge = shared_edge(s->patches[0], s->patches[1]);
        s->start_edge = other_vedge(s->patches[0], s->central_edge);
        if (homog) {
          // coarse patch sits at a chain end: its other v-edge is on the boundary
          if (s->start_edge < 0 || !cx.edges[s->start_edge].boundary) ok = false;
        }
      } else {
        *s = single_seq(s->patches[0]);
      }
    }
    if (!ok) continue;
    if (!homog) {
      cd.estar = shared_edge(chain[j - 1], chain[j]);
      cd.kstar = coarser_of(chain[j - 1], chain[j]);
      cd.score = {cx.spaces(cd.kstar).v0().dimension(), cd.estar};
      // starting edges of both sequences must be the shared split edge
      if (cd.A.start_edge != cd.estar || cd.B.start_edge != cd.estar) continue;
    } else {
      cd.score = {0, j};
    }
    cands.push_back(cd);
  }
  if (cands.empty()) {
    v.seq_violations.push_back(
        homog ? "no decomposition with adjacent fine patches at boundary vertex"
              : "no decomposition with adjacent coarse patches at boundary vertex");
    return;
  }
  auto best = *std::min_element(cands.begin(), cands.end(),
                                [](const Cand& a, const Cand& b) {
                                  return a.score < b.score;
                                });
  v.seqs = {best.A, best.B};
  v.coarse_edge = best.estar;
  v.coarse_patch = best.kstar;
  v.seq_valid = true;
}

} // namespace

MultipatchComplex build_topology(std::vector<Patch> patches, BcMode bc,
                                 SequenceKind kind, double tol) {
  if (patches.empty()) throw GeometricNonConformity("no patches");
  MultipatchComplex cx;
  cx.bc = bc;
  cx.sequence_kind = kind;
  cx.patches = std::move(patches);
  for (auto& p : cx.patches) p.diameter = p.mapping.diameter();

  const int np = cx.num_patches();
  struct SideKey {
    int patch, side;
    Vec2 a, b; // corner points
  };
  std::vector<SideKey> sides;
  for (int k = 0; k < np; ++k)
    for (int s = 0; s < 4; ++s) {
      SideFrame f = side_frame(k, s);
      sides.push_back(
          {k, s, side_point(cx.mapping(k), f, 0.0), side_point(cx.mapping(k), f, 1.0)});
    }

  auto same_pt = [tol](const Vec2& a, const Vec2& b) {
    return (a - b).norm() <= tol;
  };

  std::vector<int> match(sides.size(), -1);
  for (size_t i = 0; i < sides.size(); ++i)
    for (size_t j = i + 1; j < sides.size(); ++j) {
      if (sides[i].patch == sides[j].patch) continue;
      bool direct = same_pt(sides[i].a, sides[j].a) && same_pt(sides[i].b, sides[j].b);
      bool flipped = same_pt(sides[i].a, sides[j].b) && same_pt(sides[i].b, sides[j].a);
      if (direct || flipped) {
        if (match[i] >= 0 || match[j] >= 0)
          throw GeometricNonConformity("side matched more than once");
        match[i] = int(j);
        match[j] = int(i);
      }
    }

  // partial-overlap detection (T junctions): an unmatched side whose points
  // lie on another patch's side
  for (size_t i = 0; i < sides.size(); ++i) {
    if (match[i] >= 0) continue;
    SideFrame fi = side_frame(sides[i].patch, sides[i].side);
    for (size_t j = 0; j < sides.size(); ++j) {
      if (i == j || sides[i].patch == sides[j].patch) continue;
      SideFrame fj = side_frame(sides[j].patch, sides[j].side);
      int hits = 0;
      for (int s = 1; s < 8; ++s) {
        Vec2 p = side_point(cx.mapping(sides[i].patch), fi, s / 8.0);
        double dmin = 1e30;
        for (int t = 0; t <= 64; ++t) {
          Vec2 q = side_point(cx.mapping(sides[j].patch), fj, t / 64.0);
          dmin = std::min(dmin, (p - q).norm());
        }
        if (dmin <= std::max(tol, 1e-7)) ++hits;
      }
      if (hits >= 3)
        throw GeometricNonConformity(
            "partial side overlap (T junction) between patches " +
            std::to_string(sides[i].patch) + " and " +
            std::to_string(sides[j].patch));
    }
  }

  // build edge records
  std::vector<int> side_edge(sides.size(), -1);
  for (size_t i = 0; i < sides.size(); ++i) {
    if (side_edge[i] >= 0) continue;
    EdgeRecord e;
    e.id = int(cx.edges.size());
    SideFrame fi = side_frame(sides[i].patch, sides[i].side);
    if (match[i] < 0) {
      e.boundary = true;
      e.flip = false;
      e.sides = {fi};
      if (bc == BcMode::Inhomogeneous)
        e.minus = 0;
      else
        e.plus = 0;
      side_edge[i] = e.id;
    } else {
      size_t j = match[i];
      SideFrame fj = side_frame(sides[j].patch, sides[j].side);
      bool flip = !same_pt(sides[i].a, sides[j].a);
      // parametrization coincidence at 17 interior samples
      for (int s = 0; s <= 16; ++s) {
        double z = (s + 0.5) / 17.0;
        Vec2 p = side_point(cx.mapping(sides[i].patch), fi, z);
        Vec2 q = side_point(cx.mapping(sides[j].patch), fj, flip ? 1.0 - z : z);
        if ((p - q).norm() > std::max(tol, 1e-10) * 10)
          throw ParametrizationMismatch(
              "edge parametrizations do not coincide between patches " +
              std::to_string(sides[i].patch) + " and " +
              std::to_string(sides[j].patch));
      }
      const auto& Va = cx.spaces(sides[i].patch).v0();
      const auto& Vb = cx.spaces(sides[j].patch).v0();
      bool a_in_b = is_nested(flip ? Va.mirrored() : Va, Vb);
      bool b_in_a = is_nested(flip ? Vb.mirrored() : Vb, Va);
      int mi; // index (0/1) of the minus side in {i,j}
      if (a_in_b && b_in_a)
        mi = sides[i].patch < sides[j].patch ? 0 : 1;
      else if (a_in_b)
        mi = 0;
      else if (b_in_a)
        mi = 1;
      else
        throw NonNestedInterface("neither side nested across interface of patches " +
                                 std::to_string(sides[i].patch) + " and " +
                                 std::to_string(sides[j].patch));
      e.boundary = false;
      e.flip = flip;
      e.sides = {fi, fj};
      e.minus = mi;
      e.plus = 1 - mi;
      side_edge[i] = side_edge[j] = e.id;
    }
    // hat h_e: min endpoint support diameter in the perpendicular direction
    double he = 1.0;
    for (const auto& f : e.sides) {
      const auto& sp = cx.spaces(f.patch).v0();
      he = std::min(he, support_diam(sp, f.perp_index(sp.last_index())));
    }
    e.h_edge = he;
    cx.edges.push_back(e);
  }

  // vertices: group patch corners by position
  struct Corner {
    int patch;
    Eigen::Vector2i c;
    Vec2 pos;
  };
  std::vector<Corner> corners;
  for (int k = 0; k < np; ++k)
    for (int c2 = 0; c2 < 2; ++c2)
      for (int c1 = 0; c1 < 2; ++c1)
        corners.push_back(
            {k, Eigen::Vector2i(c1, c2), cx.mapping(k).F(Vec2(c1, c2))});
  std::vector<bool> taken(corners.size(), false);
  for (size_t i = 0; i < corners.size(); ++i) {
    if (taken[i]) continue;
    VertexRecord v;
    v.id = int(cx.vertices.size());
    v.position = corners[i].pos;
    for (size_t j = i; j < corners.size(); ++j)
      if (!taken[j] && same_pt(corners[j].pos, v.position)) {
        taken[j] = true;
        v.patches.push_back(corners[j].patch);
        v.corner.push_back(corners[j].c);
      }
    // edges at v: those whose endpoints include v
    for (const auto& e : cx.edges) {
      const SideFrame& f = e.sides[0];
      Vec2 p0 = side_point(cx.mapping(f.patch), f, 0.0);
      Vec2 p1 = side_point(cx.mapping(f.patch), f, 1.0);
      if (same_pt(p0, v.position) || same_pt(p1, v.position))
        v.edges.push_back(e.id);
    }
    v.boundary = false;
    for (int e : v.edges)
      if (cx.edges[e].boundary) v.boundary = true;
    // hat h_v
    double hv = 1.0;
    for (size_t pi = 0; pi < v.patches.size(); ++pi) {
      const auto& sp = cx.spaces(v.patches[pi]).v0();
      for (int d = 0; d < 2; ++d) {
        int idx = v.corner[pi][d] == 0 ? 0 : sp.last_index();
        hv = std::min(hv, support_diam(sp, idx));
      }
    }
    v.h_vertex = hv;
    cx.vertices.push_back(v);
  }

  for (auto& v : cx.vertices) decompose_vertex(cx, v);
  return cx;
}

ValidationReport validate_assumptions(const MultipatchComplex& cx) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& where, const std::string& msg) {
    rep.valid = false;
    rep.violations.push_back({where, msg});
  };

  int interior_edges = 0;
  for (const auto& e : cx.edges) {
    if (e.boundary) continue;
    ++interior_edges;
    // 17-point parametrization coincidence
    const auto& fm = e.sides[e.minus];
    const auto& fp = e.sides[e.plus];
    for (int s = 0; s <= 16; ++s) {
      double z = (s + 0.5) / 17.0;
      Vec2 a = cx.mapping(fm.patch).F(fm.to_logical(z, 0));
      Vec2 b = cx.mapping(fp.patch).F(fp.to_logical(e.pmap(z), 0));
      if ((a - b).norm() > 1e-9)
        fail("edge " + std::to_string(e.id), "parametrization mismatch");
    }
    const auto& Vm = cx.spaces(e.kminus()).v0();
    const auto& Vp = cx.spaces(e.kplus()).v0();
    if (!is_nested(e.flip ? Vm.mirrored() : Vm, Vp))
      fail("edge " + std::to_string(e.id), "interface spaces not nested");
    double Hr = cx.patches[e.kminus()].diameter / cx.patches[e.kplus()].diameter;
    double nr = double(Vm.dimension()) / Vp.dimension();
    rep.edge_ratios.push_back({Hr, nr});
  }

  for (const auto& v : cx.vertices) {
    if (!v.boundary && int(v.patches.size()) != 4)
      fail("vertex " + std::to_string(v.id),
           "interior vertex must have 4 patches, has " +
               std::to_string(v.patches.size()));
    if (v.boundary && int(v.patches.size()) > 4)
      fail("vertex " + std::to_string(v.id), "more than 4 patches at vertex");
    if (!v.seq_valid)
      for (const auto& msg : v.seq_violations)
        fail("vertex " + std::to_string(v.id), msg);
    // sequence members must cover K(v) with no repetition
    std::multiset<int> members;
    for (const auto& s : v.seqs)
      for (int k : s.patches) members.insert(k);
    if (v.seq_valid) {
      std::multiset<int> expect(v.patches.begin(), v.patches.end());
      if (members != expect)
        fail("vertex " + std::to_string(v.id),
             "sequence members do not partition K(v)");
    }
  }

  rep.euler_characteristic =
      cx.num_patches() - int(cx.edges.size()) + int(cx.vertices.size());
  return rep;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << (valid ? "valid" : "INVALID") << ", chi=" << euler_characteristic;
  for (const auto& v : violations)
    os << "\n  " << v.where << ": " << v.message;
  return os.str();
}

std::string MultipatchComplex::to_json() const {
  std::ostringstream os;
  os << "{\n  \"patches\": [\n";
  for (int k = 0; k < num_patches(); ++k) {
    os << "    {\"id\": " << k << ", \"kind\": \"" << patches[k].mapping.kind
       << "\", \"degree\": " << patches[k].spaces.v0().degree()
       << ", \"dim\": " << patches[k].spaces.v0().dimension()
       << ", \"diameter\": " << patches[k].diameter << "}"
       << (k + 1 < num_patches() ? "," : "") << "\n";
  }
  os << "  ],\n  \"edges\": [\n";
  for (size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    os << "    {\"id\": " << e.id << ", \"boundary\": " << (e.boundary ? "true" : "false")
       << ", \"flip\": " << (e.flip ? "true" : "false") << ", \"kminus\": "
       << e.kminus() << ", \"kplus\": " << e.kplus() << ", \"h_edge\": " << e.h_edge
       << "}" << (i + 1 < edges.size() ? "," : "") << "\n";
  }
  os << "  ],\n  \"vertices\": [\n";
  for (size_t i = 0; i < vertices.size(); ++i) {
    const auto& v = vertices[i];
    os << "    {\"id\": " << v.id << ", \"boundary\": " << (v.boundary ? "true" : "false")
       << ", \"patches\": [";
    for (size_t j = 0; j < v.patches.size(); ++j)
      os << v.patches[j] << (j + 1 < v.patches.size() ? "," : "");
    os << "], \"coarse_edge\": " << v.coarse_edge
       << ", \"coarse_patch\": " << v.coarse_patch << "}"
       << (i + 1 < vertices.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

} // namespace mpfeec
