#include <doctest.h>

#include <cmath>

#include "mpfeec/errors.hpp"
#include "mpfeec/fixtures.hpp"
#include "mpfeec/topology.hpp"

using namespace mpfeec;

namespace {

Patch square_patch(double x0, double y0, int degree, int cells) {
  Patch p;
  p.mapping = affine_mapping(Mat2::Identity(), Vec2(x0, y0));
  p.spaces = LogicalDeRham(make_uniform_space(degree, cells));
  return p;
}

} // namespace

TEST_CASE("two unit squares sharing a side") {
  std::vector<Patch> patches;
  patches.push_back(square_patch(0, 0, 2, 4));
  patches.push_back(square_patch(1, 0, 2, 8));
  auto cx = build_topology(std::move(patches), BcMode::Inhomogeneous);

  int interior = 0, boundary = 0;
  for (const auto& e : cx.edges) (e.boundary ? boundary : interior)++;
  CHECK(interior == 1);
  CHECK(boundary == 6);
  CHECK(cx.vertices.size() == 6);
  for (const auto& v : cx.vertices) CHECK(v.boundary);

  // coarse side of the interface is the 4-cell patch
  for (const auto& e : cx.edges)
    if (!e.boundary) {
      CHECK(e.kminus() == 0);
      CHECK(e.kplus() == 1);
      CHECK(!e.flip);
    }
  auto rep = validate_assumptions(cx);
  CHECK(rep.valid);
}

TEST_CASE("2x2 grid with mixed resolutions") {
  auto cx = make_fixture("square_2x2", BcMode::Inhomogeneous);
  int interior_edges = 0;
  for (const auto& e : cx.edges)
    if (!e.boundary) ++interior_edges;
  CHECK(interior_edges == 4);

  int interior_vertices = 0;
  for (const auto& v : cx.vertices)
    if (!v.boundary) {
      ++interior_vertices;
      CHECK(v.patches.size() == 4);
      CHECK(v.seq_valid);
      CHECK(v.seqs.size() == 2);
      // coarse edge joins the two coarse (south) patches 0 and 1
      const auto& estar = cx.edges[v.coarse_edge];
      CHECK(((estar.kminus() == 0 && estar.kplus() == 1) ||
             (estar.kminus() == 1 && estar.kplus() == 0)));
      for (const auto& s : v.seqs) {
        REQUIRE(s.patches.size() == 2);
        // coarse first
        CHECK(cx.spaces(s.patches[0]).v0().dimension() <=
              cx.spaces(s.patches[1]).v0().dimension());
        CHECK(s.start_edge == v.coarse_edge);
      }
    }
  CHECK(interior_vertices == 1);
  CHECK(validate_assumptions(cx).valid);
  CHECK(validate_assumptions(make_fixture("square_2x2", BcMode::Homogeneous))
            .valid);
}

TEST_CASE("orientation flip detection") {
  auto cx = make_fixture("two_patch_flipped", BcMode::Inhomogeneous);
  bool found = false;
  for (const auto& e : cx.edges)
    if (!e.boundary) {
      found = true;
      CHECK(e.flip);
      CHECK(e.pmap(0.25) == doctest::Approx(0.75));
    }
  CHECK(found);
  CHECK(validate_assumptions(cx).valid);
}

TEST_CASE("edge frames") {
  auto cx = make_fixture("two_patch", BcMode::Inhomogeneous);
  // south boundary edge of patch 0
  for (const auto& e : cx.edges) {
    if (e.sides[0].patch != 0) continue;
    const auto& f = e.sides[0];
    int n = cx.spaces(0).v0().last_index();
    if (f.axis_par == 0 && f.perp_edge == 0.0) {
      CHECK(f.axis_perp() == 1);
      CHECK(f.perp_index(n) == 0);
      CHECK(f.perm_det() == 1.0);
      Vec2 x = f.to_logical(0.3, 0.0);
      CHECK(x[0] == doctest::Approx(0.3));
      CHECK(x[1] == doctest::Approx(0.0));
    }
    if (f.axis_par == 1 && f.perp_edge == 1.0) {
      // east side: x_par = x2, perp index n, permutation det -1
      CHECK(f.perp_index(n) == n);
      CHECK(f.perm_det() == -1.0);
    }
  }
  CHECK_THROWS_AS(edge_frame(cx, 0, 99), PatchNotOnEdge);
}

TEST_CASE("L-shape boundary vertex sequences") {
  for (BcMode bc : {BcMode::Inhomogeneous, BcMode::Homogeneous}) {
    auto cx = make_fixture("lshape", bc);
    auto rep = validate_assumptions(cx);
    CHECK(rep.valid);
    // the reentrant corner (1,1) is a boundary vertex with 3 patches
    bool found = false;
    for (const auto& v : cx.vertices) {
      if (v.patches.size() == 3) {
        found = true;
        CHECK(v.boundary);
        CHECK(v.seq_valid);
        CHECK(v.seqs.size() == 2);
        int total = 0;
        for (const auto& s : v.seqs) total += int(s.patches.size());
        CHECK(total == 3);
        if (bc == BcMode::Inhomogeneous) {
          CHECK(v.coarse_edge >= 0);
          CHECK(!cx.edges[v.coarse_edge].boundary);
        } else {
          CHECK(v.coarse_edge == -1);
        }
      }
    }
    CHECK(found);
  }
}

TEST_CASE("annulus pair is conforming with a curved interface") {
  auto cx = make_fixture("annulus_pair", BcMode::Inhomogeneous);
  CHECK(validate_assumptions(cx).valid);
  int interior = 0;
  for (const auto& e : cx.edges)
    if (!e.boundary) {
      ++interior;
      CHECK(e.kminus() == 0); // 4-cell side is coarse
    }
  CHECK(interior == 1);
}

TEST_CASE("T junction rejected") {
  std::vector<Patch> patches;
  // wide bottom patch, two top patches: the shared horizontal line overlaps
  // only partially
  Patch wide;
  Mat2 A;
  A << 2, 0, 0, 1;
  wide.mapping = affine_mapping(A, Vec2(0, 0));
  wide.spaces = LogicalDeRham(make_uniform_space(2, 4));
  patches.push_back(std::move(wide));
  patches.push_back(square_patch(0, 1, 2, 4));
  patches.push_back(square_patch(1, 1, 2, 4));
  CHECK_THROWS_AS(build_topology(std::move(patches), BcMode::Inhomogeneous),
                  GeometricNonConformity);
}

TEST_CASE("non-nested interface rejected") {
  std::vector<Patch> patches;
  patches.push_back(square_patch(0, 0, 2, 3));
  patches.push_back(square_patch(1, 0, 2, 2));
  // 3 cells vs 2 cells: knot 1/3 not in {0, 1/2, 1} and vice versa
  CHECK_THROWS_AS(build_topology(std::move(patches), BcMode::Inhomogeneous),
                  NonNestedInterface);
}

TEST_CASE("interior vertex with three patches is reported") {
  // regular hexagon split into three rhombi sharing the center
  std::vector<Patch> patches;
  auto hexpt = [](int i) {
    double a = M_PI / 3.0 * i;
    return Vec2(std::cos(a), std::sin(a));
  };
  for (int r = 0; r < 3; ++r) {
    Vec2 c(0, 0);
    Vec2 p0 = hexpt(2 * r), p1 = hexpt(2 * r + 1), p2 = hexpt(2 * r + 2);
    Patch p;
    p.mapping = bilinear_mapping(c, p0, p2, p1);
    p.spaces = LogicalDeRham(make_uniform_space(2, 2));
    patches.push_back(std::move(p));
  }
  auto cx = build_topology(std::move(patches), BcMode::Inhomogeneous);
  auto rep = validate_assumptions(cx);
  CHECK(!rep.valid);
  bool mentions = false;
  for (const auto& v : rep.violations)
    if (v.message.find("4 patches") != std::string::npos) mentions = true;
  CHECK(mentions);
}

TEST_CASE("euler characteristic and quasi-uniformity are reported") {
  auto cx = make_fixture("square_2x2", BcMode::Inhomogeneous);
  auto rep = validate_assumptions(cx);
  // disc-like complex: chi = F - E + V = 1
  CHECK(rep.euler_characteristic == 1);
  for (auto& r : rep.edge_ratios) {
    CHECK(r[0] > 0);
    CHECK(r[1] > 0);
  }
}

TEST_CASE("json dump round trip sanity") {
  auto cx = make_fixture("two_patch", BcMode::Inhomogeneous);
  auto js = cx.to_json();
  CHECK(js.find("\"patches\"") != std::string::npos);
  CHECK(js.find("\"edges\"") != std::string::npos);
  CHECK(js.find("\"vertices\"") != std::string::npos);
}
