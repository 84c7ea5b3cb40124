#include <doctest.h>

#include <cmath>
#include <random>

#include "mpfeec/conforming.hpp"
#include "mpfeec/errors.hpp"
#include "mpfeec/fixtures.hpp"

using namespace mpfeec;

namespace {

Eigen::VectorXd random_broken0(const MultipatchComplex& cx,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(cx.dim(0));
  for (int i = 0; i < v.size(); ++i) v[i] = nd(rng);
  return v;
}

double spnorm(const Eigen::SparseMatrix<double>& m) {
  double s = 0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      s = std::max(s, std::abs(it.value()));
  return s;
}

} // namespace

TEST_CASE("conforming basis dimension and continuity") {
  for (const char* name : {"two_patch", "two_patch_flipped", "square_2x2",
                           "lshape", "annulus_pair"}) {
    auto cx = make_fixture(name, BcMode::Inhomogeneous);
    ConformingLayer layer(cx);

    int expect = 0;
    for (int k = 0; k < cx.num_patches(); ++k) {
      int n = cx.spaces(k).n();
      expect += (n - 1) * (n - 1);
    }
    for (const auto& e : cx.edges)
      expect += cx.spaces(e.sides[e.owner_side()].patch).n() - 1;
    expect += int(cx.vertices.size());
    CHECK(layer.dim_conforming() == expect);

    // every embedded basis function is continuous across interior edges
    std::mt19937_64 rng(101);
    std::normal_distribution<double> nd;
    Eigen::VectorXd c(layer.dim_conforming());
    for (int i = 0; i < c.size(); ++i) c[i] = nd(rng);
    auto field = unflatten(cx, 0, layer.embedding() * c);
    for (const auto& e : cx.edges) {
      if (e.boundary) continue;
      auto j = value_jump(cx, e.id, field);
      CHECK(j.max_jump < 1e-10 * std::max(1.0, j.scale));
    }
  }
}

TEST_CASE("homogeneous basis omits boundary functions") {
  auto cx = make_fixture("two_patch", BcMode::Homogeneous);
  ConformingLayer layer(cx);
  int expect = 0;
  for (int k = 0; k < cx.num_patches(); ++k) {
    int n = cx.spaces(k).n();
    expect += (n - 1) * (n - 1);
  }
  for (const auto& e : cx.edges)
    if (!e.boundary)
      expect += cx.spaces(e.sides[e.owner_side()].patch).n() - 1;
  for (const auto& v : cx.vertices)
    if (!v.boundary) expect += 1;
  CHECK(layer.dim_conforming() == expect);

  // embedded fields vanish on the boundary
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  Eigen::VectorXd c(layer.dim_conforming());
  for (int i = 0; i < c.size(); ++i) c[i] = nd(rng);
  auto field = unflatten(cx, 0, layer.embedding() * c);
  for (const auto& e : cx.edges)
    if (e.boundary) CHECK(value_jump(cx, e.id, field).max_jump < 1e-12);
}

TEST_CASE("vertex function restricted to an edge equals the edge-vertex function") {
  auto cx = make_fixture("square_2x2", BcMode::Inhomogeneous);
  ConformingLayer layer(cx);
  for (const auto& vr : cx.vertices) {
    auto lv = unflatten(cx, 0, layer.vertex_function(vr.id));
    for (int e : vr.edges) {
      const auto& er = cx.edges[e];
      int own = er.owner_side();
      auto lev = unflatten(
          cx, 0,
          layer.edge_function(e, layer.vertex_parallel_index(e, own, vr.id)));
      for (size_t s = 0; s < er.sides.size(); ++s) {
        const auto& f = er.sides[s];
        for (int q = 0; q <= 16; ++q) {
          Vec2 xh = f.to_logical(q / 16.0, 0.0);
          double a = cx.spaces(f.patch).eval0(lv.coeffs[f.patch], xh);
          double b = cx.spaces(f.patch).eval0(lev.coeffs[f.patch], xh);
          CHECK(std::abs(a - b) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("structural matrix identities") {
  for (const char* name : {"two_patch_flipped", "square_2x2", "lshape"}) {
    for (BcMode bc : {BcMode::Inhomogeneous, BcMode::Homogeneous}) {
      auto cx = make_fixture(name, bc);
      ConformingLayer layer(cx);
      const int N = cx.dim(0);

      // sum_e I^e_v = 2 I^v
      for (const auto& vr : cx.vertices) {
        Eigen::SparseMatrix<double> sum(N, N);
        for (int e : vr.edges) sum = sum + layer.Iev(e, vr.id);
        Eigen::SparseMatrix<double> diff = sum - 2.0 * layer.Iv(vr.id);
        CHECK(spnorm(diff) < 1e-14);

        // bar I^v = sum_e bar I^e_v - I^v
        Eigen::SparseMatrix<double> bsum(N, N);
        for (int e : vr.edges) bsum = bsum + layer.Ibar_ev(e, vr.id);
        Eigen::SparseMatrix<double> bdiff =
            layer.Ibar_v(vr.id) - (bsum - layer.Iv(vr.id));
        CHECK(spnorm(bdiff) < 1e-14);
      }

      // broken decomposition: identity = sum I^k_0 + sum I^e_0 + sum I^v
      Eigen::SparseMatrix<double> sum(N, N);
      for (int k = 0; k < cx.num_patches(); ++k) sum = sum + layer.Ik0(k);
      for (const auto& e : cx.edges) sum = sum + layer.Ie0(e.id);
      for (const auto& v : cx.vertices) sum = sum + layer.Iv(v.id);
      Eigen::SparseMatrix<double> I(N, N);
      I.setIdentity();
      CHECK(spnorm(Eigen::SparseMatrix<double>(sum - I)) < 1e-14);
    }
  }
}

TEST_CASE("all local projectors are idempotent") {
  auto cx = make_fixture("square_2x2", BcMode::Inhomogeneous);
  ConformingLayer layer(cx);
  auto idem = [&](const Eigen::SparseMatrix<double>& M) {
    Eigen::SparseMatrix<double> d = M * M - M;
    return spnorm(d);
  };
  for (int k = 0; k < cx.num_patches(); ++k) CHECK(idem(layer.Ik0(k)) < 1e-13);
  for (const auto& e : cx.edges) {
    CHECK(idem(layer.Ie(e.id)) < 1e-13);
    CHECK(idem(layer.Pe(e.id)) < 1e-13);
    CHECK(idem(layer.Ie0(e.id)) < 1e-13);
    CHECK(idem(layer.Pe0(e.id)) < 1e-13);
    for (int v : cx.vertices_of_edge(e.id)) {
      CHECK(idem(layer.Iev(e.id, v)) < 1e-13);
      CHECK(idem(layer.Pev(e.id, v)) < 1e-13);
      CHECK(idem(layer.Ibar_ev(e.id, v)) < 1e-13);
    }
  }
  for (const auto& v : cx.vertices) {
    CHECK(idem(layer.Iv(v.id)) < 1e-13);
    CHECK(idem(layer.Pv(v.id)) < 1e-13);
    CHECK(idem(layer.Ibar_v(v.id)) < 1e-13);
  }
  CHECK(idem(layer.P()) < 1e-12);
}

TEST_CASE("interior projector acts on single-patch functions") {
  auto cx = make_fixture("two_patch", BcMode::Inhomogeneous);
  ConformingLayer layer(cx);
  int n = cx.spaces(0).n();
  Eigen::VectorXd interior = Eigen::VectorXd::Zero(cx.dim(0));
  interior[1 + (n + 1) * 1] = 1.0; // interior index (1,1) of patch 0
  CHECK((layer.Ik0(0) * interior - interior).norm() < 1e-14);
  Eigen::VectorXd boundary = Eigen::VectorXd::Zero(cx.dim(0));
  boundary[0] = 1.0; // corner index (0,0)
  CHECK((layer.Ik0(0) * boundary).norm() < 1e-14);
}

TEST_CASE("P projects onto the conforming space") {
  std::mt19937_64 rng(7);
  for (const char* name : {"two_patch", "two_patch_flipped", "square_2x2",
                           "lshape", "annulus_pair"}) {
    for (BcMode bc : {BcMode::Inhomogeneous, BcMode::Homogeneous}) {
      auto cx = make_fixture(name, bc);
      ConformingLayer layer(cx);

      // P o embedding = embedding
      Eigen::SparseMatrix<double> d = layer.P() * layer.embedding() - layer.embedding();
      CHECK(spnorm(d) < 1e-12);

      // output of P is continuous (and vanishes on the boundary when homog)
      auto f = unflatten(cx, 0, layer.P() * random_broken0(cx, rng));
      for (const auto& e : cx.edges) {
        auto j = value_jump(cx, e.id, f);
        if (!e.boundary)
          CHECK(j.max_jump < 1e-11 * std::max(1.0, j.scale));
        else if (bc == BcMode::Homogeneous)
          CHECK(j.max_jump < 1e-11);
      }
    }
  }
}

TEST_CASE("P copies the coarse trace to the fine side") {
  auto cx = make_fixture("two_patch", BcMode::Inhomogeneous);
  ConformingLayer layer(cx);
  // broken basis function on the coarse side of the interface, interior
  // parallel index
  int e = -1;
  for (const auto& er : cx.edges)
    if (!er.boundary) e = er.id;
  REQUIRE(e >= 0);
  int i = 2;
  Eigen::VectorXd f0 = Eigen::VectorXd::Zero(cx.dim(0));
  f0[layer.edge_dof(e, cx.edges[e].minus, i)] = 1.0;
  Eigen::VectorXd pf = layer.P() * f0;
  Eigen::VectorXd expect = layer.edge_function(e, i);
  CHECK((pf - expect).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("kernel lemmas on conforming inputs") {
  auto cx = make_fixture("square_2x2", BcMode::Inhomogeneous);
  ConformingLayer layer(cx);
  const auto& E = layer.embedding();
  for (const auto& er : cx.edges) {
    Eigen::SparseMatrix<double> d = (layer.Pe(er.id) - layer.Ie(er.id)) * E;
    CHECK(spnorm(d) < 1e-12);
    for (int v : cx.vertices_of_edge(er.id)) {
      Eigen::SparseMatrix<double> dv =
          (layer.Pev(er.id, v) - layer.Ibar_ev(er.id, v)) * E;
      CHECK(spnorm(dv) < 1e-12);
    }
  }
  for (const auto& vr : cx.vertices) {
    Eigen::SparseMatrix<double> dv = (layer.Pv(vr.id) - layer.Ibar_v(vr.id)) * E;
    CHECK(spnorm(dv) < 1e-12);
  }
}

TEST_CASE("bar I^v agrees with bar I^e_v on the edge") {
  auto cx = make_fixture("square_2x2", BcMode::Inhomogeneous);
  ConformingLayer layer(cx);
  std::mt19937_64 rng(19);
  Eigen::VectorXd f0 = random_broken0(cx, rng);
  for (const auto& vr : cx.vertices) {
    auto iv = unflatten(cx, 0, layer.Ibar_v(vr.id) * f0);
    for (int e : vr.edges) {
      auto iev = unflatten(cx, 0, layer.Ibar_ev(e, vr.id) * f0);
      for (const auto& f : cx.edges[e].sides) {
        for (int q = 0; q <= 12; ++q) {
          Vec2 xh = f.to_logical(q / 12.0, 0.0);
          double a = cx.spaces(f.patch).eval0(iv.coeffs[f.patch], xh);
          double b = cx.spaces(f.patch).eval0(iev.coeffs[f.patch], xh);
          CHECK(std::abs(a - b) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("parallel invariance is preserved by P^e and I^e") {
  auto cx = make_fixture("two_patch", BcMode::Inhomogeneous);
  ConformingLayer layer(cx);
  int e = -1;
  for (const auto& er : cx.edges)
    if (!er.boundary) e = er.id;
  REQUIRE(e >= 0);

  // field depending only on the perpendicular coordinate relative to e
  auto phi = [&](int k, const Vec2& xh) {
    const auto& f = cx.edges[e].sides[cx.edges[e].side_of(k)];
    auto [s, t] = f.from_logical(xh);
    (void)s;
    return std::exp(-t) + t * t;
  };
  QuadratureSpec quad;
  auto ph = project_pw(cx, 0, phi, quad);
  Eigen::VectorXd c = flatten(cx, ph);
  for (const Eigen::VectorXd& w :
       {Eigen::VectorXd(layer.Pe(e) * c), Eigen::VectorXd(layer.Ie(e) * c),
        c}) {
    auto g = dir_grad_edge(cx, e, EdgeDir::Parallel, unflatten(cx, 0, w));
    double nrm = 0;
    for (const auto& blk : g.coeffs) nrm = std::max(nrm, blk.lpNorm<Eigen::Infinity>());
    CHECK(nrm < 1e-11);
  }
}

TEST_CASE("extension domains") {
  auto cx = make_fixture("two_patch", BcMode::Inhomogeneous);
  int e = -1;
  for (const auto& er : cx.edges)
    if (!er.boundary) e = er.id;
  REQUIRE(e >= 0);

  SUBCASE("full edge neighborhood is a fixed point") {
    PatchBoxes all;
    for (const auto& f : cx.edges[e].sides) all[f.patch] = LogicalBox{};
    auto ext = extend_edge(cx, e, all);
    for (const auto& [k, b] : ext) {
      CHECK(b.lo[0] == doctest::Approx(0.0));
      CHECK(b.hi[0] == doctest::Approx(1.0));
      CHECK(b.lo[1] == doctest::Approx(0.0));
      CHECK(b.hi[1] == doctest::Approx(1.0));
    }
  }

  SUBCASE("fine side inherits the coarse parallel interval") {
    // small region on the coarse side touching the interface
    PatchBoxes region;
    LogicalBox b;
    b.lo = Vec2(0.9, 0.4);
    b.hi = Vec2(1.0, 0.6);
    region[cx.edges[e].kminus()] = b;
    auto ext = extend_edge(cx, e, region);
    REQUIRE(ext.count(cx.edges[e].kplus()) == 1);
    const auto& fm = cx.edges[e].sides[cx.edges[e].minus];
    const auto& fp = cx.edges[e].sides[cx.edges[e].plus];
    // parallel traces agree
    CHECK(ext[fm.patch].lo[fm.axis_par] ==
          doctest::Approx(ext[fp.patch].lo[fp.axis_par]));
    CHECK(ext[fm.patch].hi[fm.axis_par] ==
          doctest::Approx(ext[fp.patch].hi[fp.axis_par]));
  }

  SUBCASE("nested application grows") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ud(0, 1);
    for (int t = 0; t < 20; ++t) {
      PatchBoxes region;
      LogicalBox b;
      double x0 = ud(rng) * 0.8, y0 = ud(rng) * 0.8;
      b.lo = Vec2(x0, y0);
      b.hi = Vec2(x0 + 0.1, y0 + 0.1);
      region[cx.edges[e].kminus()] = b;
      auto e1 = extend_edge(cx, e, region);
      auto e2 = extend_edge(cx, e, e1);
      CHECK(boxes_contain(e2, e1));
      CHECK(boxes_contain(e1, region));
    }
  }

  SUBCASE("region outside the neighborhood is rejected") {
    auto cx3 = make_fixture("lshape", BcMode::Inhomogeneous);
    PatchBoxes region;
    region[2] = LogicalBox{};
    int ei = -1;
    for (const auto& er : cx3.edges)
      if (!er.boundary && er.touches(0) && er.touches(1)) ei = er.id;
    REQUIRE(ei >= 0);
    CHECK_THROWS_AS(extend_edge(cx3, ei, region), RegionOutsideNeighborhood);
  }
}

TEST_CASE("measured P operator norm stays bounded across refinements") {
  std::mt19937_64 rng(31);
  double prev = 0;
  for (int level = 0; level < 3; ++level) {
    auto cx = make_fixture("two_patch", BcMode::Inhomogeneous,
                           SequenceKind::GradCurl, 3, level);
    ConformingLayer layer(cx);
    QuadratureSpec quad;
    double worst = 0;
    for (int t = 0; t < 5; ++t) {
      auto f = unflatten(cx, 0, random_broken0(cx, rng));
      auto pf = layer.apply_P(f);
      double a = lp_norm(cx, pf, 2.0, quad);
      double b = lp_norm(cx, f, 2.0, quad);
      worst = std::max(worst, a / b);
    }
    MESSAGE("level ", level, ": measured ||P||_2 ratio ", worst);
    CHECK(std::isfinite(worst));
    prev = worst;
  }
  (void)prev;
}
