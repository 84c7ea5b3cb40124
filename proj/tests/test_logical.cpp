#include <doctest.h>

#include <cmath>
#include <random>

#include "mpfeec/logical.hpp"

using namespace mpfeec;

namespace {

LogicalDeRham cubic_spaces() {
  return LogicalDeRham(make_space(3, {0.0, 0.25, 0.5, 0.75, 1.0}, {2, 2, 2}));
}

} // namespace

TEST_CASE("project0_logical basics") {
  auto sp = cubic_spaces();
  QuadratureSpec quad;

  SUBCASE("constants reproduce") {
    auto c = project0_logical(sp, [](const Vec2&) { return 1.0; }, quad);
    CHECK((c.array() - 1.0).abs().maxCoeff() < 1e-13);
  }

  SUBCASE("directional invariance") {
    auto c = project0_logical(
        sp, [](const Vec2& x) { return std::sin(3 * x[1]) + x[1] * x[1]; },
        quad);
    int n1 = sp.n() + 1;
    for (int i2 = 0; i2 < n1; ++i2)
      for (int i1 = 1; i1 < n1; ++i1)
        CHECK(std::abs(c[i1 + n1 * i2] - c[0 + n1 * i2]) < 1e-12);
  }

  SUBCASE("basis functions map to unit vectors") {
    int n1 = sp.n() + 1;
    for (int j : {0, 3, n1 * n1 - 1}) {
      auto f = [&](const Vec2& x) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(sp.dim0());
        e[j] = 1.0;
        return sp.eval0(e, x);
      };
      auto c = project0_logical(sp, f, quad);
      for (int i = 0; i < c.size(); ++i)
        CHECK(std::abs(c[i] - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
  }

  SUBCASE("idempotent on its range") {
    auto f = [](const Vec2& x) { return std::exp(x[0]) * std::cos(x[1]); };
    auto c1 = project0_logical(sp, f, quad);
    auto c2 = project0_logical(
        sp, [&](const Vec2& x) { return sp.eval0(c1, x); }, quad);
    CHECK((c2 - c1).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("logical differential operators") {
  auto sp = cubic_spaces();
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;

  SUBCASE("constant has zero gradient") {
    Eigen::VectorXd c0 = Eigen::VectorXd::Ones(sp.dim0());
    CHECK(grad_logical(sp, c0).lpNorm<Eigen::Infinity>() < 1e-14);
  }

  SUBCASE("curl o grad = 0") {
    Eigen::VectorXd c0(sp.dim0());
    for (int i = 0; i < c0.size(); ++i) c0[i] = nd(rng);
    auto g = grad_logical(sp, c0);
    CHECK(curl_logical(sp, g).lpNorm<Eigen::Infinity>() < 1e-13);
  }

  SUBCASE("gradient matches pointwise derivatives") {
    QuadratureSpec quad;
    auto c0 = project0_logical(
        sp, [](const Vec2& x) { return x[0] * x[1]; }, quad);
    auto c1 = grad_logical(sp, c0);
    for (int q = 0; q < 100; ++q) {
      Vec2 x((q % 10 + 0.4) / 10.0, (q / 10 + 0.6) / 10.0);
      Vec2 g = sp.eval1(c1, x);
      CHECK(std::abs(g[0] - x[1]) < 1e-12);
      CHECK(std::abs(g[1] - x[0]) < 1e-12);
    }
  }
}

TEST_CASE("project1/project2 logical") {
  auto sp = cubic_spaces();
  QuadratureSpec quad;
  std::mt19937_64 rng(37);
  std::normal_distribution<double> nd;

  SUBCASE("V1 members reproduce") {
    Eigen::VectorXd c(sp.dim1());
    for (int i = 0; i < c.size(); ++i) c[i] = nd(rng);
    auto u = [&](const Vec2& x) { return sp.eval1(c, x); };
    auto proj = project1_logical(sp, u, quad);
    CHECK((proj - c).lpNorm<Eigen::Infinity>() < 1e-11);
  }

  SUBCASE("gradient commutation") {
    auto phi = [](const Vec2& x) {
      return std::exp(x[0]) * std::cos(1.3 * x[1]);
    };
    auto gphi = [](const Vec2& x) -> Vec2 {
      return Vec2(std::exp(x[0]) * std::cos(1.3 * x[1]),
                  -1.3 * std::exp(x[0]) * std::sin(1.3 * x[1]));
    };
    auto c0 = project0_logical(sp, phi, quad);
    auto lhs = grad_logical(sp, c0);
    auto rhs = project1_logical(sp, gphi, quad);
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-11);
  }

  SUBCASE("curl commutation") {
    auto u = [](const Vec2& x) -> Vec2 {
      return Vec2(std::sin(x[1]) * x[0], std::cos(x[0] + x[1]));
    };
    auto curlu = [](const Vec2& x) {
      return -std::sin(x[0] + x[1]) - std::cos(x[1]) * x[0];
    };
    QuadratureSpec fine;
    fine.q = 8;
    auto c1 = project1_logical(sp, u, fine);
    auto lhs = curl_logical(sp, c1);
    auto rhs = project2_logical(sp, curlu, fine);
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-11);
  }

  SUBCASE("V2 constants reproduce") {
    auto c2 = project2_logical(sp, [](const Vec2&) { return 1.0; }, quad);
    Eigen::VectorXd exact =
        project2_logical(sp, [&](const Vec2&) { return 1.0; }, quad);
    // evaluate back: the projected field must be identically one
    for (int q = 0; q < 25; ++q) {
      Vec2 x((q % 5 + 0.37) / 5.0, (q / 5 + 0.61) / 5.0);
      CHECK(sp.eval2(c2, x) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("V2 members reproduce") {
    Eigen::VectorXd c(sp.dim2());
    for (int i = 0; i < c.size(); ++i) c[i] = nd(rng);
    auto f = [&](const Vec2& x) { return sp.eval2(c, x); };
    auto proj = project2_logical(sp, f, quad);
    CHECK((proj - c).lpNorm<Eigen::Infinity>() < 1e-11);
  }
}

TEST_CASE("extension index sets") {
  LogicalDeRham hats(make_space(1, {0.0, 0.5, 1.0}, {0}));

  SUBCASE("full box") {
    LogicalBox box;
    auto r = extension_index_set(hats, box);
    CHECK(r.range1 == std::make_pair(0, 2));
    CHECK(r.range2 == std::make_pair(0, 2));
    CHECK(r.extension.lo[0] == doctest::Approx(0.0));
    CHECK(r.extension.hi[0] == doctest::Approx(1.0));
  }

  SUBCASE("point box") {
    LogicalBox box;
    box.lo = box.hi = Vec2(0.25, 0.25);
    auto r = extension_index_set(hats, box);
    CHECK(r.range1 == std::make_pair(0, 1));
    CHECK(r.range2 == std::make_pair(0, 1));
    CHECK(r.extension.lo[0] == doctest::Approx(0.0));
    CHECK(r.extension.hi[0] == doctest::Approx(1.0));
  }

  SUBCASE("empty box") {
    LogicalBox box;
    box.lo = Vec2(0.7, 0.7);
    box.hi = Vec2(0.2, 0.2);
    auto r = extension_index_set(hats, box);
    CHECK(r.empty());
  }
}

TEST_CASE("inverse estimate constant is finite (measured)") {
  auto sp = cubic_spaces();
  std::mt19937_64 rng(41);
  std::normal_distribution<double> nd;
  double h = sp.v0().min_support_diameter();
  double cmax = 0;
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd c(sp.dim0());
    for (int i = 0; i < c.size(); ++i) c[i] = nd(rng);
    double nf = 0, ng = 0;
    for (int q = 0; q < 400; ++q) {
      Vec2 x((q % 20 + 0.5) / 20.0, (q / 20 + 0.5) / 20.0);
      nf = std::max(nf, std::abs(sp.eval0(c, x)));
      ng = std::max(ng, sp.grad_eval0(c, x).norm());
    }
    cmax = std::max(cmax, ng * h / nf);
  }
  CHECK(std::isfinite(cmax));
  CHECK(cmax > 0);
  MESSAGE("measured inverse-estimate constant: ", cmax);
}
