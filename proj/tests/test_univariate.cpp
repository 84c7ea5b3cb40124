#include <doctest.h>

#include <cmath>
#include <random>

#include "mpfeec/errors.hpp"
#include "mpfeec/univariate.hpp"

using namespace mpfeec;

namespace {

UnivariateSplineSpace random_space(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pd(1, 4), cd(1, 8);
  int p = pd(rng);
  int cells = cd(rng);
  std::uniform_real_distribution<double> ud(0.05, 0.95);
  std::vector<double> breaks{0.0};
  for (int i = 1; i < cells; ++i) breaks.push_back(ud(rng));
  breaks.push_back(1.0);
  std::sort(breaks.begin(), breaks.end());
  for (size_t i = 1; i < breaks.size(); ++i)
    if (breaks[i] - breaks[i - 1] < 0.02) breaks[i] = breaks[i - 1] + 0.02;
  double scale = breaks.back();
  for (auto& b : breaks) b /= scale;
  std::vector<int> reg;
  std::uniform_int_distribution<int> rd(0, p - 1);
  for (size_t i = 1; i + 1 < breaks.size(); ++i) reg.push_back(rd(rng));
  return make_space(p, breaks, reg);
}

} // namespace

TEST_CASE("make_space dimensions and endpoint interpolation") {
  auto hats = make_space(1, {0.0, 0.5, 1.0}, {0});
  CHECK(hats.dimension() == 3);

  // dimension 7 oracle: open knot vector [0^4, 1/4, 1/2, 3/4, 1^4] has 11
  // knots, dim = 11 - 3 - 1 = 7
  auto cubic = make_space(3, {0.0, 0.25, 0.5, 0.75, 1.0}, {2, 2, 2});
  CHECK(cubic.dimension() == 7);
  CHECK(int(cubic.knots().size()) == 11);

  for (const auto& s : {hats, cubic}) {
    Eigen::ArrayXd v;
    int first = s.eval_basis(0.0, 0, v);
    CHECK(first == 0);
    CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-14));
    int last = s.eval_basis(1.0, 0, v);
    CHECK(last + v.size() - 1 == s.last_index());
    CHECK(v[v.size() - 1] == doctest::Approx(1.0).epsilon(1e-14));
  }

  CHECK_THROWS_AS(make_space(1, {0.0, 0.6, 0.5, 1.0}, {0, 0}), InvalidKnots);
  CHECK_THROWS_AS(make_space(2, {0.0, 0.5, 1.0}, {2}), InvalidKnots);
}

TEST_CASE("eval_basis hats and partition of unity") {
  auto hats = make_space(1, {0.0, 0.5, 1.0}, {0});
  Eigen::ArrayXd v;
  int first = hats.eval_basis(0.25, 0, v);
  CHECK(first == 0);
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(v[1] == doctest::Approx(0.5));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xd(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    auto s = random_space(rng);
    for (int i = 0; i < 20; ++i) {
      double x = xd(rng);
      Eigen::ArrayXd vals, ders;
      s.eval_basis(x, 0, vals);
      s.eval_basis(x, 1, ders);
      CHECK(std::abs(vals.sum() - 1.0) < 1e-13);
      CHECK(std::abs(ders.sum()) < 1e-10);
    }
  }
}

TEST_CASE("derivative_space structure and expansion oracle") {
  auto hats = make_space(1, {0.0, 0.5, 1.0}, {0});
  auto d = hats.derivative_space();
  CHECK(d.degree() == 0);
  CHECK(d.dimension() == 2);

  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    auto s = random_space(rng);
    auto ds = s.derivative_space();
    CHECK(ds.dimension() == s.dimension() - 1);

    // least-squares fit oracle: the derivative of every basis function must
    // be reproduced exactly by the derivative space
    Eigen::MatrixXd D = differentiation_matrix(s);
    for (int i = 0; i <= s.last_index(); ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(s.dimension());
      e[i] = 1.0;
      Eigen::VectorXd dc = D * e;
      for (int q = 0; q <= 40; ++q) {
        double x = (q + 0.31) / 41.0;
        double lhs = s.eval(e, x, 1);
        double rhs = ds.eval(dc, x, 0);
        CHECK(std::abs(lhs - rhs) < 1e-12);
      }
    }
  }
}

TEST_CASE("differentiation matrix") {
  auto s = make_space(3, {0.0, 0.3, 0.7, 1.0}, {2, 1});
  Eigen::MatrixXd D = differentiation_matrix(s);

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(s.dimension());
  CHECK((D * ones).lpNorm<Eigen::Infinity>() < 1e-13);

  // f(x) = x has Greville coefficients
  Eigen::VectorXd lin = s.greville_points();
  Eigen::VectorXd dl = D * lin;
  auto ds = s.derivative_space();
  for (int q = 0; q < 20; ++q) {
    double x = (q + 0.5) / 20.0;
    CHECK(ds.eval(dl, x) == doctest::Approx(1.0).epsilon(1e-12));
  }

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Eigen::VectorXd c(s.dimension());
  for (int i = 0; i < c.size(); ++i) c[i] = nd(rng);
  Eigen::VectorXd dc = D * c;
  for (int q = 0; q < 100; ++q) {
    double x = (q + 0.5) / 100.0;
    CHECK(std::abs(s.eval(c, x, 1) - ds.eval(dc, x)) < 1e-12);
    // finite-difference sanity
    double h = 1e-6;
    if (x > h && x < 1 - h) {
      double fd = (s.eval(c, x + h) - s.eval(c, x - h)) / (2 * h);
      CHECK(std::abs(fd - ds.eval(dc, x)) < 1e-5);
    }
  }
}

TEST_CASE("antiderivative matrix") {
  auto s = make_space(2, {0.0, 0.25, 0.6, 1.0}, {1, 1});
  auto ds = s.derivative_space();
  Eigen::MatrixXd D = differentiation_matrix(s);

  SUBCASE("g = 1, c = 0 gives G(x) = x") {
    Eigen::MatrixXd A = antiderivative_matrix(s, 0.0);
    Eigen::VectorXd g = Eigen::VectorXd::Ones(ds.dimension());
    Eigen::VectorXd G = A * g;
    for (int q = 0; q <= 20; ++q) {
      double x = q / 20.0;
      CHECK(s.eval(G, x) == doctest::Approx(x).epsilon(1e-13));
    }
  }

  SUBCASE("differentiation o antiderivative = identity, quadrature oracle") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (double c : {0.0, 0.37, 1.0}) {
      Eigen::MatrixXd A = antiderivative_matrix(s, c);
      Eigen::MatrixXd DA = D * A;
      CHECK((DA - Eigen::MatrixXd::Identity(ds.dimension(), ds.dimension()))
                .lpNorm<Eigen::Infinity>() < 1e-12);

      Eigen::VectorXd g(ds.dimension());
      for (int i = 0; i < g.size(); ++i) g[i] = nd(rng);
      Eigen::VectorXd G = A * g;
      CHECK(std::abs(s.eval(G, c)) < 1e-13);
      for (int q = 0; q < 50; ++q) {
        double x = (q + 0.5) / 50.0;
        double oracle = integrate_subdivided(
            [&](double z) { return ds.eval(g, z); }, c, x, s.breakpoints(), 8);
        CHECK(std::abs(s.eval(G, x) - oracle) < 1e-12);
      }
    }
  }
}

TEST_CASE("dual basis biorthogonality and projection") {
  auto s = make_space(3, {0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0},
                      {2, 2, 2, 2, 2, 2, 2});
  DualBasis1D duals(s, DualKind::L2Gram);

  // <theta_i, lambda_j> = delta_ij via independent quadrature
  const int dim = s.dimension();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      auto f = [&](double x) {
        Eigen::VectorXd ei = Eigen::VectorXd::Zero(dim), ej = ei;
        ei[i] = 1;
        ej[j] = 1;
        double th = 0;
        for (int k = 0; k < dim; ++k) {
          Eigen::VectorXd ek = Eigen::VectorXd::Zero(dim);
          ek[k] = 1;
          th += duals.coefficient_matrix()(i, k) * s.eval(ek, x);
        }
        return th * s.eval(ej, x);
      };
      G(i, j) = integrate_subdivided(f, 0.0, 1.0, s.breakpoints(), 10);
    }
  CHECK((G - Eigen::MatrixXd::Identity(dim, dim)).lpNorm<Eigen::Infinity>() <
        1e-12);

  SUBCASE("projection reproduces members of the space") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> nd;
    Eigen::VectorXd c(dim);
    for (int i = 0; i < dim; ++i) c[i] = nd(rng);
    auto f = [&](double x) { return s.eval(c, x); };
    Eigen::VectorXd proj = duals.apply(s, f, s.degree() + 3);
    CHECK((proj - c).lpNorm<Eigen::Infinity>() < 1e-12);
  }

  SUBCASE("sin projection matches dense normal-equations oracle") {
    auto f = [](double x) { return std::sin(M_PI * x); };
    Eigen::VectorXd proj = duals.apply(s, f, 12);
    // oracle: independent dense assembly at high quadrature order
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < dim; ++i) {
      Eigen::VectorXd ei = Eigen::VectorXd::Zero(dim);
      ei[i] = 1;
      b[i] = integrate_subdivided([&](double x) { return s.eval(ei, x) * f(x); },
                                  0.0, 1.0, s.breakpoints(), 20);
      for (int j = 0; j < dim; ++j) {
        Eigen::VectorXd ej = Eigen::VectorXd::Zero(dim);
        ej[j] = 1;
        M(i, j) = integrate_subdivided(
            [&](double x) { return s.eval(ei, x) * s.eval(ej, x); }, 0.0, 1.0,
            s.breakpoints(), 20);
      }
    }
    Eigen::VectorXd oracle = M.ldlt().solve(b);
    auto l2err = [&](const Eigen::VectorXd& c) {
      return std::sqrt(integrate_subdivided(
          [&](double x) {
            double d = s.eval(c, x) - f(x);
            return d * d;
          },
          0.0, 1.0, s.breakpoints(), 20));
    };
    CHECK(std::abs(l2err(proj) - l2err(oracle)) < 1e-12);
  }
}

TEST_CASE("greville duals reproduce and are biorthogonal in their sense") {
  auto s = make_space(2, {0.0, 0.5, 1.0}, {1});
  DualBasis1D duals(s, DualKind::GrevilleInterp);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  Eigen::VectorXd c(s.dimension());
  for (int i = 0; i < c.size(); ++i) c[i] = nd(rng);
  auto f = [&](double x) { return s.eval(c, x); };
  Eigen::VectorXd proj = duals.apply(s, f, 5);
  CHECK((proj - c).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("nestedness") {
  auto coarse = make_space(2, {0.0, 0.5, 1.0}, {1});
  auto fine = make_space(2, {0.0, 0.25, 0.5, 0.75, 1.0}, {1, 1, 1});
  auto other = make_space(2, {0.0, 1.0 / 3.0, 1.0}, {1});

  CHECK(is_nested(coarse, coarse));
  CHECK(is_nested(coarse, fine));
  CHECK(!is_nested(fine, coarse));
  CHECK(!is_nested(other, coarse));

  // degree elevation requires raised multiplicities
  auto cubic_max = make_space(3, {0.0, 0.5, 1.0}, {2});
  auto cubic_low = make_space(3, {0.0, 0.5, 1.0}, {1});
  CHECK(!is_nested(coarse, cubic_max));
  CHECK(is_nested(coarse, cubic_low));

  SUBCASE("knot-insertion residual oracle") {
    double res = 0;
    expansion_matrix(coarse, fine, false, &res);
    CHECK(res < 1e-12);
    expansion_matrix(coarse, fine, true, &res);
    CHECK(res < 1e-12);
    expansion_matrix(coarse, cubic_low, false, &res);
    CHECK(res < 1e-12);
    // non-nested: the projection cannot reproduce
    expansion_matrix(other, coarse, false, &res);
    CHECK(res > 1e-3);
  }
}

TEST_CASE("randomized foundations: 50 spaces") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 50; ++t) {
    auto s = random_space(rng);
    // endpoint Kronecker
    Eigen::ArrayXd v;
    int first = s.eval_basis(0.0, 0, v);
    CHECK(first == 0);
    CHECK(std::abs(v[0] - 1.0) < 1e-14);
    for (int r = 1; r < v.size(); ++r) CHECK(std::abs(v[r]) < 1e-14);

    // derivative-antiderivative inverse pair
    Eigen::MatrixXd D = differentiation_matrix(s);
    Eigen::MatrixXd A = antiderivative_matrix(s, 0.31);
    int n = s.dimension() - 1;
    CHECK((D * A - Eigen::MatrixXd::Identity(n, n)).lpNorm<Eigen::Infinity>() <
          1e-12);

    // biorthogonality and idempotence of the induced projection
    DualBasis1D duals(s, DualKind::L2Gram);
    Eigen::MatrixXd MtimesCoeff =
        duals.gram_matrix() * duals.coefficient_matrix();
    CHECK((MtimesCoeff - Eigen::MatrixXd::Identity(s.dimension(), s.dimension()))
              .lpNorm<Eigen::Infinity>() < 1e-11);

    std::normal_distribution<double> nd;
    Eigen::VectorXd c(s.dimension());
    for (int i = 0; i < c.size(); ++i) c[i] = nd(rng);
    auto f = [&](double x) { return s.eval(c, x); };
    Eigen::VectorXd once = duals.apply(s, f, s.degree() + 3);
    auto g = [&](double x) { return s.eval(once, x); };
    Eigen::VectorXd twice = duals.apply(s, g, s.degree() + 3);
    CHECK((twice - once).lpNorm<Eigen::Infinity>() < 1e-12);

    // orientation-reversal symmetry is checked, not imposed
    if (s.is_symmetric()) {
      auto m = s.mirrored();
      CHECK(is_nested(s, m));
      CHECK(is_nested(m, s));
    }
  }
}
