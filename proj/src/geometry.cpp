// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpfeec/geometry.hpp"

#include <cmath>

#include "mpfeec/errors.hpp"

namespace mpfeec {

std::pair<double, double> PatchMapping::measured_jacobian_bounds(
    int samples) const {
  double ndf = 0.0, ndfi = 0.0;
  for (int i = 0; i <= samples; ++i)
    for (int j = 0; j <= samples; ++j) {
      Vec2 x(double(i) / samples, double(j) / samples);
      Mat2 J = DF(x);
      Eigen::JacobiSVD<Mat2> svd(J);
      ndf = std::max(ndf, svd.singularValues()[0]);
      ndfi = std::max(ndfi, 1.0 / svd.singularValues()[1]);
    }
  return {ndf, ndfi};
}

double PatchMapping::diameter(int samples) const {
  std::vector<Vec2> pts;
  for (int i = 0; i <= samples; ++i) {
    double t = double(i) / samples;
    pts.push_back(F(Vec2(t, 0)));
    pts.push_back(F(Vec2(t, 1)));
    pts.push_back(F(Vec2(0, t)));
    pts.push_back(F(Vec2(1, t)));
  }
  double d = 0.0;
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = a + 1; b < pts.size(); ++b)
      d = std::max(d, (pts[a] - pts[b]).norm());
  return d;
}

void check_orientation(const PatchMapping& m, int samples) {
  for (int i = 0; i <= samples; ++i)
    for (int j = 0; j <= samples; ++j) {
      Vec2 x(double(i) / samples, double(j) / samples);
      if (m.jacobian_det(x) <= 1e-12)
        throw DegenerateMapping("det DF <= 1e-12 at sampled point");
    }
}

PatchMapping affine_mapping(const Mat2& A, const Vec2& b) {
  PatchMapping m;
  m.kind = "affine";
  m.params = {A(0, 0), A(0, 1), A(1, 0), A(1, 1), b[0], b[1]};
  m.F = [A, b](const Vec2& x) -> Vec2 { return A * x + b; };
  m.DF = [A](const Vec2&) -> Mat2 { return A; };
  check_orientation(m);
  return m;
}

PatchMapping bilinear_mapping(const Vec2& p00, const Vec2& p10,
                              const Vec2& p01, const Vec2& p11) {
  PatchMapping m;
  m.kind = "bilinear";
  m.params = {p00[0], p00[1], p10[0], p10[1], p01[0], p01[1], p11[0], p11[1]};
  m.F = [=](const Vec2& x) -> Vec2 {
    return (1 - x[0]) * (1 - x[1]) * p00 + x[0] * (1 - x[1]) * p10 +
           (1 - x[0]) * x[1] * p01 + x[0] * x[1] * p11;
  };
  m.DF = [=](const Vec2& x) -> Mat2 {
    Vec2 dx = (1 - x[1]) * (p10 - p00) + x[1] * (p11 - p01);
    Vec2 dy = (1 - x[0]) * (p01 - p00) + x[0] * (p11 - p10);
    Mat2 J;
    J.col(0) = dx;
    J.col(1) = dy;
    return J;
  };
  check_orientation(m);
  return m;
}

PatchMapping annulus_sector_mapping(double r0, double r1, double th0,
                                    double th1) {
  if (!(0 < r0 && r0 < r1) || !(th0 < th1) || th1 - th0 >= M_PI)
    throw DegenerateMapping("annulus sector requires 0<r0<r1, th0<th1<th0+pi");
  PatchMapping m;
  m.kind = "annulus-sector";
  m.params = {r0, r1, th0, th1};
  m.F = [=](const Vec2& x) -> Vec2 {
    double r = r0 + x[0] * (r1 - r0);
    double th = th0 + x[1] * (th1 - th0);
    return Vec2(r * std::cos(th), r * std::sin(th));
  };
  m.DF = [=](const Vec2& x) -> Mat2 {
    double r = r0 + x[0] * (r1 - r0);
    double th = th0 + x[1] * (th1 - th0);
    double dr = r1 - r0, dth = th1 - th0;
    Mat2 J;
    J(0, 0) = dr * std::cos(th);
    J(0, 1) = -r * dth * std::sin(th);
    J(1, 0) = dr * std::sin(th);
    J(1, 1) = r * dth * std::cos(th);
    return J;
  };
  check_orientation(m);
  return m;
}

PatchMapping builtin_mapping(const std::string& kind,
                             const std::vector<double>& params) {
  if (kind == "affine") {
    if (params.size() != 6) throw DegenerateMapping("affine needs 6 params");
    Mat2 A;
    A << params[0], params[1], params[2], params[3];
    return affine_mapping(A, Vec2(params[4], params[5]));
  }
  if (kind == "bilinear") {
    if (params.size() != 8) throw DegenerateMapping("bilinear needs 8 params");
    return bilinear_mapping(Vec2(params[0], params[1]),
                            Vec2(params[2], params[3]),
                            Vec2(params[4], params[5]),
                            Vec2(params[6], params[7]));
  }
  if (kind == "annulus-sector") {
    if (params.size() != 4)
      throw DegenerateMapping("annulus-sector needs 4 params");
    return annulus_sector_mapping(params[0], params[1], params[2], params[3]);
  }
  throw DegenerateMapping("unknown mapping kind: " + kind);
}

std::function<double(const Vec2&)> pullback0(
    const PatchMapping& m, const std::function<double(const Vec2&)>& f) {
  return [&m, f](const Vec2& xhat) { return f(m.F(xhat)); };
}

std::function<Vec2(const Vec2&)> pullback1(
    const PatchMapping& m, const std::function<Vec2(const Vec2&)>& u) {
  return [&m, u](const Vec2& xhat) -> Vec2 {
    return m.DF(xhat).transpose() * u(m.F(xhat));
  };
}

std::function<double(const Vec2&)> pullback2(
    const PatchMapping& m, const std::function<double(const Vec2&)>& f) {
  return [&m, f](const Vec2& xhat) {
    return m.jacobian_det(xhat) * f(m.F(xhat));
  };
}

double push0_value(const PatchMapping&, const Vec2&, double v) { return v; }

Vec2 push1_value(const PatchMapping& m, const Vec2& xhat, const Vec2& v) {
  return m.DF(xhat).transpose().inverse() * v;
}

double push2_value(const PatchMapping& m, const Vec2& xhat, double v) {
  return v / m.jacobian_det(xhat);
}

Vec2 push1_star_value(const PatchMapping& m, const Vec2& xhat, const Vec2& v) {
  return (m.DF(xhat) * v) / m.jacobian_det(xhat);
}

std::function<Vec2(const Vec2&)> pullback1_star(
    const PatchMapping& m, const std::function<Vec2(const Vec2&)>& u) {
  return [&m, u](const Vec2& xhat) -> Vec2 {
    Mat2 J = m.DF(xhat);
    return J.determinant() * (J.inverse() * u(m.F(xhat)));
  };
}

double lp_norm_patch(const PatchMapping& m,
                     const std::vector<double>& breaks1,
                     const std::vector<double>& breaks2,
                     const std::function<double(const Vec2&)>& abs_value,
                     double p, const QuadratureSpec& quad, int degree) {
  const int nq = quad.points_for(degree);
  const GaussRule& rule = gauss_legendre(nq);
  const bool inf = std::isinf(p);
  double acc = 0.0;
  for (size_t c2 = 0; c2 + 1 < breaks2.size(); ++c2) {
    double mid2 = 0.5 * (breaks2[c2] + breaks2[c2 + 1]);
    double half2 = 0.5 * (breaks2[c2 + 1] - breaks2[c2]);
    for (size_t c1 = 0; c1 + 1 < breaks1.size(); ++c1) {
      double mid1 = 0.5 * (breaks1[c1] + breaks1[c1 + 1]);
      double half1 = 0.5 * (breaks1[c1 + 1] - breaks1[c1]);
      if (inf) acc = std::max(acc, abs_value(Vec2(mid1, mid2)));
      for (int q2 = 0; q2 < nq; ++q2)
        for (int q1 = 0; q1 < nq; ++q1) {
          Vec2 x(mid1 + half1 * rule.nodes[q1], mid2 + half2 * rule.nodes[q2]);
          double v = abs_value(x);
          if (inf) {
            acc = std::max(acc, v);
          } else {
            double w =
                half1 * rule.weights[q1] * half2 * rule.weights[q2];
            acc += w * std::pow(v, p) * m.jacobian_det(x);
          }
        }
    }
  }
  return inf ? acc : std::pow(acc, 1.0 / p);
}

} // namespace mpfeec
