// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

namespace mpfeec {

/// Gauss-Legendre rule on [-1,1]. Nodes are computed once per order and
/// cached for the lifetime of the process.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Returns the n-point Gauss-Legendre rule (n >= 1).
const GaussRule& gauss_legendre(int n);

/// Per-cell tensor quadrature specification.
struct QuadratureSpec {
  int q = 0; // points per direction per cell; 0 means "pick from degree"
  int points_for(int degree) const { return q > 0 ? q : degree + 3; }
};

/// Integrates f over [a,b] with an n-point Gauss rule.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int n);

/// Integrates f over [a,b], splitting at the given sorted breakpoints so
/// that piecewise-smooth integrands are handled span by span.
double integrate_subdivided(const std::function<double(double)>& f, double a,
                            double b, const std::vector<double>& breaks,
                            int n);

/// Cumulative integral z -> int_0^z g along [0,1], subdivided at `breaks`
/// (sorted, must start at 0 and end at 1). Prefix sums over the spans are
/// precomputed; evaluation adds a partial-span Gauss contribution.
class Prefix1D {
public:
  Prefix1D() = default;
  Prefix1D(std::function<double(double)> g, std::vector<double> breaks, int n);

  double eval(double z) const;
  /// int_{z0}^{z1} g
  double eval(double z0, double z1) const { return eval(z1) - eval(z0); }

private:
  std::function<double(double)> g_;
  std::vector<double> breaks_;
  std::vector<double> cum_;
  int n_ = 0;
};

} // namespace mpfeec
