// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpfeec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mpfeec {

namespace {

GaussRule compute_gauss(int n) {
  // Newton iteration on Legendre polynomials, symmetric nodes.
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[n - 1 - i] = r.weights[i];
  }
  if (n == 1) {
    r.nodes[0] = 0.0;
    r.weights[0] = 2.0;
  }
  return r;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int n) {
  const GaussRule& r = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

double integrate_subdivided(const std::function<double(double)>& f, double a,
                            double b, const std::vector<double>& breaks,
                            int n) {
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::vector<double> pts;
  pts.push_back(a);
  for (double t : breaks)
    if (t > a + 1e-14 && t < b - 1e-14) pts.push_back(t);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double s = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    s += integrate(f, pts[i], pts[i + 1], n);
  return sign * s;
}

Prefix1D::Prefix1D(std::function<double(double)> g, std::vector<double> breaks,
                   int n)
    : g_(std::move(g)), breaks_(std::move(breaks)), n_(n) {
  cum_.assign(breaks_.size(), 0.0);
  for (size_t i = 0; i + 1 < breaks_.size(); ++i)
    cum_[i + 1] = cum_[i] + integrate(g_, breaks_[i], breaks_[i + 1], n_);
}

double Prefix1D::eval(double z) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), z);
  size_t span = (it == breaks_.begin()) ? 0 : (it - breaks_.begin() - 1);
  if (span >= breaks_.size() - 1) span = breaks_.size() - 2;
  double lo = breaks_[span];
  if (std::abs(z - lo) < 1e-15) return cum_[span];
  return cum_[span] + integrate(g_, lo, z, n_);
}

} // namespace mpfeec
