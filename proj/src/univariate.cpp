// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpfeec/univariate.hpp"

#include <algorithm>
#include <cmath>

#include "mpfeec/errors.hpp"

namespace mpfeec {

UnivariateSplineSpace make_space(int degree, const std::vector<double>& breaks,
                                 const std::vector<int>& regularity) {
  if (degree < 1) throw InvalidKnots("degree must be >= 1");
  if (breaks.size() < 2) throw InvalidKnots("need at least two breakpoints");
  if (std::abs(breaks.front()) > 1e-14 || std::abs(breaks.back() - 1.0) > 1e-14)
    throw InvalidKnots("breakpoints must span [0,1]");
  for (size_t i = 0; i + 1 < breaks.size(); ++i)
    if (!(breaks[i] < breaks[i + 1] - 1e-14))
      throw InvalidKnots("breakpoints must be strictly increasing");
  if (regularity.size() != breaks.size() - 2)
    throw InvalidKnots("one regularity entry per interior breakpoint");
  for (int a : regularity)
    if (a < 0 || a >= degree)
      throw InvalidKnots("regularity must satisfy 0 <= alpha < degree");

  UnivariateSplineSpace s;
  s.degree_ = degree;
  s.breakpoints_ = breaks;
  s.breakpoints_.front() = 0.0;
  s.breakpoints_.back() = 1.0;
  s.regularity_ = regularity;
  s.knots_.assign(degree + 1, 0.0);
  for (size_t i = 1; i + 1 < breaks.size(); ++i) {
    int mult = degree - regularity[i - 1];
    s.knots_.insert(s.knots_.end(), mult, breaks[i]);
  }
  s.knots_.insert(s.knots_.end(), degree + 1, 1.0);
  return s;
}

UnivariateSplineSpace make_uniform_space(int degree, int cells) {
  std::vector<double> breaks(cells + 1);
  for (int i = 0; i <= cells; ++i) breaks[i] = double(i) / cells;
  std::vector<int> reg(std::max(0, cells - 1), degree - 1);
  return make_space(degree, breaks, reg);
}

UnivariateSplineSpace refine_dyadic(const UnivariateSplineSpace& s,
                                    int levels) {
  UnivariateSplineSpace cur = s;
  for (int l = 0; l < levels; ++l) {
    const auto& b = cur.breakpoints();
    std::vector<double> nb;
    std::vector<int> nr;
    for (size_t i = 0; i + 1 < b.size(); ++i) {
      nb.push_back(b[i]);
      if (i > 0) nr.push_back(cur.regularity()[i - 1]);
      nb.push_back(0.5 * (b[i] + b[i + 1]));
      nr.push_back(cur.degree() - 1);
    }
    nb.push_back(b.back());
    cur = make_space(cur.degree(), nb, nr);
  }
  return cur;
}

int UnivariateSplineSpace::find_span(double x) const {
  const int p = degree_;
  const int n = last_index();
  if (x >= knots_[n + 1]) return n; // left limit at x = 1
  if (x <= knots_[p]) return p;
  auto it = std::upper_bound(knots_.begin() + p, knots_.begin() + n + 1, x);
  return int(it - knots_.begin()) - 1;
}

int UnivariateSplineSpace::eval_basis(double x, int deriv,
                                      Eigen::ArrayXd& values) const {
  const int p = degree_;
  const int span = find_span(x);
  values.resize(p + 1);

  // Cox-de Boor triangle (Piegl-Tiller A2.2), keeping the previous row so
  // the first derivative can be assembled from degree p-1 values.
  Eigen::ArrayXd N(p + 1), left(p + 1), right(p + 1), prev(p + 1);
  N[0] = 1.0;
  prev.setZero();
  for (int j = 1; j <= p; ++j) {
    if (j == p && deriv == 1) prev.head(p) = N.head(p);
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      double den = right[r + 1] + left[j - r];
      double tmp = (den != 0.0) ? N[r] / den : 0.0;
      N[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    N[j] = saved;
  }

  if (deriv == 0) {
    values = N;
  } else {
    // dN_{i,p} = p * ( N_{i,p-1}/(t_{i+p}-t_i) - N_{i+1,p-1}/(t_{i+p+1}-t_{i+1}) )
    for (int r = 0; r <= p; ++r) {
      int i = span - p + r;
      double d = 0.0;
      if (r > 0) {
        double den = knots_[i + p] - knots_[i];
        if (den > 0) d += prev[r - 1] / den;
      }
      if (r < p) {
        double den = knots_[i + p + 1] - knots_[i + 1];
        if (den > 0) d -= prev[r] / den;
      }
      values[r] = p * d;
    }
  }
  return span - p;
}

double UnivariateSplineSpace::eval(const Eigen::VectorXd& coeffs, double x,
                                   int deriv) const {
  Eigen::ArrayXd v;
  int first = eval_basis(x, deriv, v);
  double s = 0.0;
  for (int r = 0; r < v.size(); ++r) s += coeffs[first + r] * v[r];
  return s;
}

std::pair<double, double> UnivariateSplineSpace::support(int i) const {
  return {knots_[i], knots_[i + degree_ + 1]};
}

double UnivariateSplineSpace::min_support_diameter() const {
  double m = 1.0;
  for (int i = 0; i <= last_index(); ++i) {
    auto [a, b] = support(i);
    m = std::min(m, b - a);
  }
  return m;
}

UnivariateSplineSpace UnivariateSplineSpace::derivative_space() const {
  std::vector<int> reg(regularity_.size());
  for (size_t i = 0; i < reg.size(); ++i) reg[i] = regularity_[i] - 1;
  if (degree_ == 1) {
    // piecewise constants: knot vector has interior multiplicity 1, ends 1
    UnivariateSplineSpace s;
    s.degree_ = 0;
    s.breakpoints_ = breakpoints_;
    s.regularity_.assign(regularity_.size(), -1);
    s.knots_.assign(1, 0.0);
    for (size_t i = 1; i + 1 < breakpoints_.size(); ++i)
      s.knots_.push_back(breakpoints_[i]);
    s.knots_.push_back(1.0);
    return s;
  }
  UnivariateSplineSpace s;
  s.degree_ = degree_ - 1;
  s.breakpoints_ = breakpoints_;
  s.regularity_ = reg;
  s.knots_.assign(degree_, 0.0);
  for (size_t i = 1; i + 1 < breakpoints_.size(); ++i) {
    int mult = (degree_ - 1) - reg[i - 1];
    s.knots_.insert(s.knots_.end(), mult, breakpoints_[i]);
  }
  s.knots_.insert(s.knots_.end(), degree_, 1.0);
  return s;
}

UnivariateSplineSpace UnivariateSplineSpace::mirrored() const {
  std::vector<double> b(breakpoints_.rbegin(), breakpoints_.rend());
  for (double& x : b) x = 1.0 - x;
  std::vector<int> r(regularity_.rbegin(), regularity_.rend());
  if (degree_ >= 1) return make_space(degree_, b, r);
  UnivariateSplineSpace s = *this; // degree-0 spaces are handled directly
  s.breakpoints_ = b;
  s.regularity_ = r;
  s.knots_.assign(1, 0.0);
  for (size_t i = 1; i + 1 < b.size(); ++i) s.knots_.push_back(b[i]);
  s.knots_.push_back(1.0);
  return s;
}

bool UnivariateSplineSpace::is_symmetric(double tol) const {
  const auto m = mirrored();
  if (m.knots_.size() != knots_.size()) return false;
  for (size_t i = 0; i < knots_.size(); ++i)
    if (std::abs(m.knots_[i] - knots_[i]) > tol) return false;
  return true;
}

Eigen::MatrixXd UnivariateSplineSpace::gram_matrix() const {
  const int dim = dimension();
  const int nq = degree_ + 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  const GaussRule& rule = gauss_legendre(nq);
  Eigen::ArrayXd vals;
  for (size_t c = 0; c + 1 < breakpoints_.size(); ++c) {
    double a = breakpoints_[c], b = breakpoints_[c + 1];
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < nq; ++q) {
      double x = mid + half * rule.nodes[q];
      double w = half * rule.weights[q];
      int first = eval_basis(x, 0, vals);
      for (int r = 0; r < vals.size(); ++r)
        for (int s = 0; s < vals.size(); ++s)
          M(first + r, first + s) += w * vals[r] * vals[s];
    }
  }
  return M;
}

Eigen::VectorXd UnivariateSplineSpace::greville_points() const {
  const int dim = dimension();
  Eigen::VectorXd g(dim);
  for (int i = 0; i < dim; ++i) {
    double s = 0.0;
    for (int k = 1; k <= degree_; ++k) s += knots_[i + k];
    g[i] = s / degree_;
  }
  return g;
}

Eigen::MatrixXd differentiation_matrix(const UnivariateSplineSpace& space) {
  const int p = space.degree();
  const int n = space.last_index();
  const auto& t = space.knots();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n + 1);
  for (int j = 0; j < n; ++j) {
    double den = t[j + p + 1] - t[j + 1];
    D(j, j) = -p / den;
    D(j, j + 1) = p / den;
  }
  return D;
}

Eigen::MatrixXd antiderivative_matrix(const UnivariateSplineSpace& space,
                                      double constant_at) {
  const int p = space.degree();
  const int n = space.last_index();
  const auto& t = space.knots();
  // Cumulative coefficients with g_0 = 0, then shift so that G(c) = 0.
  Eigen::MatrixXd A0 = Eigen::MatrixXd::Zero(n + 1, n);
  for (int j = 0; j < n; ++j) {
    double w = (t[j + p + 1] - t[j + 1]) / p;
    for (int i = j + 1; i <= n; ++i) A0(i, j) = w;
  }
  Eigen::ArrayXd vals;
  int first = space.eval_basis(constant_at, 0, vals);
  Eigen::RowVectorXd ev = Eigen::RowVectorXd::Zero(n + 1);
  for (int r = 0; r < vals.size(); ++r) ev[first + r] = vals[r];
  return A0 - Eigen::VectorXd::Ones(n + 1) * (ev * A0);
}

DualBasis1D::DualBasis1D(const UnivariateSplineSpace& space, DualKind kind)
    : kind_(kind) {
  gram_ = space.gram_matrix();
  gram_lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(gram_);
  double det = std::abs(gram_lu_.determinant());
  if (!(det > 0) || !std::isfinite(det))
    throw SingularGram("gram matrix is singular");
  coeffs_ = gram_lu_.solve(Eigen::MatrixXd::Identity(gram_.rows(), gram_.cols()));
  if (kind_ == DualKind::GrevilleInterp) {
    greville_ = space.greville_points();
    const int dim = space.dimension();
    colloc_ = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::ArrayXd vals;
    for (int i = 0; i < dim; ++i) {
      int first = space.eval_basis(greville_[i], 0, vals);
      for (int r = 0; r < vals.size(); ++r) colloc_(i, first + r) = vals[r];
    }
    colloc_lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(colloc_);
  }
}

Eigen::VectorXd DualBasis1D::apply(const UnivariateSplineSpace& space,
                                   const std::function<double(double)>& f,
                                   int quad_points) const {
  const int dim = space.dimension();
  if (kind_ == DualKind::GrevilleInterp) {
    Eigen::VectorXd vals(dim);
    for (int i = 0; i < dim; ++i) vals[i] = f(greville_[i]);
    return colloc_lu_.solve(vals);
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  const GaussRule& rule = gauss_legendre(quad_points);
  const auto& brk = space.breakpoints();
  Eigen::ArrayXd vals;
  for (size_t c = 0; c + 1 < brk.size(); ++c) {
    double mid = 0.5 * (brk[c] + brk[c + 1]);
    double half = 0.5 * (brk[c + 1] - brk[c]);
    for (int q = 0; q < quad_points; ++q) {
      double x = mid + half * rule.nodes[q];
      double w = half * rule.weights[q] * f(x);
      int first = space.eval_basis(x, 0, vals);
      for (int r = 0; r < vals.size(); ++r) b[first + r] += w * vals[r];
    }
  }
  return gram_lu_.solve(b);
}

Eigen::VectorXd DualBasis1D::solve_moments(const Eigen::VectorXd& m) const {
  return gram_lu_.solve(m);
}

Eigen::VectorXd DualBasis1D::solve_values(const Eigen::VectorXd& v) const {
  return colloc_lu_.solve(v);
}

namespace {

int knot_multiplicity(const std::vector<double>& knots, double x, double tol) {
  int m = 0;
  for (double t : knots)
    if (std::abs(t - x) <= tol) ++m;
  return m;
}

} // namespace

bool is_nested(const UnivariateSplineSpace& coarse,
               const UnivariateSplineSpace& fine, double tol) {
  if (coarse.degree() > fine.degree()) return false;
  const int dp = fine.degree() - coarse.degree();
  // Unique coarse knots with multiplicities.
  const auto& ck = coarse.knots();
  for (size_t i = 0; i < ck.size();) {
    size_t j = i;
    while (j < ck.size() && std::abs(ck[j] - ck[i]) <= tol) ++j;
    int mult_c = int(j - i);
    int need = mult_c + dp;
    bool endpoint = std::abs(ck[i]) <= tol || std::abs(ck[i] - 1.0) <= tol;
    if (endpoint) need = fine.degree() + 1; // open ends always satisfied
    if (knot_multiplicity(fine.knots(), ck[i], tol) < need) return false;
    i = j;
  }
  return true;
}

Eigen::MatrixXd expansion_matrix(const UnivariateSplineSpace& coarse,
                                 const UnivariateSplineSpace& fine, bool flip,
                                 double* max_residual) {
  const int nc = coarse.dimension();
  const int nf = fine.dimension();
  // Moments int lambda^f_j(s) lambda^c_i(eta(s)) ds over the merged grid.
  std::vector<double> grid = fine.breakpoints();
  for (double b : coarse.breakpoints()) grid.push_back(flip ? 1.0 - b : b);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-13; }),
             grid.end());

  const int nq = (coarse.degree() + fine.degree()) / 2 + 2;
  const GaussRule& rule = gauss_legendre(nq);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nf, nc);
  Eigen::ArrayXd fv, cv;
  for (size_t c = 0; c + 1 < grid.size(); ++c) {
    double mid = 0.5 * (grid[c] + grid[c + 1]);
    double half = 0.5 * (grid[c + 1] - grid[c]);
    for (int q = 0; q < nq; ++q) {
      double s = mid + half * rule.nodes[q];
      double w = half * rule.weights[q];
      int ff = fine.eval_basis(s, 0, fv);
      int cf = coarse.eval_basis(flip ? 1.0 - s : s, 0, cv);
      for (int r = 0; r < fv.size(); ++r)
        for (int t = 0; t < cv.size(); ++t)
          B(ff + r, cf + t) += w * fv[r] * cv[t];
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(fine.gram_matrix());
  Eigen::MatrixXd W = lu.solve(B);

  double res = 0.0;
  for (int i = 0; i < nc; ++i) {
    for (int s = 0; s <= 160; ++s) {
      double x = double(s) / 160;
      Eigen::ArrayXd cvv;
      int cf = coarse.eval_basis(flip ? 1.0 - x : x, 0, cvv);
      double exact = (i >= cf && i < cf + cvv.size()) ? cvv[i - cf] : 0.0;
      double approx = fine.eval(W.col(i), x);
      res = std::max(res, std::abs(exact - approx));
    }
  }
  if (max_residual) *max_residual = res;
  return W;
}

} // namespace mpfeec
