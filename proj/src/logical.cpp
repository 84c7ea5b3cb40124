// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpfeec/logical.hpp"

#include <cmath>

#include "mpfeec/errors.hpp"

namespace mpfeec {

Eigen::SparseMatrix<double> kron_sparse(const Eigen::MatrixXd& slow,
                                        const Eigen::MatrixXd& fast) {
  using T = Eigen::Triplet<double>;
  std::vector<T> trips;
  for (int i = 0; i < slow.rows(); ++i)
    for (int j = 0; j < slow.cols(); ++j) {
      double s = slow(i, j);
      if (s == 0.0) continue;
      for (int k = 0; k < fast.rows(); ++k)
        for (int l = 0; l < fast.cols(); ++l) {
          double v = s * fast(k, l);
          if (v != 0.0)
            trips.emplace_back(k + fast.rows() * i, l + fast.cols() * j, v);
        }
    }
  Eigen::SparseMatrix<double> out(slow.rows() * fast.rows(),
                                  slow.cols() * fast.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

namespace {

Eigen::SparseMatrix<double> vstack(const Eigen::SparseMatrix<double>& top,
                                   const Eigen::SparseMatrix<double>& bot) {
  Eigen::SparseMatrix<double> out(top.rows() + bot.rows(), top.cols());
  using T = Eigen::Triplet<double>;
  std::vector<T> trips;
  for (int k = 0; k < top.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(top, k); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < bot.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(bot, k); it; ++it)
      trips.emplace_back(top.rows() + it.row(), it.col(), it.value());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

} // namespace

LogicalDeRham::LogicalDeRham(UnivariateSplineSpace base, DualKind duals)
    : v0_(std::move(base)) {
  v1_ = v0_.derivative_space();
  duals_ = DualBasis1D(v0_, duals);
  diff_ = differentiation_matrix(v0_);
  const int m = n(); // dim V1 per direction
  Eigen::MatrixXd I0 = Eigen::MatrixXd::Identity(m + 1, m + 1);
  Eigen::MatrixXd I1 = Eigen::MatrixXd::Identity(m, m);
  // grad: block A = d1 (fast axis), block B = d2 (slow axis)
  Eigen::SparseMatrix<double> gA = kron_sparse(I0, diff_);
  Eigen::SparseMatrix<double> gB = kron_sparse(diff_, I0);
  grad_ = vstack(gA, gB);
  // curl c = d1 cB - d2 cA
  Eigen::SparseMatrix<double> cB = kron_sparse(I1, diff_); // d1 on V (x) V'
  Eigen::SparseMatrix<double> cA = kron_sparse(diff_, I1); // d2 on V' (x) V
  Eigen::SparseMatrix<double> curl(dim2(), dim1());
  {
    using T = Eigen::Triplet<double>;
    std::vector<T> trips;
    for (int k = 0; k < cA.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(cA, k); it; ++it)
        trips.emplace_back(it.row(), it.col(), -it.value());
    for (int k = 0; k < cB.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(cB, k); it; ++it)
        trips.emplace_back(it.row(), block1_offset() + it.col(), it.value());
    curl.setFromTriplets(trips.begin(), trips.end());
  }
  curl_ = curl;
  mixed_ = kron_sparse(diff_, Eigen::MatrixXd(diff_)); // d1 d2 : V0 -> V2

  // dir_grad_[axis]: embed the single directional derivative in dim1.
  for (int axis = 0; axis < 2; ++axis) {
    Eigen::SparseMatrix<double> blk =
        axis == 0 ? kron_sparse(I0, diff_) : kron_sparse(diff_, I0);
    Eigen::SparseMatrix<double> out(dim1(), dim0());
    using T = Eigen::Triplet<double>;
    std::vector<T> trips;
    int off = axis == 0 ? 0 : block1_offset();
    for (int k = 0; k < blk.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(blk, k); it; ++it)
        trips.emplace_back(off + it.row(), it.col(), it.value());
    out.setFromTriplets(trips.begin(), trips.end());
    dir_grad_[axis] = out;
  }
}

double LogicalDeRham::eval0(const Eigen::VectorXd& c, const Vec2& x) const {
  Eigen::ArrayXd v1a, v2a;
  int f1 = v0_.eval_basis(x[0], 0, v1a);
  int f2 = v0_.eval_basis(x[1], 0, v2a);
  double s = 0.0;
  for (int b = 0; b < v2a.size(); ++b)
    for (int a = 0; a < v1a.size(); ++a)
      s += c[(f1 + a) + (n() + 1) * (f2 + b)] * v1a[a] * v2a[b];
  return s;
}

Vec2 LogicalDeRham::grad_eval0(const Eigen::VectorXd& c, const Vec2& x) const {
  Eigen::ArrayXd a0, a1, b0, b1;
  int f1 = v0_.eval_basis(x[0], 0, a0);
  v0_.eval_basis(x[0], 1, a1);
  int f2 = v0_.eval_basis(x[1], 0, b0);
  v0_.eval_basis(x[1], 1, b1);
  Vec2 g(0, 0);
  for (int b = 0; b < b0.size(); ++b)
    for (int a = 0; a < a0.size(); ++a) {
      double cc = c[(f1 + a) + (n() + 1) * (f2 + b)];
      g[0] += cc * a1[a] * b0[b];
      g[1] += cc * a0[a] * b1[b];
    }
  return g;
}

Vec2 LogicalDeRham::eval1(const Eigen::VectorXd& c, const Vec2& x) const {
  Eigen::ArrayXd d1, v2a, v1a, d2;
  Vec2 out(0, 0);
  {
    int f1 = v1_.eval_basis(x[0], 0, d1);
    int f2 = v0_.eval_basis(x[1], 0, v2a);
    for (int b = 0; b < v2a.size(); ++b)
      for (int a = 0; a < d1.size(); ++a)
        out[0] += c[(f1 + a) + n() * (f2 + b)] * d1[a] * v2a[b];
  }
  {
    int f1 = v0_.eval_basis(x[0], 0, v1a);
    int f2 = v1_.eval_basis(x[1], 0, d2);
    for (int b = 0; b < d2.size(); ++b)
      for (int a = 0; a < v1a.size(); ++a)
        out[1] += c[block1_offset() + (f1 + a) + (n() + 1) * (f2 + b)] *
                  v1a[a] * d2[b];
  }
  return out;
}

double LogicalDeRham::eval2(const Eigen::VectorXd& c, const Vec2& x) const {
  Eigen::ArrayXd v1a, v2a;
  int f1 = v1_.eval_basis(x[0], 0, v1a);
  int f2 = v1_.eval_basis(x[1], 0, v2a);
  double s = 0.0;
  for (int b = 0; b < v2a.size(); ++b)
    for (int a = 0; a < v1a.size(); ++a)
      s += c[(f1 + a) + n() * (f2 + b)] * v1a[a] * v2a[b];
  return s;
}

namespace {

void check_quad(const LogicalDeRham& spaces, const QuadratureSpec& quad) {
  int p = spaces.v0().degree();
  if (quad.q > 0 && quad.q < (p + 1) / 2 + 1)
    throw QuadratureTooCoarse("quadrature order too low for degree");
}

} // namespace

Eigen::VectorXd project0_logical(const LogicalDeRham& spaces,
                                 const std::function<double(const Vec2&)>& f,
                                 const QuadratureSpec& quad) {
  check_quad(spaces, quad);
  const auto& v0 = spaces.v0();
  const int dim = v0.dimension();
  const int nq = quad.points_for(v0.degree());

  if (spaces.duals().kind() == DualKind::GrevilleInterp) {
    Eigen::VectorXd g = v0.greville_points();
    Eigen::MatrixXd V(dim, dim);
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i) V(i, j) = f(Vec2(g[i], g[j]));
    // solve collocation along each direction
    Eigen::MatrixXd C1(dim, dim);
    for (int j = 0; j < dim; ++j) C1.col(j) = spaces.duals().solve_values(V.col(j));
    Eigen::MatrixXd C(dim, dim);
    for (int i = 0; i < dim; ++i)
      C.row(i) = spaces.duals().solve_values(C1.row(i).transpose()).transpose();
    return Eigen::Map<Eigen::VectorXd>(C.data(), dim * dim);
  }

  // moments B(i1,i2) = int Lambda_(i1,i2) f, assembled cell-wise
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim, dim);
  const GaussRule& rule = gauss_legendre(nq);
  const auto& brk = v0.breakpoints();
  Eigen::ArrayXd va, vb;
  for (size_t c2 = 0; c2 + 1 < brk.size(); ++c2) {
    double mid2 = 0.5 * (brk[c2] + brk[c2 + 1]);
    double half2 = 0.5 * (brk[c2 + 1] - brk[c2]);
    for (int q2 = 0; q2 < nq; ++q2) {
      double x2 = mid2 + half2 * rule.nodes[q2];
      double w2 = half2 * rule.weights[q2];
      int f2 = v0.eval_basis(x2, 0, vb);
      for (size_t c1 = 0; c1 + 1 < brk.size(); ++c1) {
        double mid1 = 0.5 * (brk[c1] + brk[c1 + 1]);
        double half1 = 0.5 * (brk[c1 + 1] - brk[c1]);
        for (int q1 = 0; q1 < nq; ++q1) {
          double x1 = mid1 + half1 * rule.nodes[q1];
          double w = half1 * rule.weights[q1] * w2 * f(Vec2(x1, x2));
          int f1 = v0.eval_basis(x1, 0, va);
          for (int b = 0; b < vb.size(); ++b)
            for (int a = 0; a < va.size(); ++a)
              B(f1 + a, f2 + b) += w * va[a] * vb[b];
        }
      }
    }
  }
  // C = M^{-1} B M^{-T}
  Eigen::MatrixXd C1(dim, dim);
  for (int j = 0; j < dim; ++j) C1.col(j) = spaces.duals().solve_moments(B.col(j));
  Eigen::MatrixXd C(dim, dim);
  for (int i = 0; i < dim; ++i)
    C.row(i) = spaces.duals().solve_moments(C1.row(i).transpose()).transpose();
  return Eigen::Map<Eigen::VectorXd>(C.data(), dim * dim);
}

namespace {

// Directional prefix integral int_0^{x_d} u_d at fixed other coordinate,
// memoized per distinct other-coordinate value.
class DirectionalPrefix {
public:
  DirectionalPrefix(const std::function<Vec2(const Vec2&)>& u, int axis,
                    std::vector<double> breaks, int nq)
      : u_(u), axis_(axis), breaks_(std::move(breaks)), nq_(nq) {}

  double operator()(const Vec2& x) const {
    double other = x[1 - axis_];
    auto it = tables_.find(other);
    if (it == tables_.end()) {
      int axis = axis_;
      auto u = u_;
      std::function<double(double)> g = [u, axis, other](double z) {
        Vec2 p;
        p[axis] = z;
        p[1 - axis] = other;
        return u(p)[axis];
      };
      it = tables_.emplace(other, Prefix1D(std::move(g), breaks_, nq_)).first;
    }
    return it->second.eval(x[axis_]);
  }

private:
  const std::function<Vec2(const Vec2&)>& u_;
  int axis_;
  std::vector<double> breaks_;
  int nq_;
  mutable std::map<double, Prefix1D> tables_;
};

} // namespace

Eigen::VectorXd project1_logical(const LogicalDeRham& spaces,
                                 const std::function<Vec2(const Vec2&)>& u,
                                 const QuadratureSpec& quad) {
  check_quad(spaces, quad);
  const int nq = quad.points_for(spaces.v0().degree());
  const auto& brk = spaces.v0().breakpoints();

  Eigen::VectorXd out(spaces.dim1());
  for (int axis = 0; axis < 2; ++axis) {
    DirectionalPrefix phi(u, axis, brk, nq);
    auto g = [&phi](const Vec2& x) { return phi(x); };
    Eigen::VectorXd c0 = project0_logical(spaces, g, quad);
    Eigen::VectorXd c1 = spaces.dir_grad_matrix(axis) * c0;
    if (axis == 0)
      out.head(spaces.block1_offset()) = c1.head(spaces.block1_offset());
    else
      out.tail(spaces.dim1() - spaces.block1_offset()) =
          c1.tail(spaces.dim1() - spaces.block1_offset());
  }
  return out;
}

Eigen::VectorXd project2_logical(const LogicalDeRham& spaces,
                                 const std::function<double(const Vec2&)>& f,
                                 const QuadratureSpec& quad) {
  check_quad(spaces, quad);
  const int nq = quad.points_for(spaces.v0().degree());
  const auto& brk = spaces.v0().breakpoints();
  BoxIntegral2D psi(f, brk, brk, nq);
  auto g = [&psi](const Vec2& x) { return psi.corner(x[0], x[1]); };
  Eigen::VectorXd c0 = project0_logical(spaces, g, quad);
  return spaces.mixed_matrix() * c0;
}

Eigen::VectorXd grad_logical(const LogicalDeRham& spaces,
                             const Eigen::VectorXd& c0) {
  if (c0.size() != spaces.dim0()) throw DimensionMismatch("grad_logical");
  return spaces.grad_matrix() * c0;
}

Eigen::VectorXd curl_logical(const LogicalDeRham& spaces,
                             const Eigen::VectorXd& c1) {
  if (c1.size() != spaces.dim1()) throw DimensionMismatch("curl_logical");
  return spaces.curl_matrix() * c1;
}

ExtensionResult extension_index_set(const LogicalDeRham& spaces,
                                    const LogicalBox& box) {
  ExtensionResult r;
  if (box.empty()) return r;
  auto [l1, h1] = extend_interval(spaces.v0(), box.lo[0], box.hi[0]);
  auto [l2, h2] = extend_interval(spaces.v0(), box.lo[1], box.hi[1]);
  auto range = [&](double lo, double hi) {
    int a = spaces.n() + 1, b = -1;
    for (int i = 0; i <= spaces.n(); ++i) {
      auto [sa, sb] = spaces.v0().support(i);
      if (sa < hi - 1e-14 && sb > lo + 1e-14) {
        a = std::min(a, i);
        b = std::max(b, i);
      }
    }
    return std::make_pair(a, b);
  };
  r.range1 = range(box.lo[0], box.hi[0]);
  r.range2 = range(box.lo[1], box.hi[1]);
  r.extension.lo = Vec2(l1, l2);
  r.extension.hi = Vec2(h1, h2);
  return r;
}

std::pair<double, double> extend_interval(const UnivariateSplineSpace& space,
                                          double lo, double hi) {
  double a = lo, b = hi;
  for (int i = 0; i <= space.last_index(); ++i) {
    auto [sa, sb] = space.support(i);
    if (sa < hi - 1e-14 && sb > lo + 1e-14) {
      a = std::min(a, sa);
      b = std::max(b, sb);
    }
  }
  return {std::max(0.0, a), std::min(1.0, b)};
}

BoxIntegral2D::BoxIntegral2D(std::function<double(const Vec2&)> f,
                             std::vector<double> breaks1,
                             std::vector<double> breaks2, int quad_points)
    : f_(std::move(f)), breaks1_(std::move(breaks1)),
      breaks2_(std::move(breaks2)), nq_(quad_points) {}

double BoxIntegral2D::inner_eval(double z1, double x2) const {
  auto it = inner_.find(z1);
  if (it == inner_.end()) {
    auto f = f_;
    std::function<double(double)> g = [f, z1](double z2) {
      return f(Vec2(z1, z2));
    };
    it = inner_.emplace(z1, Prefix1D(std::move(g), breaks2_, nq_)).first;
  }
  return it->second.eval(x2);
}

double BoxIntegral2D::corner(double x1, double x2) const {
  if (x1 <= 0.0 || x2 <= 0.0) return 0.0;
  auto key = std::make_pair(x1, x2);
  auto mit = memo_.find(key);
  if (mit != memo_.end()) return mit->second;
  auto it = outer_.find(x2);
  if (it == outer_.end()) {
    const BoxIntegral2D* self = this;
    std::function<double(double)> h = [self, x2](double z1) {
      return self->inner_eval(z1, x2);
    };
    it = outer_.emplace(x2, Prefix1D(std::move(h), breaks1_, nq_)).first;
  }
  double v = it->second.eval(x1);
  memo_.emplace(key, v);
  return v;
}

} // namespace mpfeec
