// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpfeec/broken.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "mpfeec/errors.hpp"
#include "mpfeec/geometry.hpp"

namespace mpfeec {

BrokenField BrokenField::zero(const MultipatchComplex& cx, int ell) {
  BrokenField f;
  f.ell = ell;
  for (int k = 0; k < cx.num_patches(); ++k)
    f.coeffs.push_back(Eigen::VectorXd::Zero(cx.patch_dim(ell, k)));
  return f;
}

Eigen::VectorXd flatten(const MultipatchComplex& cx, const BrokenField& f) {
  Eigen::VectorXd out(cx.dim(f.ell));
  for (int k = 0; k < cx.num_patches(); ++k)
    out.segment(cx.offset(f.ell, k), cx.patch_dim(f.ell, k)) = f.coeffs[k];
  return out;
}

BrokenField unflatten(const MultipatchComplex& cx, int ell,
                      const Eigen::VectorXd& v) {
  if (v.size() != cx.dim(ell)) throw DimensionMismatch("unflatten");
  BrokenField f;
  f.ell = ell;
  for (int k = 0; k < cx.num_patches(); ++k)
    f.coeffs.push_back(v.segment(cx.offset(ell, k), cx.patch_dim(ell, k)));
  return f;
}

double eval_scalar(const MultipatchComplex& cx, const BrokenField& f, int k,
                   const Vec2& xhat) {
  const auto& sp = cx.spaces(k);
  if (f.ell == 0) return sp.eval0(f.coeffs[k], xhat);
  if (f.ell == 2)
    return push2_value(cx.mapping(k), xhat, sp.eval2(f.coeffs[k], xhat));
  throw DimensionMismatch("eval_scalar on vector field");
}

Vec2 eval_vector(const MultipatchComplex& cx, const BrokenField& f, int k,
                 const Vec2& xhat) {
  if (f.ell != 1) throw DimensionMismatch("eval_vector on scalar field");
  const auto& sp = cx.spaces(k);
  Vec2 uhat = sp.eval1(f.coeffs[k], xhat);
  Vec2 u = push1_value(cx.mapping(k), xhat, uhat);
  // CurlDiv fields are stored as grad-curl coefficients of R^{-1} w,
  // so the physical value is recovered by applying R.
  if (cx.sequence_kind == SequenceKind::CurlDiv) return Vec2(u[1], -u[0]);
  return u;
}

ScalarOnPatches as_scalar_evaluator(const MultipatchComplex& cx,
                                    const BrokenField& f) {
  return [&cx, f](int k, const Vec2& xhat) {
    return eval_scalar(cx, f, k, xhat);
  };
}

VectorOnPatches as_vector_evaluator(const MultipatchComplex& cx,
                                    const BrokenField& f) {
  return [&cx, f](int k, const Vec2& xhat) {
    return eval_vector(cx, f, k, xhat);
  };
}

BrokenField project_pw(const MultipatchComplex& cx, int ell,
                       const ScalarOnPatches& f, const QuadratureSpec& quad) {
  BrokenField out;
  out.ell = ell;
  for (int k = 0; k < cx.num_patches(); ++k) {
    const auto& m = cx.mapping(k);
    if (ell == 0) {
      auto fhat = [&f, k](const Vec2& xh) { return f(k, xh); };
      out.coeffs.push_back(project0_logical(cx.spaces(k), fhat, quad));
    } else if (ell == 2) {
      auto fhat = [&f, &m, k](const Vec2& xh) {
        return m.jacobian_det(xh) * f(k, xh);
      };
      out.coeffs.push_back(project2_logical(cx.spaces(k), fhat, quad));
    } else {
      throw DimensionMismatch("scalar project_pw needs ell in {0,2}");
    }
  }
  return out;
}

BrokenField project_pw(const MultipatchComplex& cx, const VectorOnPatches& u,
                       const QuadratureSpec& quad) {
  BrokenField out;
  out.ell = 1;
  const bool star = cx.sequence_kind == SequenceKind::CurlDiv;
  for (int k = 0; k < cx.num_patches(); ++k) {
    const auto& m = cx.mapping(k);
    auto uhat = [&u, &m, k, star](const Vec2& xh) -> Vec2 {
      Vec2 w = u(k, xh);
      if (star) w = Vec2(-w[1], w[0]); // R^{-1} w
      return m.DF(xh).transpose() * w;
    };
    out.coeffs.push_back(project1_logical(cx.spaces(k), uhat, quad));
  }
  return out;
}

BrokenField grad_pw(const MultipatchComplex& cx, const BrokenField& f0) {
  if (f0.ell != 0) throw DimensionMismatch("grad_pw needs ell=0");
  BrokenField out;
  out.ell = 1;
  for (int k = 0; k < cx.num_patches(); ++k)
    out.coeffs.push_back(grad_logical(cx.spaces(k), f0.coeffs[k]));
  return out;
}

BrokenField curl_pw(const MultipatchComplex& cx, const BrokenField& f1) {
  if (f1.ell != 1) throw DimensionMismatch("curl_pw needs ell=1");
  BrokenField out;
  out.ell = 2;
  for (int k = 0; k < cx.num_patches(); ++k)
    out.coeffs.push_back(curl_logical(cx.spaces(k), f1.coeffs[k]));
  return out;
}

namespace {

void append_block(std::vector<Eigen::Triplet<double>>& trips,
                  const Eigen::SparseMatrix<double>& blk, int row0, int col0,
                  double scale = 1.0) {
  for (int k = 0; k < blk.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(blk, k); it; ++it)
      trips.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
}

} // namespace

Eigen::SparseMatrix<double> grad_pw_matrix(const MultipatchComplex& cx) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < cx.num_patches(); ++k)
    append_block(trips, cx.spaces(k).grad_matrix(), cx.offset(1, k),
                 cx.offset(0, k));
  Eigen::SparseMatrix<double> out(cx.dim(1), cx.dim(0));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Eigen::SparseMatrix<double> curl_pw_matrix(const MultipatchComplex& cx) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < cx.num_patches(); ++k)
    append_block(trips, cx.spaces(k).curl_matrix(), cx.offset(2, k),
                 cx.offset(1, k));
  Eigen::SparseMatrix<double> out(cx.dim(2), cx.dim(1));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Eigen::SparseMatrix<double> dir_grad_edge_matrix(const MultipatchComplex& cx,
                                                 int e, EdgeDir d) {
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& side : cx.edges[e].sides) {
    int k = side.patch;
    int axis = d == EdgeDir::Parallel ? side.axis_par : side.axis_perp();
    append_block(trips, cx.spaces(k).dir_grad_matrix(axis), cx.offset(1, k),
                 cx.offset(0, k));
  }
  Eigen::SparseMatrix<double> out(cx.dim(1), cx.dim(0));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

BrokenField dir_grad_edge(const MultipatchComplex& cx, int e, EdgeDir d,
                          const BrokenField& f0) {
  auto M = dir_grad_edge_matrix(cx, e, d);
  return unflatten(cx, 1, M * flatten(cx, f0));
}

Eigen::SparseMatrix<double> mixed_deriv_edge_matrix(
    const MultipatchComplex& cx, int e) {
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& side : cx.edges[e].sides) {
    int k = side.patch;
    append_block(trips, cx.spaces(k).mixed_matrix(), cx.offset(2, k),
                 cx.offset(0, k), side.perm_det());
  }
  Eigen::SparseMatrix<double> out(cx.dim(2), cx.dim(0));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

BrokenField mixed_deriv_edge(const MultipatchComplex& cx, int e,
                             const BrokenField& f0) {
  auto M = mixed_deriv_edge_matrix(cx, e);
  return unflatten(cx, 2, M * flatten(cx, f0));
}

namespace {

double cheb(int j, int m) { return 0.5 * (1.0 - std::cos(M_PI * (j + 0.5) / m)); }

} // namespace

JumpResult tangential_jump(const MultipatchComplex& cx, int e,
                           const BrokenField& f1, int samples) {
  const auto& er = cx.edges[e];
  JumpResult r;
  // In the rotated sequence the conformity condition is on normal traces of
  // the physical field, which equal the tangential traces of R^{-1} w: both
  // are the parallel component of the stored grad-curl logical pullback.
  auto par_component = [&](const SideFrame& f, double s) {
    Vec2 xh = f.to_logical(s, 0.0);
    Vec2 uhat = cx.spaces(f.patch).eval1(f1.coeffs[f.patch], xh);
    return uhat[f.axis_par];
  };
  if (er.boundary) {
    const auto& f = er.sides[0];
    for (int j = 0; j < samples; ++j) {
      double v = par_component(f, cheb(j, samples));
      r.max_jump = std::max(r.max_jump, std::abs(v));
      r.scale = std::max(r.scale, std::abs(v));
    }
    return r;
  }
  const auto& fm = er.sides[er.minus];
  const auto& fp = er.sides[er.plus];
  double sgn = er.flip ? -1.0 : 1.0;
  for (int j = 0; j < samples; ++j) {
    double z = cheb(j, samples);
    double a = par_component(fm, z);
    double b = sgn * par_component(fp, er.pmap(z));
    r.max_jump = std::max(r.max_jump, std::abs(a - b));
    r.scale = std::max({r.scale, std::abs(a), std::abs(b)});
  }
  return r;
}

JumpResult value_jump(const MultipatchComplex& cx, int e,
                      const BrokenField& f0, int samples) {
  const auto& er = cx.edges[e];
  JumpResult r;
  auto trace = [&](const SideFrame& f, double s) {
    return cx.spaces(f.patch).eval0(f0.coeffs[f.patch], f.to_logical(s, 0.0));
  };
  if (er.boundary) {
    const auto& f = er.sides[0];
    for (int j = 0; j < samples; ++j) {
      double v = trace(f, cheb(j, samples));
      r.max_jump = std::max(r.max_jump, std::abs(v));
      r.scale = std::max(r.scale, std::abs(v));
    }
    return r;
  }
  const auto& fm = er.sides[er.minus];
  const auto& fp = er.sides[er.plus];
  for (int j = 0; j < samples; ++j) {
    double z = cheb(j, samples);
    double a = trace(fm, z);
    double b = trace(fp, er.pmap(z));
    r.max_jump = std::max(r.max_jump, std::abs(a - b));
    r.scale = std::max({r.scale, std::abs(a), std::abs(b)});
  }
  return r;
}

double lp_norm(const MultipatchComplex& cx, int ell, const ScalarOnPatches& f,
               double p, const QuadratureSpec& quad) {
  (void)ell;
  const bool inf = std::isinf(p);
  double acc = 0.0;
  for (int k = 0; k < cx.num_patches(); ++k) {
    auto absval = [&f, k](const Vec2& xh) { return std::abs(f(k, xh)); };
    double nk = lp_norm_patch(cx.mapping(k), cx.spaces(k).v0().breakpoints(),
                              cx.spaces(k).v0().breakpoints(), absval, p, quad,
                              cx.spaces(k).v0().degree());
    acc = inf ? std::max(acc, nk) : acc + std::pow(nk, p);
  }
  return inf ? acc : std::pow(acc, 1.0 / p);
}

double lp_norm(const MultipatchComplex& cx, const VectorOnPatches& u, double p,
               const QuadratureSpec& quad) {
  const bool inf = std::isinf(p);
  double acc = 0.0;
  for (int k = 0; k < cx.num_patches(); ++k) {
    auto absval = [&u, k](const Vec2& xh) { return u(k, xh).norm(); };
    double nk = lp_norm_patch(cx.mapping(k), cx.spaces(k).v0().breakpoints(),
                              cx.spaces(k).v0().breakpoints(), absval, p, quad,
                              cx.spaces(k).v0().degree());
    acc = inf ? std::max(acc, nk) : acc + std::pow(nk, p);
  }
  return inf ? acc : std::pow(acc, 1.0 / p);
}

double lp_norm(const MultipatchComplex& cx, const BrokenField& f, double p,
               const QuadratureSpec& quad) {
  if (f.ell == 1) return lp_norm(cx, as_vector_evaluator(cx, f), p, quad);
  return lp_norm(cx, f.ell, as_scalar_evaluator(cx, f), p, quad);
}

void save_broken_field(const MultipatchComplex& cx, const BrokenField& f,
                       const std::string& header_path,
                       const std::string& payload_path) {
  nlohmann::json hdr;
  hdr["ell"] = f.ell;
  hdr["patches"] = cx.num_patches();
  std::vector<int> dims;
  for (const auto& c : f.coeffs) dims.push_back(int(c.size()));
  hdr["dims"] = dims;
  hdr["payload"] = payload_path;
  std::ofstream hs(header_path);
  hs << hdr.dump(2) << "\n";
  std::ofstream ps(payload_path, std::ios::binary);
  for (const auto& c : f.coeffs)
    ps.write(reinterpret_cast<const char*>(c.data()),
             std::streamsize(sizeof(double) * c.size()));
}

BrokenField load_broken_field(const MultipatchComplex& cx,
                              const std::string& header_path,
                              const std::string& payload_path) {
  std::ifstream hs(header_path);
  if (!hs) throw ScenarioError("cannot open " + header_path);
  nlohmann::json hdr;
  hs >> hdr;
  BrokenField f;
  f.ell = hdr.at("ell").get<int>();
  std::vector<int> dims = hdr.at("dims").get<std::vector<int>>();
  if (int(dims.size()) != cx.num_patches())
    throw DimensionMismatch("field header does not match complex");
  std::ifstream ps(payload_path, std::ios::binary);
  if (!ps) throw ScenarioError("cannot open " + payload_path);
  for (int k = 0; k < cx.num_patches(); ++k) {
    if (dims[k] != cx.patch_dim(f.ell, k))
      throw DimensionMismatch("field block does not match complex");
    Eigen::VectorXd c(dims[k]);
    ps.read(reinterpret_cast<char*>(c.data()),
            std::streamsize(sizeof(double) * c.size()));
    f.coeffs.push_back(std::move(c));
  }
  return f;
}

} // namespace mpfeec
