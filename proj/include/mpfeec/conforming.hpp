// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>

#include "mpfeec/broken.hpp"

namespace mpfeec {

/// Entry of the conforming V0_h basis.
struct ConformingBasisEntry {
  enum class Kind { Interior, Edge, Vertex };
  Kind kind = Kind::Interior;
  int id = -1; // patch / edge / vertex id
  int i1 = 0, i2 = 0; // tensor index (Interior) or parallel index (Edge)
};

/// Conforming basis of V0_h, the local broken/conforming projection
/// matrices of the correction calculus, and the conforming projection P.
///
/// All operators act on flattened broken ell=0 coefficient vectors. In the
/// homogeneous mode the basis omits boundary edge/vertex functions, and
/// P^e, P^e_v, P^v vanish on boundary edges/vertices.
class ConformingLayer {
public:
  explicit ConformingLayer(const MultipatchComplex& cx);

  const MultipatchComplex& complex() const { return *cx_; }
  const std::vector<ConformingBasisEntry>& basis() const { return basis_; }
  int dim_conforming() const { return int(basis_.size()); }

  /// Embedding V0_h -> V0_pw (broken coefficients of each basis function).
  const Eigen::SparseMatrix<double>& embedding() const { return embedding_; }

  /// Conforming projection P = sum_k I^k_0 + sum_e P^e_0 + sum_v P^v.
  const Eigen::SparseMatrix<double>& P() const { return P_; }

  // Local projectors (paper-facing building blocks).
  const Eigen::SparseMatrix<double>& Ik0(int k) const { return Ik0_[k]; }
  const Eigen::SparseMatrix<double>& Ie(int e) const { return Ie_[e]; }
  const Eigen::SparseMatrix<double>& Pe(int e) const { return Pe_[e]; }
  const Eigen::SparseMatrix<double>& Ie0(int e) const { return Ie0_[e]; }
  const Eigen::SparseMatrix<double>& Pe0(int e) const { return Pe0_[e]; }
  const Eigen::SparseMatrix<double>& Iv(int v) const { return Iv_[v]; }
  const Eigen::SparseMatrix<double>& Pv(int v) const { return Pv_[v]; }
  const Eigen::SparseMatrix<double>& Ibar_v(int v) const { return Ibv_[v]; }
  const Eigen::SparseMatrix<double>& Iev(int e, int v) const;
  const Eigen::SparseMatrix<double>& Pev(int e, int v) const;
  const Eigen::SparseMatrix<double>& Ibar_ev(int e, int v) const;

  /// Broken coefficients of the edge-continuous function Lambda^e_i
  /// (i = 0..n_e). On homogeneous boundary edges this is the single-patch
  /// trace function.
  Eigen::VectorXd edge_function(int e, int i) const;
  /// Broken coefficients of the vertex-continuous function Lambda^v.
  Eigen::VectorXd vertex_function(int v) const;

  /// Number of trace dofs on edge e (n_e = n of the owner patch).
  int edge_n(int e) const;
  /// Flat broken index of the edge-line dof j on side `side` of e.
  int edge_dof(int e, int side, int j) const;
  /// Flat broken index of the corner dof of patch k at vertex v.
  int corner_dof(int v, int k) const;
  /// Parallel index of v on edge e relative to side `side`.
  int vertex_parallel_index(int e, int side, int v) const;

  BrokenField apply_P(const BrokenField& f0) const;

private:
  const MultipatchComplex* cx_ = nullptr;
  std::vector<ConformingBasisEntry> basis_;
  Eigen::SparseMatrix<double> embedding_, P_;
  std::vector<Eigen::SparseMatrix<double>> Ik0_, Ie_, Pe_, Ie0_, Pe0_;
  std::vector<Eigen::SparseMatrix<double>> Iv_, Pv_, Ibv_;
  std::map<std::pair<int, int>, Eigen::SparseMatrix<double>> Iev_, Pev_, Ibev_;
  std::vector<Eigen::MatrixXd> expansion_; // per edge: coarse -> fine trace

  void build();
};

/// Per-patch logical boxes describing a patch-wise Cartesian region.
using PatchBoxes = std::map<int, LogicalBox>;

/// Support extension within one patch (paper's E_k).
PatchBoxes extend_patch(const MultipatchComplex& cx, int k,
                        const LogicalBox& box);

/// Edge-based extension E_e: patch-wise Cartesian, continuous across e, and
/// containing the edge-function supports meeting the region.
/// Throws RegionOutsideNeighborhood when the region leaves Omega(e).
PatchBoxes extend_edge(const MultipatchComplex& cx, int e,
                       const PatchBoxes& region);

/// Vertex-based extension E_v, continuous across every edge inside
/// Omega(v).
PatchBoxes extend_vertex(const MultipatchComplex& cx, int v,
                         const PatchBoxes& region);

PatchBoxes boxes_union(const PatchBoxes& a, const PatchBoxes& b);
bool boxes_contain(const PatchBoxes& outer, const PatchBoxes& inner);

} // namespace mpfeec
