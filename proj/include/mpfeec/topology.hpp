// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mpfeec/geometry.hpp"
#include "mpfeec/logical.hpp"

namespace mpfeec {

enum class BcMode { Inhomogeneous, Homogeneous };
enum class SequenceKind { GradCurl, CurlDiv };

/// Edge-relative frame of one patch side. The parallel coordinate s is the
/// raw logical coordinate along axis_par; t measures the logical distance
/// from the edge into the patch.
struct SideFrame {
  int patch = -1;
  int axis_par = 0;    // logical axis parallel to the edge
  double perp_edge = 0; // value of xhat[1-axis_par] on the edge (0 or 1)

  int axis_perp() const { return 1 - axis_par; }
  double perp_dir() const { return perp_edge == 0.0 ? 1.0 : -1.0; }
  /// det of the (x_par, x_perp) -> (x_1, x_2) reordering permutation.
  double perm_det() const { return axis_par == 0 ? 1.0 : -1.0; }
  int perp_index(int n) const { return perp_edge == 0.0 ? 0 : n; }

  Vec2 to_logical(double s, double t) const {
    Vec2 x;
    x[axis_par] = s;
    x[axis_perp()] = perp_edge + perp_dir() * t;
    return x;
  }
  std::pair<double, double> from_logical(const Vec2& x) const {
    return {x[axis_par], perp_dir() * (x[axis_perp()] - perp_edge)};
  }
};

struct EdgeRecord {
  int id = -1;
  bool boundary = false;
  bool flip = false; // eta_e(z) = 1 - z
  std::vector<SideFrame> sides;
  int minus = -1, plus = -1; // indices into sides (-1 when absent)
  double h_edge = 0;         // min endpoint support diameter (hat h_e)

  int kminus() const { return minus >= 0 ? sides[minus].patch : -1; }
  int kplus() const { return plus >= 0 ? sides[plus].patch : -1; }
  /// Side owning the trace basis: k^- when present, else k^+.
  int owner_side() const { return minus >= 0 ? minus : plus; }
  int side_of(int patch) const {
    for (size_t s = 0; s < sides.size(); ++s)
      if (sides[s].patch == patch) return int(s);
    return -1;
  }
  bool touches(int patch) const { return side_of(patch) >= 0; }
  /// Maps the parallel coordinate between the two sides.
  double pmap(double s) const { return flip ? 1.0 - s : s; }
};

/// One nested sequence of adjacent patches at a vertex (coarse to fine).
struct VertexSeq {
  std::vector<int> patches;   // size 1 or 2, coarse first
  int central_edge = -1;      // shared edge (or boundary edge for singles)
  int start_edge = -1;        // starting edge on the coarse patch (-1: none)
  bool fine_only = false;     // homogeneous single-patch sequence
};

struct VertexRecord {
  int id = -1;
  Vec2 position{0, 0};
  bool boundary = false;
  std::vector<int> patches;          // K(v)
  std::vector<Eigen::Vector2i> corner; // vhat^k in {0,1}^2, aligned with patches
  std::vector<int> edges;            // E(v)
  std::vector<VertexSeq> seqs;       // 1 or 2 sequences
  int coarse_edge = -1;              // e*(v); -1 in the homogeneous case
  int coarse_patch = -1;             // k*(v)
  double h_vertex = 0;               // hat h_v
  bool seq_valid = false;
  std::vector<std::string> seq_violations;

  int corner_of(int patch) const {
    for (size_t i = 0; i < patches.size(); ++i)
      if (patches[i] == patch) return int(i);
    return -1;
  }
};

struct Patch {
  PatchMapping mapping;
  LogicalDeRham spaces;
  double diameter = 0;
};

class MultipatchComplex {
public:
  std::vector<Patch> patches;
  std::vector<EdgeRecord> edges;
  std::vector<VertexRecord> vertices;
  BcMode bc = BcMode::Inhomogeneous;
  SequenceKind sequence_kind = SequenceKind::GradCurl;

  int num_patches() const { return int(patches.size()); }
  const LogicalDeRham& spaces(int k) const { return patches[k].spaces; }
  const PatchMapping& mapping(int k) const { return patches[k].mapping; }

  // Flat broken DOF layout per form degree.
  int dim(int ell) const;
  int offset(int ell, int k) const;
  int patch_dim(int ell, int k) const;

  /// Edges contiguous to patch k.
  std::vector<int> edges_of_patch(int k) const;
  /// Vertex ids at the endpoints of edge e.
  std::vector<int> vertices_of_edge(int e) const;

  /// JSON dump of the connectivity tables (debugging aid).
  std::string to_json() const;
};

/// Builds edge/vertex records from patch mappings, matching sides by their
/// corner points at absolute tolerance tol. Throws GeometricNonConformity,
/// ParametrizationMismatch or NonNestedInterface on invalid input.
MultipatchComplex build_topology(std::vector<Patch> patches, BcMode bc,
                                 SequenceKind kind = SequenceKind::GradCurl,
                                 double tol = 1e-9);

struct ValidationIssue {
  std::string where;
  std::string message;
};

struct ValidationReport {
  bool valid = true;
  std::vector<ValidationIssue> violations;
  int euler_characteristic = 0;
  // per-edge quasi-uniformity measurements (H ratio, n ratio)
  std::vector<std::array<double, 2>> edge_ratios;
  std::string summary() const;
};

/// Checks the geometric and nestedness assumptions; never throws.
ValidationReport validate_assumptions(const MultipatchComplex& complex);

/// Frame of edge e relative to patch k. Throws PatchNotOnEdge.
SideFrame edge_frame(const MultipatchComplex& complex, int e, int k);

} // namespace mpfeec
