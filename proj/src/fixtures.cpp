// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#include "mpfeec/fixtures.hpp"

#include <cmath>

#include "mpfeec/errors.hpp"

namespace mpfeec {

namespace {

Patch make_patch(PatchMapping m, int degree, int cells, int refine,
                 DualKind duals) {
  Patch p;
  p.mapping = std::move(m);
  p.spaces = LogicalDeRham(refine_dyadic(make_uniform_space(degree, cells), refine),
                           duals);
  return p;
}

PatchMapping unit_square_at(double x0, double y0) {
  return affine_mapping(Mat2::Identity(), Vec2(x0, y0));
}

} // namespace

std::vector<std::string> fixture_names() {
  return {"two_patch", "two_patch_flipped", "square_2x2", "lshape",
          "annulus_pair"};
}

MultipatchComplex make_fixture(const std::string& name, BcMode bc,
                               SequenceKind kind, int degree, int refine,
                               DualKind duals) {
  std::vector<Patch> patches;
  if (name == "two_patch" || name == "two_patch_flipped") {
    int p = degree > 0 ? degree : 3;
    patches.push_back(make_patch(unit_square_at(0, 0), p, 4, refine, duals));
    if (name == "two_patch") {
      patches.push_back(make_patch(unit_square_at(1, 0), p, 8, refine, duals));
    } else {
      Mat2 A;
      A << -1, 0, 0, -1;
      patches.push_back(
          make_patch(affine_mapping(A, Vec2(2, 1)), p, 8, refine, duals));
    }
  } else if (name == "square_2x2") {
    int p = degree > 0 ? degree : 2;
    patches.push_back(make_patch(unit_square_at(0, 0), p, 4, refine, duals));
    patches.push_back(make_patch(unit_square_at(1, 0), p, 4, refine, duals));
    patches.push_back(make_patch(unit_square_at(0, 1), p, 8, refine, duals));
    patches.push_back(make_patch(unit_square_at(1, 1), p, 8, refine, duals));
  } else if (name == "lshape") {
    int p = degree > 0 ? degree : 2;
    patches.push_back(make_patch(unit_square_at(0, 0), p, 4, refine, duals));
    patches.push_back(make_patch(unit_square_at(1, 0), p, 4, refine, duals));
    patches.push_back(make_patch(unit_square_at(0, 1), p, 4, refine, duals));
  } else if (name == "annulus_pair") {
    int p = degree > 0 ? degree : 2;
    patches.push_back(make_patch(annulus_sector_mapping(1.0, 2.0, 0.0, M_PI / 4),
                                 p, 4, refine, duals));
    patches.push_back(
        make_patch(annulus_sector_mapping(1.0, 2.0, M_PI / 4, M_PI / 2), p, 8,
                   refine, duals));
  } else {
    throw ScenarioError("unknown fixture: " + name);
  }
  return build_topology(std::move(patches), bc, kind);
}

} // namespace mpfeec
