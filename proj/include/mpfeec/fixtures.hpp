// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mpfeec/topology.hpp"

namespace mpfeec {

/// Built-in verification geometries. `refine` applies dyadic refinement to
/// every patch space.
///
///   two_patch           : [0,2]x[0,1], nested 4/8-cell interface
///   two_patch_flipped   : same, second patch mapped with reversed axes
///   square_2x2          : [0,2]^2, coarse pair south, fine pair north
///   lshape              : three unit patches around a reentrant corner
///   annulus_pair        : quarter annulus split at the diagonal
MultipatchComplex make_fixture(const std::string& name, BcMode bc,
                               SequenceKind kind = SequenceKind::GradCurl,
                               int degree = 0, int refine = 0,
                               DualKind duals = DualKind::L2Gram);

std::vector<std::string> fixture_names();

} // namespace mpfeec
