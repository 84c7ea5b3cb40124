// Copyright (c) mpfeec contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mpfeec {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidKnots : public Error {
public:
  using Error::Error;
};

class SingularGram : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class QuadratureTooCoarse : public Error {
public:
  using Error::Error;
};

class DegenerateMapping : public Error {
public:
  using Error::Error;
};

class GeometricNonConformity : public Error {
public:
  using Error::Error;
};

class NonNestedInterface : public Error {
public:
  using Error::Error;
};

class ParametrizationMismatch : public Error {
public:
  using Error::Error;
};

class PatchNotOnEdge : public Error {
public:
  using Error::Error;
};

class InvalidTarget : public Error {
public:
  using Error::Error;
};

class NestednessExpansionFailed : public Error {
public:
  using Error::Error;
};

class RegionOutsideNeighborhood : public Error {
public:
  using Error::Error;
};

class InvalidSequences : public Error {
public:
  using Error::Error;
};

class SurfaceDecompositionFailed : public Error {
public:
  using Error::Error;
};

class WrongSequenceKind : public Error {
public:
  using Error::Error;
};

class SolverFailure : public Error {
public:
  using Error::Error;
};

class ScenarioError : public Error {
public:
  using Error::Error;
};

} // namespace mpfeec
