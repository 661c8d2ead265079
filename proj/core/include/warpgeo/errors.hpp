#pragma once

#include <stdexcept>
#include <string>

namespace warpgeo {

/// Thrown when the logarithm map is requested at (or within tolerance of)
/// the cut locus, e.g. antipodal points on the sphere.
class CutLocusError : public std::domain_error {
public:
  explicit CutLocusError(const std::string& what) : std::domain_error(what) {}
};

/// Thrown when a geodesic of an incomplete model reaches the boundary
/// sigma = 0 in finite affine time and evaluation past that time is requested.
class BoundaryEscapeError : public std::runtime_error {
public:
  BoundaryEscapeError(const std::string& what, double escape_time)
      : std::runtime_error(what), escape_time_(escape_time) {}
  double escape_time() const { return escape_time_; }

private:
  double escape_time_;
};

/// Thrown by iterative solvers (shooting, Fréchet descent) that fail to meet
/// their tolerance within the iteration budget.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

/// Thrown for operations that are undefined for a model, e.g. the tangential
/// sectional curvature when the base manifold is one-dimensional.
class UnsupportedOperation : public std::logic_error {
public:
  explicit UnsupportedOperation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace warpgeo
