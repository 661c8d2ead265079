#pragma once

#include <array>
#include <vector>

namespace warpgeo {

/// The three base manifolds: the real line, the unit sphere in ambient
/// coordinates, and the hyperbolic plane in the upper half-plane chart.
enum class Manifold { RealLine, Sphere2, Hyperbolic2 };

int dimension(Manifold kind);

/// Constant sectional curvature of the intrinsic metric: 0, +1, -1.
/// (Meaningless but conventionally 0 for the one-dimensional RealLine.)
double constant_curvature(Manifold kind);

const char* name(Manifold kind);

/// A point on a base manifold.  Coordinates:
///   RealLine:    c[0]
///   Sphere2:     (c[0], c[1], c[2]), unit vector in R^3
///   Hyperbolic2: (c[0], c[1]) = (u, w), w > 0
/// Construction validates the on-manifold invariant to 1e-12.
struct BasePoint {
  Manifold kind;
  std::array<double, 3> c{};

  static BasePoint line(double x);
  static BasePoint sphere(double x, double y, double z);
  static BasePoint half_plane(double u, double w);
};

/// A tangent vector attached at a base point, stored in the same chart or
/// ambient coordinates as the point.  Sphere tangents must satisfy
/// <x, v> = 0 to 1e-12; construction projects sub-tolerance drift away.
struct BaseTangent {
  BasePoint at;
  std::array<double, 3> c{};

  static BaseTangent zero(const BasePoint& x);
  static BaseTangent make(const BasePoint& x, std::array<double, 3> components);
};

/// One basis element of the isometry Lie algebra of a base manifold.
/// RealLine has the translation generator (index 0).  Sphere2 has the three
/// rotations about e1, e2, e3.  Hyperbolic2 has the Moebius algebra basis:
/// translation z -> z + t, dilation z -> e^t z, and z -> z / (1 - t z).
struct IsometryGenerator {
  Manifold kind;
  int index;
};

std::vector<IsometryGenerator> isometry_generators(Manifold kind);

struct FlowState {
  BasePoint point;
  BaseTangent velocity;
};

/// Riemannian inner product of two tangents attached at x.
double metric_dot(const BasePoint& x, const BaseTangent& u, const BaseTangent& v);

double metric_norm(const BasePoint& x, const BaseTangent& v);

/// Intrinsic Riemannian distance between points of the same kind.
double base_distance(const BasePoint& x, const BasePoint& y);

/// Unit-time geodesic endpoint Exp_x(v).
BasePoint base_exp(const BasePoint& x, const BaseTangent& v);

/// Geodesic through x with initial velocity v, evaluated at parameter t
/// together with its velocity there.  base_exp(x, v) == geodesic_flow(x, v, 1).
FlowState base_geodesic_flow(const BasePoint& x, const BaseTangent& v, double t);

/// Inverse of base_exp.  Throws CutLocusError for antipodal sphere inputs.
BaseTangent base_log(const BasePoint& x, const BasePoint& y);

/// Value at x of the Killing field induced by generator xi.
BaseTangent killing_field(const IsometryGenerator& xi, const BasePoint& x);

/// Exact flow of the one-parameter isometry group generated by xi.
BasePoint isometry_flow(const IsometryGenerator& xi, double t, const BasePoint& x);

/// Pushforward of a tangent vector along the same flow.
BaseTangent isometry_flow(const IsometryGenerator& xi, double t, const BaseTangent& v);

/// Orthonormal tangent frame at x (one vector for RealLine, two otherwise).
std::vector<BaseTangent> tangent_frame(const BasePoint& x);

}  // namespace warpgeo
