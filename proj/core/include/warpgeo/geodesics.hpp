#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "warpgeo/warp_models.hpp"

namespace warpgeo {

/// The effective one-dimensional potential V(sigma) governing the vertical
/// motion of a geodesic: V(sigma) = J0 I1(sigma0) / I1(sigma), with the
/// motion confined to { sigma : V(sigma) <= E }.
struct PotentialProfile {
  std::function<double(double)> V;
  double energy;
};

/// Kinetic energy E = I0(sigma) sdot^2 + I1(sigma) |xdot|^2 of a warped
/// tangent; conserved along geodesics.  Zero iff the tangent is zero.
double energy(const ModelSpec& model, const WarpedPoint& z, const WarpedTangent& zdot);

/// Killing moment J(xi) = I1(sigma) < xdot, X_xi >; conserved along geodesics.
double moment(const ModelSpec& model, const WarpedPoint& z, const WarpedTangent& zdot,
              const IsometryGenerator& xi);

/// An affinely parameterized geodesic of the warped metric, built from the
/// conservation laws: the location runs along a fixed base geodesic at speed
/// I1(sigma(0)) / I1(sigma(t)) while sigma performs one-dimensional motion in
/// the potential V.  Immutable and safe to share.
class GeodesicPath {
public:
  GeodesicPath(const ModelSpec& model, const WarpedPoint& z0, const WarpedTangent& zdot0);

  double energy() const { return energy_; }
  double base_moment_magnitude() const { return j0_; }
  const std::vector<double>& turning_points() const { return turning_points_; }

  /// Affine time at which the path reaches sigma = 0, when the model is
  /// incomplete at 0 and the motion is purely vertical downward.
  std::optional<double> escape_time() const { return escape_time_; }

  PotentialProfile potential() const;

  /// State at affine time t (negative t runs the geodesic backwards).
  /// Throws BoundaryEscapeError past a finite escape time.
  std::pair<WarpedPoint, WarpedTangent> evaluate(double t) const;

  /// States at a non-decreasing sequence of times, sharing one integration
  /// sweep.  Equivalent to calling evaluate on each element.
  std::vector<std::pair<WarpedPoint, WarpedTangent>> sample(const std::vector<double>& times) const;

  const ModelSpec& model() const { return model_; }
  const WarpedPoint& start() const { return z0_; }
  const WarpedTangent& initial_velocity() const { return zdot0_; }

private:
  ModelSpec model_;
  WarpedPoint z0_;
  WarpedTangent zdot0_;
  double energy_;
  double j0_;
  double i1_at_start_;
  std::vector<double> turning_points_;
  std::optional<double> escape_time_;
};

/// Exact geodesic through z0 with initial velocity zdot0.
GeodesicPath geodesic_closed_form(const ModelSpec& model, const WarpedPoint& z0,
                                  const WarpedTangent& zdot0);

/// Independent verification path: integrates the Euler-Lagrange equations of
/// I0 sdot^2 + I1 |xdot|^2 in chart coordinates with adaptive Dormand-Prince
/// stepping, never using the conservation-law solution.
std::pair<WarpedPoint, WarpedTangent> geodesic_ode_oracle(const ModelSpec& model,
                                                          const WarpedPoint& z0,
                                                          const WarpedTangent& zdot0,
                                                          double t,
                                                          double rel_tol = 1e-14,
                                                          double abs_tol = 1e-16);

/// Riemannian exponential map of the warped metric (unit-time geodesic).
WarpedPoint warped_exp(const ModelSpec& model, const WarpedPoint& z, const WarpedTangent& w);

/// Inverse of warped_exp, solved by one-parameter shooting over the split
/// between vertical and base initial speed; the base direction is fixed by
/// the base logarithm.  Throws ConvergenceError with the endpoint residual on
/// failure.
WarpedTangent warped_log(const ModelSpec& model, const WarpedPoint& z1, const WarpedPoint& z2);

/// Rao distance: length of the connecting geodesic.
double rao_distance(const ModelSpec& model, const WarpedPoint& z1, const WarpedPoint& z2);

}  // namespace warpgeo
