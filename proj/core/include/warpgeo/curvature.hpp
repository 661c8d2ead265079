#pragma once

#include <optional>
#include <vector>

#include "warpgeo/warp_models.hpp"

namespace warpgeo {

/// Curvature data of the warped manifold at one sigma.  tangential is absent
/// when the base manifold is one-dimensional (the Gauss equation carries no
/// information there).
struct CurvatureReport {
  double sigma;
  std::optional<double> tangential;  // K(u, v), u and v tangent to the base
  double mixed;                      // K(u, d/dr)
  double shape_coefficient;          // (1/2) dI1/dr / I1, the second fundamental form
  bool nonnegative_found;
};

// Coefficient-level curvature formulas.  All d/dr derivatives are expanded
// in sigma via d/dr = I0^{-1/2} d/dsigma.

/// Gauss equation: K(u,v) = K_M / I1 - (1/4) (dI1/dr / I1)^2.
double tangential_from_coefficients(double base_curvature, const WarpCoefficients& c);

/// Mixed equation: K(u, d/dr) = - (d^2/dr^2 sqrt(I1)) / sqrt(I1).
double mixed_from_coefficients(const WarpCoefficients& c);

double shape_coefficient_from(const WarpCoefficients& c);

/// Extrinsic (generalized Mahalanobis) distance sqrt(I1(sigma)) d(x, y) of
/// the slice M x {sigma}.
double extrinsic_distance(const ModelSpec& model, const BasePoint& x, const BasePoint& y,
                          double sigma);

/// Sectional curvature of a plane tangent to the base slice.  Throws
/// UnsupportedOperation when dim M = 1.
double sectional_tangential(const ModelSpec& model, double sigma);

/// Sectional curvature of a plane spanned by a base direction and the
/// vertical direction.
double sectional_mixed(const ModelSpec& model, double sigma);

std::vector<CurvatureReport> curvature_scan(const ModelSpec& model,
                                            const std::vector<double>& sigma_grid);

}  // namespace warpgeo
