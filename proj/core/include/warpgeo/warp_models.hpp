#pragma once

#include <cstdint>
#include <vector>

#include "warpgeo/base_manifold.hpp"

namespace warpgeo {

/// The three location-scale models realized as warped Riemannian manifolds
/// M x (0, inf): the univariate normal family on the line, the von
/// Mises-Fisher family on the sphere, and the Riemannian Gaussian family on
/// the hyperbolic plane.
enum class Model { NormalLine, VonMisesFisherS2, RiemannianGaussianH2 };

/// Binds a model to its base manifold and to the metric convention its
/// coefficient functions are written in.
///
/// The Riemannian Gaussian family inherits its normalizer
/// Z(sigma) = 2 pi sqrt(pi) sigma e^{sigma^2/4} erf(sigma/2) from the
/// symmetric-positive-definite matrix literature, where the hyperbolic plane
/// carries twice the half-plane metric (curvature -1/2).  metric_scale
/// records that factor; distances, gradients and norms of the model all use
/// the scaled metric so that the coefficient functions, the densities and the
/// Fisher-information identities agree exactly.
struct ModelSpec {
  Model tag;
  Manifold base;
  int dim;                // dim M
  double metric_scale;    // model metric = metric_scale * intrinsic base metric
  double base_curvature;  // sectional curvature of the scaled base metric

  static ModelSpec of(Model tag);
  static ModelSpec normal_line() { return of(Model::NormalLine); }
  static ModelSpec von_mises_fisher_s2() { return of(Model::VonMisesFisherS2); }
  static ModelSpec riemannian_gaussian_h2() { return of(Model::RiemannianGaussianH2); }
};

const char* name(Model tag);

/// A point z = (location, sigma) of the warped manifold.  sigma > 0.
struct WarpedPoint {
  BasePoint location;
  double sigma;

  WarpedPoint(BasePoint loc, double sig);
};

/// Tangent (v, s) at a warped point: v tangent to the base at the location,
/// s the coefficient of d/dsigma.
struct WarpedTangent {
  BaseTangent location_part;
  double sigma_part;

  static WarpedTangent zero(const WarpedPoint& z) {
    return {BaseTangent::zero(z.location), 0.0};
  }
};

/// Warp coefficients I0, I1 and the sigma-derivatives needed by the
/// curvature equations, all evaluated at one sigma.  I0 > 0 and I1 > 0.
struct WarpCoefficients {
  double i0;
  double i1;
  double di0_dsigma;
  double di1_dsigma;
  double d2i1_dsigma2;
};

/// Gradient of the log-likelihood in (location, sigma): the Riemannian
/// location gradient (with respect to the model metric) and the plain
/// partial derivative in sigma.
struct Score {
  BaseTangent location_grad;
  double sigma_partial;
};

enum class TailClass { Divergent, Convergent, Undetermined };

/// Numerical classification of int_0 sqrt(I0) and int^inf sqrt(I0); the
/// manifold is complete iff both integrals diverge.
struct CompletenessReport {
  TailClass at_zero;
  TailClass at_infinity;
  bool diverges_at_zero() const { return at_zero == TailClass::Divergent; }
  bool diverges_at_infinity() const { return at_infinity == TailClass::Divergent; }
  bool complete() const { return diverges_at_zero() && diverges_at_infinity(); }
};

/// Below this sigma the coefficient functions switch to their small-sigma
/// series to avoid cancellation in sigma^-2 - sinh^-2(sigma) and erf ratios.
inline constexpr double kSeriesSigmaThreshold = 1e-2;

/// Evaluates I0, I1 and derivatives at sigma.  Throws std::domain_error for
/// sigma <= 0 or sigma beyond the overflow guard.
WarpCoefficients warp_coefficients(const ModelSpec& model, double sigma);

/// Signed vertical arc length r(sigma_from -> sigma_to) = int sqrt(I0) dsigma.
double vertical_r(const ModelSpec& model, double sigma_from, double sigma_to);

/// log p(x | location, sigma) with exact normalizing constants.
double log_density(const ModelSpec& model, const BasePoint& x, const WarpedPoint& z);

/// Analytic score; the location gradient vanishes (removable singularity)
/// at x equal to the location.
Score score(const ModelSpec& model, const BasePoint& x, const WarpedPoint& z);

/// n i.i.d. draws from p(. | z), deterministic given the seed.  Samples are
/// generated in fixed-size chunks with SplitMix-derived sub-seeds, so chunked
/// or parallel generation yields identical output.
std::vector<BasePoint> sample(const ModelSpec& model, const WarpedPoint& z,
                              std::size_t n, std::uint64_t seed);

/// Classifies the completeness integrals by fitting asymptotic exponents of
/// sqrt(I0) on log-log grids near 0 and infinity.
CompletenessReport completeness_check(const ModelSpec& model);

// --- model-convention geometry -------------------------------------------
// Thin wrappers applying the model's metric_scale to the intrinsic base
// geometry.  Geodesics and exp/log are unchanged by a constant scale; inner
// products and distances pick up the factor.

double model_dot(const ModelSpec& model, const BasePoint& x, const BaseTangent& u,
                 const BaseTangent& v);
double model_norm(const ModelSpec& model, const BasePoint& x, const BaseTangent& v);
double model_distance(const ModelSpec& model, const BasePoint& x, const BasePoint& y);

}  // namespace warpgeo
