#include "warpgeo/curvature.hpp"

#include <cmath>

#include "warpgeo/errors.hpp"

namespace warpgeo {

double tangential_from_coefficients(double base_curvature, const WarpCoefficients& c) {
  double dr_i1_over_i1 = c.di1_dsigma / (c.i1 * std::sqrt(c.i0));
  return base_curvature / c.i1 - 0.25 * dr_i1_over_i1 * dr_i1_over_i1;
}

double mixed_from_coefficients(const WarpCoefficients& c) {
  // d/dr sqrt(I1) = g(sigma) / sqrt(I0) with g = I1' / (2 sqrt(I1 I0)) full form:
  //   g(sigma)  = I1' / (2 sqrt(I1 I0))
  //   g'(sigma) = I1'' / (2 sqrt(I1 I0)) - I1' (I1' I0 + I1 I0') / (4 (I1 I0)^{3/2})
  // and K = - g' / (sqrt(I0) sqrt(I1)).
  double prod = c.i1 * c.i0;
  double root = std::sqrt(prod);
  double gp = c.d2i1_dsigma2 / (2.0 * root) -
              c.di1_dsigma * (c.di1_dsigma * c.i0 + c.i1 * c.di0_dsigma) /
                  (4.0 * prod * root);
  return -gp / (std::sqrt(c.i0) * std::sqrt(c.i1));
}

double shape_coefficient_from(const WarpCoefficients& c) {
  return 0.5 * c.di1_dsigma / (c.i1 * std::sqrt(c.i0));
}

double extrinsic_distance(const ModelSpec& model, const BasePoint& x, const BasePoint& y,
                          double sigma) {
  WarpCoefficients c = warp_coefficients(model, sigma);
  return std::sqrt(c.i1) * model_distance(model, x, y);
}

double sectional_tangential(const ModelSpec& model, double sigma) {
  if (model.dim < 2)
    throw UnsupportedOperation(
        "sectional_tangential: the Gauss equation carries no information for a "
        "one-dimensional base manifold");
  return tangential_from_coefficients(model.base_curvature,
                                      warp_coefficients(model, sigma));
}

double sectional_mixed(const ModelSpec& model, double sigma) {
  return mixed_from_coefficients(warp_coefficients(model, sigma));
}

std::vector<CurvatureReport> curvature_scan(const ModelSpec& model,
                                            const std::vector<double>& sigma_grid) {
  std::vector<CurvatureReport> out;
  out.reserve(sigma_grid.size());
  for (double s : sigma_grid) {
    WarpCoefficients c = warp_coefficients(model, s);
    CurvatureReport rep{};
    rep.sigma = s;
    rep.mixed = mixed_from_coefficients(c);
    rep.shape_coefficient = shape_coefficient_from(c);
    if (model.dim >= 2)
      rep.tangential = tangential_from_coefficients(model.base_curvature, c);
    rep.nonnegative_found = rep.mixed >= 0.0 || (rep.tangential && *rep.tangential >= 0.0);
    out.push_back(rep);
  }
  return out;
}

}  // namespace warpgeo
