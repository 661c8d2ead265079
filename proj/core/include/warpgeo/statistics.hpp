#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "warpgeo/geodesics.hpp"
#include "warpgeo/warp_models.hpp"

namespace warpgeo {

/// Monte-Carlo estimate of the warp coefficients from squared scores:
/// I0_hat = mean (dl/dsigma)^2, I1_hat = mean |grad_location l|^2 / dim M.
struct FisherEstimate {
  double i0_hat;
  double i1_hat;
  double i0_stderr;
  double i1_stderr;
  std::size_t n;
};

FisherEstimate mc_fisher(const ModelSpec& model, const WarpedPoint& z, std::size_t n,
                         std::uint64_t seed);

/// Weighted Fréchet mean by Riemannian gradient descent
///   z <- warped_exp(z, gamma * sum_i w_i warped_log(z, z_i)),
/// with unit step and halving on objective increase.  Converges when the
/// update norm drops below 1e-9; throws ConvergenceError otherwise.
WarpedPoint frechet_mean(const ModelSpec& model, const std::vector<WarpedPoint>& points,
                         const std::vector<double>& weights = {});

/// Gain schedule gamma_t = a / t for the online estimator.
struct GainSchedule {
  double a = 1.0;
  double gain(std::size_t t) const { return a / static_cast<double>(t); }
};

struct EstimatorState {
  WarpedPoint estimate;
  std::size_t step;
};

struct EstimatorTrajectory {
  std::vector<EstimatorState> states;  // states[0] is the initial point
  bool diverged = false;

  const WarpedPoint& final_estimate() const { return states.back().estimate; }
};

/// Natural-gradient (equivalently, stochastic Riemannian gradient) online
/// estimation: one exponential-map update per stream point, the score
/// preconditioned by the inverse warp coefficients.  Vertical steps are
/// clipped to one unit of vertical distance to guard the early iterations.
EstimatorTrajectory natural_gradient_estimate(const ModelSpec& model,
                                              const std::vector<BasePoint>& stream,
                                              const GainSchedule& gain,
                                              const WarpedPoint& z_init);

}  // namespace warpgeo
