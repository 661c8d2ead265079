#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>

// Small self-contained numerical kernels shared across the library:
// adaptive Gauss-Kronrod quadrature, bracketed root finding, and an
// embedded Dormand-Prince 5(4) stepper for low-dimensional ODE systems.

namespace warpgeo::num {

/// SplitMix64 mix function, used to derive independent per-chunk RNG seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Adaptive Gauss-Kronrod (G7,K15) quadrature of f over [a, b].
/// Subdivides until the local error estimate meets abs_tol + rel_tol*|I|.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13, double abs_tol = 1e-300);

/// Brent root finder on [a, b]; requires f(a) and f(b) of opposite sign.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double tol = 1e-14, int max_iter = 200);

/// One embedded Dormand-Prince 5(4) step.  Returns the 5th-order solution
/// and a scaled error norm (<= 1 means the step is acceptable).
template <std::size_t N>
struct StepResult {
  std::array<double, N> y;
  double error_norm;
};

template <std::size_t N, typename Rhs>
StepResult<N> dopri5_step(const Rhs& rhs, double t, const std::array<double, N>& y,
                          const std::array<double, N>& f0, double h,
                          double rel_tol, double abs_tol,
                          std::array<double, N>* f_new = nullptr) {
  // Dormand & Prince RK5(4)7M coefficients.
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::array<double, N> k2, k3, k4, k5, k6, k7, yt;

  for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * f0[i];
  k2 = rhs(t + h / 5, yt);
  for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * f0[i] + a32 * k2[i]);
  k3 = rhs(t + 3 * h / 10, yt);
  for (std::size_t i = 0; i < N; ++i)
    yt[i] = y[i] + h * (a41 * f0[i] + a42 * k2[i] + a43 * k3[i]);
  k4 = rhs(t + 4 * h / 5, yt);
  for (std::size_t i = 0; i < N; ++i)
    yt[i] = y[i] + h * (a51 * f0[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  k5 = rhs(t + 8 * h / 9, yt);
  for (std::size_t i = 0; i < N; ++i)
    yt[i] = y[i] + h * (a61 * f0[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  k6 = rhs(t + h, yt);

  StepResult<N> out{};
  for (std::size_t i = 0; i < N; ++i)
    out.y[i] = y[i] + h * (b1 * f0[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  k7 = rhs(t + h, out.y);
  if (f_new) *f_new = k7;  // FSAL

  double err = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double e = h * (e1 * f0[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(out.y[i]));
    double q = e / sc;
    err += q * q;
  }
  out.error_norm = std::sqrt(err / static_cast<double>(N));
  return out;
}

/// Integrate y' = rhs(t, y) from t0 to t1 (t1 may be < t0) with adaptive
/// Dormand-Prince 5(4).  Calls observer(t, y) after every accepted step when
/// provided.  Throws on step-size underflow.
template <std::size_t N, typename Rhs>
std::array<double, N> integrate_ode(const Rhs& rhs, double t0,
                                    std::array<double, N> y, double t1,
                                    double rel_tol = 1e-12, double abs_tol = 1e-14,
                                    const std::function<void(double, const std::array<double, N>&)>& observer = {}) {
  if (t1 == t0) return y;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  double h = dir * std::min(1e-2, std::abs(t1 - t0));
  std::array<double, N> f0 = rhs(t, y);

  auto wrapped = [&](double tt, const std::array<double, N>& yy) { return rhs(tt, yy); };

  int rejected_in_a_row = 0;
  while (dir * (t1 - t) > 0) {
    if (dir * (t + h - t1) > 0) h = t1 - t;
    std::array<double, N> f_new;
    auto step = dopri5_step<N>(wrapped, t, y, f0, h, rel_tol, abs_tol, &f_new);
    if (step.error_norm <= 1.0) {
      t += h;
      y = step.y;
      f0 = f_new;
      if (observer) observer(t, y);
      double grow = 0.9 * std::pow(std::max(step.error_norm, 1e-10), -0.2);
      h *= std::min(5.0, std::max(0.2, grow));
      rejected_in_a_row = 0;
    } else {
      h *= std::max(0.1, 0.9 * std::pow(step.error_norm, -0.2));
      if (++rejected_in_a_row > 60 || std::abs(h) < 1e-15 * (1.0 + std::abs(t)))
        throw std::runtime_error("integrate_ode: step size underflow");
    }
  }
  return y;
}

}  // namespace warpgeo::num
