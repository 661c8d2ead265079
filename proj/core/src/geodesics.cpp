#include "warpgeo/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "warpgeo/errors.hpp"
#include "warpgeo/numerics.hpp"

namespace warpgeo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_attached_warped(const WarpedPoint& z, const WarpedTangent& zdot, const char* where) {
  if (z.location.kind != zdot.location_part.at.kind)
    throw std::invalid_argument(std::string(where) + ": manifold kind mismatch");
  for (int i = 0; i < 3; ++i)
    if (std::abs(z.location.c[i] - zdot.location_part.at.c[i]) > 1e-12)
      throw std::invalid_argument(std::string(where) + ": tangent not attached at the point");
}

// ---------------------------------------------------------------------------
// Reduced vertical motion.
//
// Along a geodesic, sigma performs one-dimensional motion with
//   I0(sigma) sdot^2 = E - V(sigma),   V(sigma) = J0 I1(sigma0) / I1(sigma),
// while the base component runs along a fixed base geodesic, rescaled by
//   tau(t) = int_0^t I1(sigma0) / I1(sigma(s)) ds.
//
// Away from turning points the first-order form dsigma/dt = sign sqrt((E-V)/I0)
// is integrated with adaptive Dormand-Prince steps and the sign held fixed.
// Inside a window around a turning point sigma* the square-root singularity
// is removed by substituting sigma = sigma* -+ xi^2, after which elapsed time
// and tau are smooth integrals in xi evaluated by quadrature; stepping across
// the window flips the sign without losing accuracy.

class SigmaMotion {
public:
  SigmaMotion(const ModelSpec& model, double sigma0, double sdot0, double energy, double j0,
              double i1_start, const std::vector<double>& turning_points,
              std::optional<double> escape_time)
      : model_(model),
        energy_(energy),
        j0_(j0),
        i1_start_(i1_start),
        turnings_(turning_points),
        escape_time_(escape_time),
        t_(0.0),
        sigma_(sigma0),
        tau_(0.0) {
    if (energy_ <= 0.0) {
      sign_ = 0;
    } else if (sdot0 > 0.0) {
      sign_ = 1;
    } else if (sdot0 < 0.0) {
      sign_ = -1;
    } else if (j0_ > 0.0) {
      double vp = potential_derivative(sigma_);
      sign_ = vp > 0.0 ? -1 : vp < 0.0 ? 1 : 0;
    } else {
      sign_ = 0;
    }
  }

  enum class TauResult { Hit, TimeCap, FloorAbort, CeilAbort };

  double t() const { return t_; }
  double sigma() const { return sigma_; }
  double tau() const { return tau_; }

  double sigma_dot() const {
    if (sign_ == 0) return 0.0;
    double h = energy_ - potential(sigma_);
    double i0 = warp_coefficients(model_, sigma_).i0;
    return sign_ * std::sqrt(std::max(0.0, h) / i0);
  }

  double potential(double s) const {
    if (j0_ == 0.0) return 0.0;
    return j0_ * i1_start_ / warp_coefficients(model_, s).i1;
  }

  void advance_to_time(double t_target) {
    while (t_ < t_target - 1e-300) {
      if (!step_dispatch(t_target, nullptr)) break;
    }
  }

  /// Advances until tau first reaches tau_target.  Requires j0 > 0 so tau is
  /// strictly increasing.  Once sigma heads monotonically for a boundary (no
  /// turning point ahead), the total tau still obtainable is a convergent
  /// integral; if it cannot reach the target the outcome is decided and the
  /// integration stops early.
  TauResult advance_to_tau(double tau_target, double t_cap) {
    int checked_sign = 0;
    while (tau_ < tau_target) {
      if (t_ >= t_cap - 1e-300) return TauResult::TimeCap;
      if (sign_ != 0 && j0_ > 0.0 && sign_ != checked_sign && !turning_beyond()) {
        checked_sign = sign_;
        double rem = remaining_tau_on_monotone_phase();
        if (tau_ + rem * 1.0000001 + 1e-12 < tau_target)
          return sign_ < 0 ? TauResult::FloorAbort : TauResult::CeilAbort;
      }
      if (!step_dispatch(t_cap, &tau_target)) break;
    }
    return tau_ >= tau_target ? TauResult::Hit : TauResult::TimeCap;
  }

private:
  // One dispatch: either an analytic stretch across/inside a turning window
  // or an adaptive RK phase up to the next window edge.  Returns false when
  // the requested stop has been reached.
  bool step_dispatch(double t_target, const double* tau_target) {
    if (sign_ == 0) {
      // sigma frozen: tau advances linearly
      double rate = j0_ > 0.0 ? i1_start_ / warp_coefficients(model_, sigma_).i1 : 0.0;
      if (tau_target && rate > 0.0) {
        double need = (*tau_target - tau_) / rate;
        if (t_ + need <= t_target) {
          t_ += need;
          tau_ = *tau_target;
          return false;
        }
      }
      tau_ += rate * (t_target - t_);
      t_ = t_target;
      return false;
    }
    check_escape(t_target);
    double turn = nearby_turning();
    if (!std::isnan(turn)) return cross_window(turn, t_target, tau_target);
    return rk_phase(t_target, tau_target);
  }

  bool turning_beyond() const {
    for (double s : turnings_)
      if ((s - sigma_) * sign_ > 0.0) return true;
    return false;
  }

  // tau still collectable while sigma runs monotonically to the boundary:
  // integral of (I1(sigma0)/I1) sqrt(I0 / (E - V)) over the remaining range.
  // When the phase starts at or just past a turning point, E - V vanishes at
  // the start; anchoring the integral there with sigma = turn + side xi^2 and
  // the stable slope factor keeps the integrand finite.
  double remaining_tau_on_monotone_phase() const {
    double far = sign_ < 0 ? 0.0 : 1e9;
    double anchor = std::numeric_limits<double>::quiet_NaN();
    for (double turn : turnings_) {
      bool behind = (turn - sigma_) * sign_ <= 0.0;
      if (behind && std::abs(sigma_ - turn) <= 2.0 * window_width(turn)) {
        if (std::isnan(anchor) || std::abs(sigma_ - turn) < std::abs(sigma_ - anchor))
          anchor = turn;
      }
    }
    if (!std::isnan(anchor)) {
      double side = sign_ > 0 ? 1.0 : -1.0;
      double xi_lo = std::sqrt(std::abs(sigma_ - anchor));
      double xi_hi = std::sqrt(std::abs(far - anchor));
      return num::integrate(
          [&](double xi) {
            double s = anchor + side * xi * xi;
            if (!(s > 0.0)) return 0.0;
            WarpCoefficients c = warp_coefficients(model_, s);
            return 2.0 * (i1_start_ / c.i1) * std::sqrt(c.i0 / slope_factor(s, anchor));
          },
          xi_lo, xi_hi, 1e-8, 1e-12);
    }
    return num::integrate(
        [&](double s) {
          if (!(s > 0.0)) return 0.0;
          WarpCoefficients c = warp_coefficients(model_, s);
          double v = j0_ * i1_start_ / c.i1;
          double h = std::max(energy_ - v, 1e-300);
          return (i1_start_ / c.i1) * std::sqrt(c.i0 / h);
        },
        std::min(sigma_, far), std::max(sigma_, far), 1e-8, 1e-12);
  }

  double potential_derivative(double s) const {
    if (j0_ == 0.0) return 0.0;
    WarpCoefficients c = warp_coefficients(model_, s);
    return -j0_ * i1_start_ * c.di1_dsigma / (c.i1 * c.i1);
  }

  double potential_second_derivative(double s) const {
    if (j0_ == 0.0) return 0.0;
    WarpCoefficients c = warp_coefficients(model_, s);
    return -j0_ * i1_start_ *
           (c.d2i1_dsigma2 * c.i1 - 2.0 * c.di1_dsigma * c.di1_dsigma) / (c.i1 * c.i1 * c.i1);
  }

  void check_escape(double t_target) const {
    if (sign_ < 0 && escape_time_ && t_target >= *escape_time_ - 1e-13)
      throw BoundaryEscapeError("geodesic escapes to sigma = 0 at finite affine time",
                                *escape_time_);
  }

  double window_width(double turn) const {
    return std::min(0.05 * (1.0 + turn), 0.5 * turn);
  }

  // Turning point whose window contains sigma_, or which lies ahead in the
  // direction of travel; NaN when none is relevant for the current phase.
  double nearby_turning() const {
    double best = kNaN;
    for (double s : turnings_) {
      double w = window_width(s);
      bool inside = std::abs(sigma_ - s) <= 1.049 * w;
      bool ahead = (s - sigma_) * sign_ > 0.0;
      if (inside || ahead) {
        if (std::isnan(best) || std::abs(s - sigma_) < std::abs(best - sigma_)) best = s;
      }
    }
    if (!std::isnan(best) && std::abs(sigma_ - best) > 1.049 * window_width(best))
      return kNaN;  // ahead but not yet in the window: RK phase with a cap
    return best;
  }

  // Turning ahead used to cap RK steps (the window edge), NaN if none.
  double rk_cap_edge() const {
    double best = kNaN;
    for (double s : turnings_) {
      if ((s - sigma_) * sign_ > 0.0) {
        if (std::isnan(best) || (s - sigma_) * sign_ < (best - sigma_) * sign_) best = s;
      }
    }
    if (std::isnan(best)) return kNaN;
    return best - sign_ * window_width(best);
  }

  // (E - V(sigma)) / |sigma - turn|, finite and smooth across the turn.
  double slope_factor(double s, double turn) const {
    double gap = std::abs(s - turn);
    if (gap < 1e-7 * (1.0 + turn)) {
      double vp = potential_derivative(turn);
      double vpp = potential_second_derivative(turn);
      return std::abs(vp + 0.5 * vpp * (s - turn));
    }
    return std::max(1e-300, (energy_ - potential(s)) / gap);
  }

  // Cumulative elapsed-time and tau tables over the window, indexed by the
  // regularizing coordinate xi with sigma = turn + side xi^2.  One build
  // costs a few hundred coefficient evaluations; every later query or
  // inversion is Hermite interpolation on the monotone cumulative data.
  struct WindowTable {
    double turn, side, dx;
    int cells;
    std::vector<double> node_f_t, node_f_tau;  // integrands at the nodes
    std::vector<double> cum_t, cum_tau;        // cumulative from the turn

    double xi_exit() const { return dx * cells; }

    double value_at(const std::vector<double>& cum, const std::vector<double>& f,
                    double xi) const {
      int k = std::min(cells - 1, std::max(0, static_cast<int>(xi / dx)));
      double x0 = k * dx;
      double u = (xi - x0) / dx;
      double f0 = f[k], f1 = f[k + 1], c0 = cum[k], c1 = cum[k + 1];
      // cubic Hermite of the cumulative: values c0, c1 and slopes f0, f1
      double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
      double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
      return h00 * c0 + h10 * dx * f0 + h01 * c1 + h11 * dx * f1;
    }

    double slope_at(const std::vector<double>& f, double xi) const {
      int k = std::min(cells - 1, std::max(0, static_cast<int>(xi / dx)));
      double u = (xi - k * dx) / dx;
      return f[k] * (1 - u) + f[k + 1] * u;
    }

    double invert(const std::vector<double>& cum, const std::vector<double>& f,
                  double target) const {
      if (target <= 0.0) return 0.0;
      if (target >= cum[cells]) return xi_exit();
      int lo = 0, hi = cells;
      while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        (cum[mid] <= target ? lo : hi) = mid;
      }
      double xi = (lo + (target - cum[lo]) / std::max(1e-300, cum[lo + 1] - cum[lo])) * dx;
      for (int it = 0; it < 4; ++it) {
        double err = value_at(cum, f, xi) - target;
        double sl = std::max(1e-300, slope_at(f, xi));
        xi -= err / sl;
        xi = std::min(xi_exit(), std::max(0.0, xi));
      }
      return xi;
    }

    double time_at(double xi) const { return value_at(cum_t, node_f_t, xi); }
    double tau_at(double xi) const { return value_at(cum_tau, node_f_tau, xi); }
    double xi_at_time(double t) const { return invert(cum_t, node_f_t, t); }
    double xi_at_tau(double tau) const { return invert(cum_tau, node_f_tau, tau); }
  };

  WindowTable build_window_table(double turn, double side, double exit_sigma) const {
    WindowTable tb;
    tb.turn = turn;
    tb.side = side;
    tb.cells = 128;
    double xi_exit = std::sqrt(std::abs(exit_sigma - turn));
    tb.dx = xi_exit / tb.cells;
    tb.node_f_t.resize(tb.cells + 1);
    tb.node_f_tau.resize(tb.cells + 1);
    tb.cum_t.resize(tb.cells + 1);
    tb.cum_tau.resize(tb.cells + 1);

    auto integrands = [&](double xi, double& ft, double& ftau) {
      double s = turn + side * xi * xi;
      WarpCoefficients c = warp_coefficients(model_, s);
      ft = 2.0 * std::sqrt(c.i0 / slope_factor(s, turn));
      ftau = j0_ > 0.0 ? (i1_start_ / c.i1) * ft : 0.0;
    };

    integrands(0.0, tb.node_f_t[0], tb.node_f_tau[0]);
    tb.cum_t[0] = tb.cum_tau[0] = 0.0;
    for (int k = 0; k < tb.cells; ++k) {
      double mid_t, mid_tau, right_t, right_tau;
      integrands((k + 0.5) * tb.dx, mid_t, mid_tau);
      integrands((k + 1.0) * tb.dx, right_t, right_tau);
      tb.node_f_t[k + 1] = right_t;
      tb.node_f_tau[k + 1] = right_tau;
      tb.cum_t[k + 1] = tb.cum_t[k] + tb.dx / 6.0 * (tb.node_f_t[k] + 4.0 * mid_t + right_t);
      tb.cum_tau[k + 1] =
          tb.cum_tau[k] + tb.dx / 6.0 * (tb.node_f_tau[k] + 4.0 * mid_tau + right_tau);
    }
    return tb;
  }

  // Analytic handling of the stretch around a turning point.  The state may
  // enter approaching, departing, or exactly at the turn; the stretch ends
  // slightly outside the window so the caller never re-dispatches here.
  // Returns false when the requested stop was reached inside the stretch.
  bool cross_window(double turn, double t_target, const double* tau_target) {
    double width = window_width(turn);
    double side;
    if (std::abs(sigma_ - turn) <= 1e-13 * (1.0 + turn))
      side = potential_derivative(turn) > 0.0 ? -1.0 : 1.0;  // downhill side
    else
      side = sigma_ < turn ? -1.0 : 1.0;
    double exit_sigma = turn + side * 1.2 * width;
    bool approaching =
        (turn - sigma_) * sign_ > 0.0 && std::abs(sigma_ - turn) > 1e-13 * (1.0 + turn);

    WindowTable tb = build_window_table(turn, side, exit_sigma);
    double xi_here = std::sqrt(std::abs(sigma_ - turn));
    double t_in = tb.time_at(xi_here);
    double tau_in = tb.tau_at(xi_here);
    double t_star = approaching ? t_ + t_in : t_ - t_in;
    double tau_star = approaching ? tau_ + tau_in : tau_ - tau_in;
    double t_exit = t_star + tb.time_at(tb.xi_exit());
    int exit_sign = side < 0 ? -1 : 1;

    auto state_at_xi = [&](double xi, bool before_turn) {
      sigma_ = turn + side * xi * xi;
      t_ = before_turn ? t_star - tb.time_at(xi) : t_star + tb.time_at(xi);
      tau_ = before_turn ? tau_star - tb.tau_at(xi) : tau_star + tb.tau_at(xi);
      sign_ = before_turn ? -exit_sign : exit_sign;
    };

    if (tau_target && j0_ > 0.0) {
      double tau_exit = tau_star + tb.tau_at(tb.xi_exit());
      if (tau_exit >= *tau_target && t_exit <= t_target) {
        bool before = *tau_target < tau_star;
        double need = std::abs(*tau_target - tau_star);
        state_at_xi(tb.xi_at_tau(need), before);
        tau_ = *tau_target;
        return false;
      }
    }
    if (t_exit >= t_target) {
      double delta = t_target - t_star;  // negative: before the turn
      state_at_xi(tb.xi_at_time(std::abs(delta)), delta < 0.0);
      t_ = t_target;
      return false;
    }
    t_ = t_exit;
    tau_ = tau_star + tb.tau_at(tb.xi_exit());
    sigma_ = exit_sigma;
    sign_ = exit_sign;
    return true;
  }

  // Adaptive first-order integration up to t_target, capped at the window
  // edge of any turning point ahead.  Returns false when the stop (time or
  // tau) was reached, true when the caller must re-dispatch.
  bool rk_phase(double t_target, const double* tau_target) {
    double edge = rk_cap_edge();

    auto rhs = [&](double, const std::array<double, 2>& y) -> std::array<double, 2> {
      double s = y[0];
      if (!(s > 0.0) || !std::isfinite(s)) return {kNaN, kNaN};
      WarpCoefficients c;
      try {
        c = warp_coefficients(model_, s);
      } catch (const std::domain_error&) {
        return {kNaN, kNaN};
      }
      double v = j0_ == 0.0 ? 0.0 : j0_ * i1_start_ / c.i1;
      return {sign_ * std::sqrt(std::max(0.0, energy_ - v) / c.i0),
              j0_ > 0.0 ? i1_start_ / c.i1 : 0.0};
    };

    std::array<double, 2> y{sigma_, tau_};
    std::array<double, 2> f0 = rhs(t_, y);
    double h = std::min(0.05, t_target - t_);
    int rejections = 0;

    while (t_ < t_target) {
      if (!std::isnan(edge) && (edge - y[0]) * sign_ <= 1e-13 * (1.0 + std::abs(edge))) {
        sigma_ = edge;
        tau_ = y[1];
        return true;  // entered the turning window
      }
      if (t_ + h > t_target) h = t_target - t_;
      std::array<double, 2> f_new;
      auto step = num::dopri5_step<2>(rhs, t_, y, f0, h, 1e-12, 1e-14, &f_new);
      bool ok = std::isfinite(step.error_norm) && step.error_norm <= 1.0;
      bool overshoot = ok && !std::isnan(edge) && (step.y[0] - edge) * sign_ > 0.0;

      if (ok && !overshoot) {
        if (tau_target && step.y[1] >= *tau_target) {
          // bisect the sub-step to land exactly on tau_target
          double lo = 0.0, hi = h;
          std::array<double, 2> y_hi = step.y;
          for (int i = 0; i < 80 && hi - lo > 1e-14 * (1.0 + hi); ++i) {
            double mid = 0.5 * (lo + hi);
            auto y_mid = num::integrate_ode<2>(rhs, t_, y, t_ + mid, 1e-12, 1e-16);
            if (y_mid[1] >= *tau_target) {
              hi = mid;
              y_hi = y_mid;
            } else {
              lo = mid;
            }
          }
          t_ += hi;
          sigma_ = y_hi[0];
          tau_ = y_hi[1];
          return false;
        }
        t_ += h;
        y = step.y;
        f0 = f_new;
        sigma_ = y[0];
        tau_ = y[1];
        rejections = 0;
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(step.error_norm, 1e-10), -0.2)));
      } else if (overshoot) {
        double frac = (edge - y[0]) * sign_ / std::max(1e-300, (step.y[0] - y[0]) * sign_);
        h *= std::min(0.9, std::max(0.05, 0.8 * frac));
        if (h < 1e-14 * (1.0 + std::abs(t_))) {
          sigma_ = y[0];
          tau_ = y[1];
          return true;
        }
      } else {
        double shrink = std::isfinite(step.error_norm)
                            ? std::max(0.1, 0.9 * std::pow(step.error_norm, -0.2))
                            : 0.1;
        h *= shrink;
        if (++rejections > 200 || h < 1e-15 * (1.0 + std::abs(t_))) {
          if (escape_time_)
            throw BoundaryEscapeError("geodesic step underflow approaching sigma = 0",
                                      *escape_time_);
          throw std::runtime_error("SigmaMotion: step size underflow");
        }
      }
    }
    sigma_ = y[0];
    tau_ = y[1];
    return false;
  }

  ModelSpec model_;
  double energy_;
  double j0_;
  double i1_start_;
  std::vector<double> turnings_;
  std::optional<double> escape_time_;

  double t_;
  double sigma_;
  double tau_;
  int sign_ = 0;
};

std::vector<double> find_turning_points(const ModelSpec& model, double energy, double j0,
                                        double i1_start) {
  std::vector<double> out;
  if (j0 <= 0.0 || energy <= 0.0) return out;
  const double target = j0 * i1_start / energy;  // turning where I1(sigma) = target
  const double lo = 1e-12, hi = 1e9;
  const int n = 260;
  double prev_s = lo;
  double prev_f = warp_coefficients(model, lo).i1 - target;
  for (int i = 1; i <= n; ++i) {
    double s = lo * std::pow(hi / lo, static_cast<double>(i) / n);
    double f = warp_coefficients(model, s).i1 - target;
    if (prev_f == 0.0) out.push_back(prev_s);
    if (prev_f * f < 0.0) {
      double root = num::brent_root(
          [&](double x) { return warp_coefficients(model, x).i1 - target; }, prev_s, s, 1e-16);
      out.push_back(root);
    }
    prev_s = s;
    prev_f = f;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double energy(const ModelSpec& model, const WarpedPoint& z, const WarpedTangent& zdot) {
  require_attached_warped(z, zdot, "energy");
  WarpCoefficients c = warp_coefficients(model, z.sigma);
  double base2 = model_dot(model, z.location, zdot.location_part, zdot.location_part);
  return c.i0 * zdot.sigma_part * zdot.sigma_part + c.i1 * base2;
}

double moment(const ModelSpec& model, const WarpedPoint& z, const WarpedTangent& zdot,
              const IsometryGenerator& xi) {
  require_attached_warped(z, zdot, "moment");
  if (xi.kind != model.base)
    throw std::invalid_argument("moment: generator kind does not match the model's base manifold");
  WarpCoefficients c = warp_coefficients(model, z.sigma);
  BaseTangent field = killing_field(xi, z.location);
  return c.i1 * model_dot(model, z.location, zdot.location_part, field);
}

GeodesicPath::GeodesicPath(const ModelSpec& model, const WarpedPoint& z0,
                           const WarpedTangent& zdot0)
    : model_(model), z0_(z0), zdot0_(zdot0) {
  require_attached_warped(z0, zdot0, "GeodesicPath");
  if (z0.location.kind != model.base)
    throw std::invalid_argument("GeodesicPath: point not on the model's base manifold");
  WarpCoefficients c = warp_coefficients(model, z0.sigma);
  i1_at_start_ = c.i1;
  double base2 = model_dot(model, z0.location, zdot0.location_part, zdot0.location_part);
  j0_ = c.i1 * base2;
  energy_ = c.i0 * zdot0.sigma_part * zdot0.sigma_part + j0_;
  turning_points_ = find_turning_points(model, energy_, j0_, i1_at_start_);
  if (j0_ == 0.0 && energy_ > 0.0 && zdot0.sigma_part < 0.0) {
    if (completeness_check(model).at_zero == TailClass::Convergent) {
      double root_e = std::sqrt(energy_);
      escape_time_ = num::integrate(
                         [&](double s) { return std::sqrt(warp_coefficients(model, s).i0); },
                         0.0, z0.sigma, 1e-13, 1e-16) /
                     root_e;
    }
  }
}

PotentialProfile GeodesicPath::potential() const {
  ModelSpec model = model_;
  double j0 = j0_;
  double i1s = i1_at_start_;
  return {[model, j0, i1s](double s) {
            if (j0 == 0.0) return 0.0;
            return j0 * i1s / warp_coefficients(model, s).i1;
          },
          energy_};
}

std::pair<WarpedPoint, WarpedTangent> GeodesicPath::evaluate(double t) const {
  if (t < 0.0) {
    WarpedTangent rev{BaseTangent{z0_.location,
                                  {-zdot0_.location_part.c[0], -zdot0_.location_part.c[1],
                                   -zdot0_.location_part.c[2]}},
                      -zdot0_.sigma_part};
    GeodesicPath back(model_, z0_, rev);
    auto [p, v] = back.evaluate(-t);
    for (double& vc : v.location_part.c) vc = -vc;
    v.sigma_part = -v.sigma_part;
    return {p, v};
  }
  SigmaMotion motion(model_, z0_.sigma, zdot0_.sigma_part, energy_, j0_, i1_at_start_,
                     turning_points_, escape_time_);
  motion.advance_to_time(t);
  double sig = motion.sigma();
  double sdot = motion.sigma_dot();
  if (j0_ == 0.0) {
    WarpedPoint p(z0_.location, sig);
    return {p, WarpedTangent{BaseTangent::zero(z0_.location), sdot}};
  }
  FlowState flow = base_geodesic_flow(z0_.location, zdot0_.location_part, motion.tau());
  double taudot = i1_at_start_ / warp_coefficients(model_, sig).i1;
  WarpedPoint p(flow.point, sig);
  BaseTangent vel{flow.point,
                  {flow.velocity.c[0] * taudot, flow.velocity.c[1] * taudot,
                   flow.velocity.c[2] * taudot}};
  return {p, WarpedTangent{vel, sdot}};
}

std::vector<std::pair<WarpedPoint, WarpedTangent>> GeodesicPath::sample(
    const std::vector<double>& times) const {
  std::vector<std::pair<WarpedPoint, WarpedTangent>> out;
  out.reserve(times.size());
  SigmaMotion motion(model_, z0_.sigma, zdot0_.sigma_part, energy_, j0_, i1_at_start_,
                     turning_points_, escape_time_);
  double prev = 0.0;
  for (double t : times) {
    if (t < 0.0 || t < prev) {
      out.push_back(evaluate(t));  // out-of-order or negative: standalone evaluation
      continue;
    }
    motion.advance_to_time(t);
    prev = t;
    double sig = motion.sigma();
    double sdot = motion.sigma_dot();
    if (j0_ == 0.0) {
      out.emplace_back(WarpedPoint(z0_.location, sig),
                       WarpedTangent{BaseTangent::zero(z0_.location), sdot});
      continue;
    }
    FlowState flow = base_geodesic_flow(z0_.location, zdot0_.location_part, motion.tau());
    double taudot = i1_at_start_ / warp_coefficients(model_, sig).i1;
    BaseTangent vel{flow.point,
                    {flow.velocity.c[0] * taudot, flow.velocity.c[1] * taudot,
                     flow.velocity.c[2] * taudot}};
    out.emplace_back(WarpedPoint(flow.point, sig), WarpedTangent{vel, sdot});
  }
  return out;
}

GeodesicPath geodesic_closed_form(const ModelSpec& model, const WarpedPoint& z0,
                                  const WarpedTangent& zdot0) {
  return GeodesicPath(model, z0, zdot0);
}

// ---------------------------------------------------------------------------
// Independent oracle: chart Euler-Lagrange equations of I0 sdot^2 + I1 |xdot|^2.

namespace {

struct OracleTracker {
  double t = 0.0;
  double sigma = 0.0;
};

template <std::size_t N, typename Rhs>
std::array<double, N> oracle_integrate(const Rhs& rhs, std::array<double, N> y, double t,
                                       double rel_tol, double abs_tol, int sigma_index,
                                       OracleTracker* tracker) {
  std::function<void(double, const std::array<double, N>&)> obs =
      [tracker, sigma_index](double tt, const std::array<double, N>& yy) {
        tracker->t = tt;
        tracker->sigma = yy[sigma_index];
      };
  return num::integrate_ode<N>(rhs, 0.0, y, t, rel_tol, abs_tol, obs);
}

}  // namespace

std::pair<WarpedPoint, WarpedTangent> geodesic_ode_oracle(const ModelSpec& model,
                                                          const WarpedPoint& z0,
                                                          const WarpedTangent& zdot0, double t,
                                                          double rel_tol, double abs_tol) {
  require_attached_warped(z0, zdot0, "geodesic_ode_oracle");
  OracleTracker tracker{0.0, z0.sigma};

  auto coeffs_or_nan = [&](double s, WarpCoefficients& c) {
    if (!(s > 0.0) || !std::isfinite(s)) return false;
    try {
      c = warp_coefficients(model, s);
    } catch (const std::domain_error&) {
      return false;
    }
    return true;
  };

  try {
    switch (model.base) {
      case Manifold::RealLine: {
        // y = (x, sigma, xdot, sigmadot)
        auto rhs = [&](double, const std::array<double, 4>& y) -> std::array<double, 4> {
          WarpCoefficients c;
          if (!coeffs_or_nan(y[1], c)) return {kNaN, kNaN, kNaN, kNaN};
          double k = y[2] * y[2];
          return {y[2], y[3], -(c.di1_dsigma / c.i1) * y[3] * y[2],
                  (-0.5 * c.di0_dsigma * y[3] * y[3] + 0.5 * c.di1_dsigma * k) / c.i0};
        };
        std::array<double, 4> y{z0.location.c[0], z0.sigma, zdot0.location_part.c[0],
                                zdot0.sigma_part};
        y = oracle_integrate<4>(rhs, y, t, rel_tol, abs_tol, 1, &tracker);
        WarpedPoint p(BasePoint::line(y[0]), y[1]);
        return {p, WarpedTangent{BaseTangent{p.location, {y[2], 0, 0}}, y[3]}};
      }
      case Manifold::Sphere2: {
        // y = (x0..x2, sigma, v0..v2, sigmadot); constraint |x| = 1 kept by the
        // multiplier term, not by projection
        auto rhs = [&](double, const std::array<double, 8>& y) -> std::array<double, 8> {
          WarpCoefficients c;
          if (!coeffs_or_nan(y[3], c)) {
            std::array<double, 8> bad;
            bad.fill(kNaN);
            return bad;
          }
          double k = y[4] * y[4] + y[5] * y[5] + y[6] * y[6];
          double warp = c.di1_dsigma / c.i1 * y[7];
          std::array<double, 8> dy;
          dy[0] = y[4];
          dy[1] = y[5];
          dy[2] = y[6];
          dy[3] = y[7];
          for (int i = 0; i < 3; ++i) dy[4 + i] = -warp * y[4 + i] - k * y[i];
          dy[7] = (-0.5 * c.di0_dsigma * y[7] * y[7] + 0.5 * c.di1_dsigma * k) / c.i0;
          return dy;
        };
        std::array<double, 8> y{z0.location.c[0],          z0.location.c[1],
                                z0.location.c[2],          z0.sigma,
                                zdot0.location_part.c[0],  zdot0.location_part.c[1],
                                zdot0.location_part.c[2],  zdot0.sigma_part};
        y = oracle_integrate<8>(rhs, y, t, rel_tol, abs_tol, 3, &tracker);
        double n = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
        BasePoint loc = BasePoint::sphere(y[0] / n, y[1] / n, y[2] / n);
        double drift = loc.c[0] * y[4] + loc.c[1] * y[5] + loc.c[2] * y[6];
        WarpedPoint p(loc, y[3]);
        return {p, WarpedTangent{BaseTangent{loc,
                                             {y[4] - drift * loc.c[0], y[5] - drift * loc.c[1],
                                              y[6] - drift * loc.c[2]}},
                                 y[7]}};
      }
      case Manifold::Hyperbolic2: {
        // y = (u, w, sigma, udot, wdot, sigmadot); model metric scale enters
        // only through |xdot|^2 in the sigma equation
        double scale = model.metric_scale;
        auto rhs = [&, scale](double, const std::array<double, 6>& y) -> std::array<double, 6> {
          WarpCoefficients c;
          if (!coeffs_or_nan(y[2], c) || !(y[1] > 0.0)) {
            std::array<double, 6> bad;
            bad.fill(kNaN);
            return bad;
          }
          double w = y[1], ud = y[3], wd = y[4], sd = y[5];
          double k = scale * (ud * ud + wd * wd) / (w * w);
          double warp = c.di1_dsigma / c.i1 * sd;
          return {ud,
                  wd,
                  sd,
                  -warp * ud + 2.0 * ud * wd / w,
                  -warp * wd + (wd * wd - ud * ud) / w,
                  (-0.5 * c.di0_dsigma * sd * sd + 0.5 * c.di1_dsigma * k) / c.i0};
        };
        std::array<double, 6> y{z0.location.c[0],         z0.location.c[1], z0.sigma,
                                zdot0.location_part.c[0], zdot0.location_part.c[1],
                                zdot0.sigma_part};
        y = oracle_integrate<6>(rhs, y, t, rel_tol, abs_tol, 2, &tracker);
        BasePoint loc = BasePoint::half_plane(y[0], y[1]);
        WarpedPoint p(loc, y[2]);
        return {p, WarpedTangent{BaseTangent{loc, {y[3], y[4], 0.0}}, y[5]}};
      }
    }
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()).find("step size underflow") != std::string::npos)
      throw BoundaryEscapeError("ode oracle: boundary proximity near sigma = 0", tracker.t);
    throw;
  } catch (const std::domain_error&) {
    throw BoundaryEscapeError("ode oracle: state left the manifold near the boundary",
                              tracker.t);
  }
  throw std::logic_error("unreachable");
}

WarpedPoint warped_exp(const ModelSpec& model, const WarpedPoint& z, const WarpedTangent& w) {
  if (w.sigma_part == 0.0 && metric_norm(z.location, w.location_part) == 0.0) return z;
  return GeodesicPath(model, z, w).evaluate(1.0).first;
}

// ---------------------------------------------------------------------------
// Shooting solver for the inverse problem.
//
// The connecting geodesic lies in the totally geodesic surface spanned by the
// base geodesic through the two locations and the vertical direction, so the
// unknown reduces to the vertical fraction v of a unit-speed initial
// velocity: sdot(0) = v / sqrt(I0), |xdot(0)| = sqrt((1 - v^2) / I1).  The
// crossing height F(v) = sigma at base arc d is matched to sigma2 with a
// safeguarded secant (Illinois) iteration inside a bracketing interval.

namespace {

constexpr double kSentinel = 1e12;

struct ShootSetup {
  ModelSpec model;
  double sigma1;
  double sigma2;
  double distance;  // model base distance
  double i0_1;
  double i1_1;
  double t_cap;
  // precomputed log grid of I1 for the per-shot turning-point solve
  std::vector<double> grid_sigma;
  std::vector<double> grid_i1;

  void build_grid() {
    const double lo = 1e-12, hi = 1e9;
    const int n = 260;
    grid_sigma.reserve(n + 1);
    grid_i1.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
      double s = lo * std::pow(hi / lo, static_cast<double>(i) / n);
      grid_sigma.push_back(s);
      grid_i1.push_back(warp_coefficients(model, s).i1);
    }
  }

  // turning points of the unit-energy shot with base moment j0:
  // V(sigma) = E  <=>  I1(sigma) = j0 i1_1
  std::vector<double> turnings(double j0) const {
    std::vector<double> out;
    double target = j0 * i1_1;
    for (std::size_t i = 1; i < grid_sigma.size(); ++i) {
      double fa = grid_i1[i - 1] - target, fb = grid_i1[i] - target;
      if (fa == 0.0) out.push_back(grid_sigma[i - 1]);
      if (fa * fb < 0.0)
        out.push_back(num::brent_root(
            [&](double x) { return warp_coefficients(model, x).i1 - target; },
            grid_sigma[i - 1], grid_sigma[i], 1e-16));
    }
    return out;
  }
};

struct ShootOutcome {
  bool crossed = false;
  double sigma_at_cross = 0.0;
  double arc_length = 0.0;
  double objective = 0.0;
};

ShootOutcome shoot_once(const ShootSetup& su, double v) {
  double j0 = std::max(0.0, 1.0 - v * v);
  double sdot0 = v / std::sqrt(su.i0_1);
  SigmaMotion motion(su.model, su.sigma1, sdot0, 1.0, j0, su.i1_1, su.turnings(j0),
                     std::nullopt);
  // base arc b(t) = |xdot(0)| tau(t); crossing at tau = d / |xdot(0)|
  double xdot0 = std::sqrt(j0 / su.i1_1);
  double tau_target = su.distance / xdot0;
  ShootOutcome out;
  SigmaMotion::TauResult res;
  try {
    res = motion.advance_to_tau(tau_target, su.t_cap);
  } catch (const BoundaryEscapeError&) {
    res = SigmaMotion::TauResult::FloorAbort;
  }
  out.sigma_at_cross = motion.sigma();
  out.arc_length = motion.t();
  switch (res) {
    case SigmaMotion::TauResult::Hit:
      out.crossed = true;
      out.objective = motion.sigma() - su.sigma2;
      break;
    case SigmaMotion::TauResult::FloorAbort:
      out.objective = -kSentinel;
      break;
    case SigmaMotion::TauResult::CeilAbort:
      out.objective = kSentinel;
      break;
    case SigmaMotion::TauResult::TimeCap:
      out.objective = motion.sigma() > su.sigma2 ? kSentinel : -kSentinel;
      break;
  }
  return out;
}

}  // namespace

WarpedTangent warped_log(const ModelSpec& model, const WarpedPoint& z1, const WarpedPoint& z2) {
  if (z1.location.kind != model.base || z2.location.kind != model.base)
    throw std::invalid_argument("warped_log: points not on the model's base manifold");
  double d = model_distance(model, z1.location, z2.location);
  if (d == 0.0 && z1.sigma == z2.sigma) return WarpedTangent::zero(z1);

  WarpCoefficients c1 = warp_coefficients(model, z1.sigma);
  if (d < 1e-14 * (1.0 + std::abs(z1.sigma))) {
    // vertical pair: the connecting geodesic is the vertical line
    double arc = vertical_r(model, z1.sigma, z2.sigma);
    return WarpedTangent{BaseTangent::zero(z1.location), arc / std::sqrt(c1.i0)};
  }

  ShootSetup su{model, z1.sigma, z2.sigma, d, c1.i0, c1.i1, 0.0, {}, {}};
  WarpCoefficients c2 = warp_coefficients(model, z2.sigma);
  double rgap = std::abs(vertical_r(model, z1.sigma, z2.sigma));
  su.t_cap = 6.0 * (rgap + d * (std::sqrt(c1.i1) + std::sqrt(c2.i1)) + 2.0 +
                    std::abs(std::log(z1.sigma)) + std::abs(std::log(z2.sigma)));
  su.build_grid();

  // bracket the vertical fraction
  double lo = -1.0 + 1e-9, hi = 1.0 - 1e-9;
  double fa = shoot_once(su, lo).objective;
  double fb = shoot_once(su, hi).objective;
  if (fa > 0.0 || fb < 0.0)
    throw ConvergenceError("warped_log: shooting could not bracket the vertical split",
                           std::min(std::abs(fa), std::abs(fb)));

  // bisection while an endpoint is a sentinel, then Illinois secant
  double v_root = 0.5 * (lo + hi);
  ShootOutcome best;
  bool have_best = false;
  for (int it = 0; it < 90; ++it) {
    bool sentinel = std::abs(fa) >= kSentinel || std::abs(fb) >= kSentinel;
    double cand;
    if (sentinel) {
      cand = 0.5 * (lo + hi);
    } else {
      double denom = fb - fa;
      cand = std::abs(denom) > 1e-300 ? (lo * fb - hi * fa) / denom : 0.5 * (lo + hi);
      if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    }
    ShootOutcome o = shoot_once(su, cand);
    double fc = o.objective;
    if (o.crossed && (!have_best || std::abs(fc) < std::abs(best.objective))) {
      best = o;
      v_root = cand;
      have_best = true;
    }
    if ((o.crossed && std::abs(fc) < 1e-12 * (1.0 + su.sigma2)) || hi - lo < 1e-14) break;
    if ((fc < 0.0) == (fa < 0.0)) {
      lo = cand;
      fa = fc;
      if (!sentinel) fb *= 0.5;  // Illinois halving keeps the secant from stalling
    } else {
      hi = cand;
      fb = fc;
      if (!sentinel) fa *= 0.5;
    }
  }
  if (!have_best)
    throw ConvergenceError("warped_log: shooting did not converge",
                           std::min(std::abs(fa), std::abs(fb)));

  double j0 = std::max(0.0, 1.0 - v_root * v_root);
  double xdot0 = std::sqrt(j0 / c1.i1);
  double arc = best.arc_length;
  BaseTangent dir = base_log(z1.location, z2.location);
  double dirn = model_norm(model, z1.location, dir);
  BaseTangent base_part{z1.location,
                        {dir.c[0] / dirn * xdot0 * arc, dir.c[1] / dirn * xdot0 * arc,
                         dir.c[2] / dirn * xdot0 * arc}};
  return WarpedTangent{base_part, v_root / std::sqrt(c1.i0) * arc};
}

double rao_distance(const ModelSpec& model, const WarpedPoint& z1, const WarpedPoint& z2) {
  double d = model_distance(model, z1.location, z2.location);
  if (d == 0.0 && z1.sigma == z2.sigma) return 0.0;
  if (d < 1e-14 * (1.0 + std::abs(z1.sigma)))
    return std::abs(vertical_r(model, z1.sigma, z2.sigma));
  WarpedTangent lg = warped_log(model, z1, z2);
  return std::sqrt(energy(model, z1, lg));
}

}  // namespace warpgeo
