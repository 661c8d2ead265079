#include "warpgeo/warp_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "warpgeo/numerics.hpp"

namespace warpgeo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSigmaOverflowGuard = 1e100;

void require_sigma(double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("sigma must be positive");
  if (sigma > kSigmaOverflowGuard)
    throw std::domain_error("sigma exceeds the overflow guard");
}

// ---- von Mises-Fisher coefficient kernels --------------------------------
//
// I0 = sigma^-2 - sinh^-2(sigma), I1 = sigma coth(sigma) - 1.  Below the
// series threshold both expressions lose all precision to cancellation,
// so Laurent/Taylor expansions take over:
//   I0 = 1/3 - s^2/15 + 2 s^4/189 - s^6/675
//   I1 = s^2/3 - s^4/45 + 2 s^6/945 - s^8/4725

double coth_stable(double s) {
  if (s > 20.0) {
    double e = std::exp(-2.0 * s);
    return (1.0 + e) / (1.0 - e);
  }
  return std::cosh(s) / std::sinh(s);
}

double csch2_stable(double s) {
  if (s > 20.0) {
    double e = std::exp(-s);
    double d = 1.0 - e * e;
    return 4.0 * e * e / (d * d);
  }
  double sh = std::sinh(s);
  return 1.0 / (sh * sh);
}

WarpCoefficients vmf_coeffs(double s) {
  WarpCoefficients c{};
  if (s < kSeriesSigmaThreshold) {
    double u = s * s;
    c.i0 = 1.0 / 3 - u / 15 + 2 * u * u / 189 - u * u * u / 675;
    c.di0_dsigma = -2 * s / 15 + 8 * s * u / 189 - 2 * s * u * u / 225;
    c.i1 = u / 3 - u * u / 45 + 2 * u * u * u / 945 - u * u * u * u / 4725;
    c.di1_dsigma = 2 * s / 3 - 4 * s * u / 45 + 4 * s * u * u / 315 - 8 * s * u * u * u / 4725;
    c.d2i1_dsigma2 = 2.0 / 3 - 4 * u / 15 + 4 * u * u / 63 - 56 * u * u * u / 4725;
  } else {
    double ct = coth_stable(s);
    double cs2 = csch2_stable(s);
    c.i0 = 1.0 / (s * s) - cs2;
    c.di0_dsigma = -2.0 / (s * s * s) + 2.0 * cs2 * ct;
    c.i1 = s * ct - 1.0;
    c.di1_dsigma = ct - s * cs2;
    c.d2i1_dsigma2 = 2.0 * cs2 * c.i1;
  }
  return c;
}

// ---- Riemannian Gaussian (hyperbolic plane) kernels -----------------------
//
// With eta = -1/(2 sigma^2) and psi(eta) = log Z(sigma),
//   Z(sigma) = 2 pi sqrt(pi) sigma e^{sigma^2/4} erf(sigma/2),
// the warp coefficients in the sigma parameterization are
//   I0 = psi''(eta) (deta/dsigma)^2 = L'' + 3 L'/sigma
//   I1 = 4 eta^2 psi'(eta) / dim M  = L'/(2 sigma)
// where L(sigma) = log Z(sigma).  Everything below works with L', L'', L'''.

struct LogZDerivs {
  double l1, l2, l3;
};

LogZDerivs rg_logz_derivs(double s) {
  LogZDerivs d{};
  if (s < kSeriesSigmaThreshold) {
    double u = s * s;
    d.l1 = 2.0 / s + s / 3 + s * u / 90 - s * u * u / 3780;
    d.l2 = -2.0 / u + 1.0 / 3 + u / 30 - u * u / 756;
    d.l3 = 4.0 / (s * u) + s / 15 - s * u / 189;
  } else {
    // B = d/dsigma log erf(sigma/2); B' = -B (sigma/2 + B)
    double b = std::exp(-s * s / 4.0) / (std::sqrt(kPi) * std::erf(s / 2.0));
    double bp = -b * (s / 2.0 + b);
    double bpp = -bp * (s / 2.0 + b) - b * (0.5 + bp);
    d.l1 = 1.0 / s + s / 2.0 + b;
    d.l2 = -1.0 / (s * s) + 0.5 + bp;
    d.l3 = 2.0 / (s * s * s) + bpp;
  }
  return d;
}

WarpCoefficients rg_coeffs(double s) {
  LogZDerivs d = rg_logz_derivs(s);
  WarpCoefficients c{};
  c.i0 = d.l2 + 3.0 * d.l1 / s;
  c.i1 = d.l1 / (2.0 * s);
  c.di0_dsigma = d.l3 + 3.0 * d.l2 / s - 3.0 * d.l1 / (s * s);
  c.di1_dsigma = (d.l2 * s - d.l1) / (2.0 * s * s);
  c.d2i1_dsigma2 = d.l3 / (2.0 * s) - d.l2 / (s * s) + d.l1 / (s * s * s);
  return c;
}

double rg_log_z(double s) {
  // log(2 pi sqrt(pi)) + log sigma + sigma^2/4 + log erf(sigma/2)
  double log_erf;
  if (s < kSeriesSigmaThreshold) {
    double u = s * s;
    log_erf = std::log(s / std::sqrt(kPi)) + std::log1p(-u / 12 + u * u / 160 - u * u * u / 2688);
  } else {
    log_erf = std::log(std::erf(s / 2.0));
  }
  return std::log(2.0 * kPi * std::sqrt(kPi)) + std::log(s) + s * s / 4.0 + log_erf;
}

void require_on_base(const ModelSpec& model, const BasePoint& x, const char* where) {
  if (x.kind != model.base)
    throw std::invalid_argument(std::string(where) + ": point is not on the model's base manifold");
}

}  // namespace

ModelSpec ModelSpec::of(Model tag) {
  switch (tag) {
    case Model::NormalLine:
      return {tag, Manifold::RealLine, 1, 1.0, 0.0};
    case Model::VonMisesFisherS2:
      return {tag, Manifold::Sphere2, 2, 1.0, 1.0};
    case Model::RiemannianGaussianH2:
      return {tag, Manifold::Hyperbolic2, 2, 2.0, -0.5};
  }
  throw std::invalid_argument("unknown model tag");
}

const char* name(Model tag) {
  switch (tag) {
    case Model::NormalLine: return "normal";
    case Model::VonMisesFisherS2: return "vmf";
    case Model::RiemannianGaussianH2: return "rgauss";
  }
  return "?";
}

WarpedPoint::WarpedPoint(BasePoint loc, double sig) : location(loc), sigma(sig) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::domain_error("WarpedPoint: sigma must be positive and finite");
}

WarpCoefficients warp_coefficients(const ModelSpec& model, double sigma) {
  require_sigma(sigma);
  WarpCoefficients c{};
  switch (model.tag) {
    case Model::NormalLine: {
      double s2 = sigma * sigma;
      c = {1.0 / s2, 0.5 / s2, -2.0 / (s2 * sigma), -1.0 / (s2 * sigma), 3.0 / (s2 * s2)};
      break;
    }
    case Model::VonMisesFisherS2:
      c = vmf_coeffs(sigma);
      break;
    case Model::RiemannianGaussianH2:
      c = rg_coeffs(sigma);
      break;
  }
  if (!(c.i0 > 0.0) || !(c.i1 > 0.0) || !std::isfinite(c.i0) || !std::isfinite(c.i1))
    throw std::domain_error("warp_coefficients: coefficients left (0, inf); sigma out of range");
  return c;
}

double vertical_r(const ModelSpec& model, double sigma_from, double sigma_to) {
  require_sigma(sigma_from);
  require_sigma(sigma_to);
  if (sigma_from == sigma_to) return 0.0;
  return num::integrate(
      [&](double s) { return std::sqrt(warp_coefficients(model, s).i0); },
      sigma_from, sigma_to, 1e-13, 1e-15);
}

double log_density(const ModelSpec& model, const BasePoint& x, const WarpedPoint& z) {
  require_on_base(model, x, "log_density");
  require_on_base(model, z.location, "log_density");
  double s = z.sigma;
  require_sigma(s);
  switch (model.tag) {
    case Model::NormalLine: {
      double d = x.c[0] - z.location.c[0];
      return -std::log(s) - 0.5 * std::log(2.0 * kPi) - d * d / (2.0 * s * s);
    }
    case Model::VonMisesFisherS2: {
      // p = sigma / (4 pi sinh sigma) exp(sigma <x, mean>)
      double dot = x.c[0] * z.location.c[0] + x.c[1] * z.location.c[1] + x.c[2] * z.location.c[2];
      double log_sinh = s > 20.0 ? s + std::log1p(-std::exp(-2.0 * s)) - std::log(2.0)
                                 : std::log(std::sinh(s));
      return std::log(s) - std::log(4.0 * kPi) - log_sinh + s * dot;
    }
    case Model::RiemannianGaussianH2: {
      double d = model_distance(model, x, z.location);
      return -rg_log_z(s) - d * d / (2.0 * s * s);
    }
  }
  throw std::logic_error("unreachable");
}

Score score(const ModelSpec& model, const BasePoint& x, const WarpedPoint& z) {
  require_on_base(model, x, "score");
  require_on_base(model, z.location, "score");
  double s = z.sigma;
  require_sigma(s);
  switch (model.tag) {
    case Model::NormalLine: {
      double d = x.c[0] - z.location.c[0];
      BaseTangent g{z.location, {d / (s * s), 0.0, 0.0}};
      return {g, -1.0 / s + d * d / (s * s * s)};
    }
    case Model::VonMisesFisherS2: {
      double dot = x.c[0] * z.location.c[0] + x.c[1] * z.location.c[1] + x.c[2] * z.location.c[2];
      std::array<double, 3> g;
      for (int i = 0; i < 3; ++i) g[i] = s * (x.c[i] - dot * z.location.c[i]);
      return {BaseTangent{z.location, g}, dot - (coth_stable(s) - 1.0 / s)};
    }
    case Model::RiemannianGaussianH2: {
      double d = model_distance(model, x, z.location);
      BaseTangent g = BaseTangent::zero(z.location);
      if (d > 0.0) {
        // grad of -d^2/(2 sigma^2) in the model metric is log(location, x)/sigma^2;
        // base_log carries the intrinsic normalization, and the scaled metric's
        // log is the same chart vector.
        BaseTangent lg = base_log(z.location, x);
        for (int i = 0; i < 3; ++i) g.c[i] = lg.c[i] / (s * s);
      }
      return {g, -rg_logz_derivs(s).l1 + d * d / (s * s * s)};
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

constexpr std::size_t kSampleChunk = 4096;

void sample_chunk(const ModelSpec& model, const WarpedPoint& z, std::size_t count,
                  std::uint64_t chunk_seed, std::vector<BasePoint>& out) {
  std::mt19937_64 rng(chunk_seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double s = z.sigma;

  switch (model.tag) {
    case Model::NormalLine: {
      for (std::size_t i = 0; i < count; ++i)
        out.push_back(BasePoint::line(z.location.c[0] + s * gauss(rng)));
      return;
    }
    case Model::VonMisesFisherS2: {
      auto frame = tangent_frame(z.location);
      for (std::size_t i = 0; i < count; ++i) {
        // inverse CDF of the colatitude cosine, density prop. to e^{s w} on [-1, 1]
        double u = unif(rng);
        double w = s < 1e-8 ? 2.0 * u - 1.0
                            : 1.0 + std::log(u + (1.0 - u) * std::exp(-2.0 * s)) / s;
        w = std::min(1.0, std::max(-1.0, w));
        double phi = 2.0 * kPi * unif(rng);
        double r = std::sqrt(std::max(0.0, 1.0 - w * w));
        std::array<double, 3> p;
        for (int k = 0; k < 3; ++k)
          p[k] = w * z.location.c[k] +
                 r * (std::cos(phi) * frame[0].c[k] + std::sin(phi) * frame[1].c[k]);
        double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        out.push_back(BasePoint::sphere(p[0] / n, p[1] / n, p[2] / n));
      }
      return;
    }
    case Model::RiemannianGaussianH2: {
      // polar sampling around the location: intrinsic radius rb has density
      // prop. to e^{-rb^2/(2 t^2)} sinh(rb) with t = sigma/sqrt(2); rejection
      // from the shifted normal N(t^2, t) with acceptance 1 - e^{-2 rb}
      double t = s / std::sqrt(2.0);
      auto frame = tangent_frame(z.location);
      for (std::size_t i = 0; i < count; ++i) {
        double rb;
        for (;;) {
          rb = t * t + t * gauss(rng);
          if (rb <= 0.0) continue;
          if (unif(rng) < -std::expm1(-2.0 * rb)) break;
        }
        double phi = 2.0 * kPi * unif(rng);
        std::array<double, 3> dir;
        for (int k = 0; k < 3; ++k)
          dir[k] = rb * (std::cos(phi) * frame[0].c[k] + std::sin(phi) * frame[1].c[k]);
        out.push_back(base_exp(z.location, BaseTangent{z.location, dir}));
      }
      return;
    }
  }
}

}  // namespace

std::vector<BasePoint> sample(const ModelSpec& model, const WarpedPoint& z,
                              std::size_t n, std::uint64_t seed) {
  require_on_base(model, z.location, "sample");
  if (n == 0) return {};
  std::vector<BasePoint> out;
  out.reserve(n);
  std::size_t chunk_index = 0;
  for (std::size_t done = 0; done < n; done += kSampleChunk, ++chunk_index) {
    std::size_t count = std::min(kSampleChunk, n - done);
    std::uint64_t chunk_seed = num::splitmix64(seed + 0x9E3779B97F4A7C15ULL * chunk_index);
    sample_chunk(model, z, count, chunk_seed, out);
  }
  return out;
}

namespace {

// Least-squares slope of log sqrt(I0) against log sigma over a decade grid.
double fitted_exponent(const ModelSpec& model, double lo, double hi, int n) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    double ls = std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1);
    double s = std::exp(ls);
    double y = 0.5 * std::log(warp_coefficients(model, s).i0);
    sx += ls;
    sy += y;
    sxx += ls * ls;
    sxy += ls * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// In the marginal band p ~ -1 the power law alone cannot decide; check that
// sigma * sqrt(I0) settles to a positive constant, which makes the integral
// log-divergent at either end.
bool marginal_constant(const ModelSpec& model, double lo, double hi) {
  double clo = lo * std::sqrt(warp_coefficients(model, lo).i0);
  double chi = hi * std::sqrt(warp_coefficients(model, hi).i0);
  if (!(clo > 0.0) || !(chi > 0.0)) return false;
  return std::abs(chi / clo - 1.0) < 0.02;
}

}  // namespace

CompletenessReport completeness_check(const ModelSpec& model) {
  constexpr double kMargin = 0.1;
  CompletenessReport rep{};

  double p0 = fitted_exponent(model, 1e-7, 1e-5, 9);
  if (p0 < -1.0 - kMargin)
    rep.at_zero = TailClass::Divergent;
  else if (p0 > -1.0 + kMargin)
    rep.at_zero = TailClass::Convergent;
  else
    rep.at_zero = marginal_constant(model, 1e-7, 1e-5) ? TailClass::Divergent
                                                       : TailClass::Undetermined;

  double pinf = fitted_exponent(model, 1e5, 1e7, 9);
  if (pinf > -1.0 + kMargin)
    rep.at_infinity = TailClass::Divergent;
  else if (pinf < -1.0 - kMargin)
    rep.at_infinity = TailClass::Convergent;
  else
    rep.at_infinity = marginal_constant(model, 1e5, 1e7) ? TailClass::Divergent
                                                         : TailClass::Undetermined;
  return rep;
}

double model_dot(const ModelSpec& model, const BasePoint& x, const BaseTangent& u,
                 const BaseTangent& v) {
  return model.metric_scale * metric_dot(x, u, v);
}

double model_norm(const ModelSpec& model, const BasePoint& x, const BaseTangent& v) {
  return std::sqrt(model.metric_scale) * metric_norm(x, v);
}

double model_distance(const ModelSpec& model, const BasePoint& x, const BasePoint& y) {
  return std::sqrt(model.metric_scale) * base_distance(x, y);
}

}  // namespace warpgeo
