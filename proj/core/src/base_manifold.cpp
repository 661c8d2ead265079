#include "warpgeo/base_manifold.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "warpgeo/errors.hpp"

namespace warpgeo {

namespace {

constexpr double kOnManifoldTol = 1e-12;

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double norm3(const std::array<double, 3>& a) { return std::sqrt(dot3(a, a)); }

std::array<double, 3> cross3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

void require_same_kind(Manifold a, Manifold b, const char* where) {
  if (a != b) throw std::invalid_argument(std::string(where) + ": manifold kind mismatch");
}

void require_attached(const BasePoint& x, const BaseTangent& v, const char* where) {
  require_same_kind(x.kind, v.at.kind, where);
  for (int i = 0; i < 3; ++i)
    if (std::abs(x.c[i] - v.at.c[i]) > kOnManifoldTol)
      throw std::invalid_argument(std::string(where) + ": tangent not attached at the given point");
}

}  // namespace

int dimension(Manifold kind) { return kind == Manifold::RealLine ? 1 : 2; }

double constant_curvature(Manifold kind) {
  switch (kind) {
    case Manifold::RealLine: return 0.0;
    case Manifold::Sphere2: return 1.0;
    case Manifold::Hyperbolic2: return -1.0;
  }
  return 0.0;
}

const char* name(Manifold kind) {
  switch (kind) {
    case Manifold::RealLine: return "real_line";
    case Manifold::Sphere2: return "sphere2";
    case Manifold::Hyperbolic2: return "hyperbolic2";
  }
  return "?";
}

BasePoint BasePoint::line(double x) {
  if (!std::isfinite(x)) throw std::domain_error("BasePoint::line: non-finite coordinate");
  return BasePoint{Manifold::RealLine, {x, 0.0, 0.0}};
}

BasePoint BasePoint::sphere(double x, double y, double z) {
  std::array<double, 3> c{x, y, z};
  double n = norm3(c);
  if (!std::isfinite(n) || std::abs(n - 1.0) > kOnManifoldTol)
    throw std::domain_error("BasePoint::sphere: coordinates are not a unit vector");
  // renormalize away the sub-tolerance drift
  for (double& ci : c) ci /= n;
  return BasePoint{Manifold::Sphere2, c};
}

BasePoint BasePoint::half_plane(double u, double w) {
  if (!std::isfinite(u) || !std::isfinite(w) || w <= 0.0)
    throw std::domain_error("BasePoint::half_plane: requires finite u and w > 0");
  return BasePoint{Manifold::Hyperbolic2, {u, w, 0.0}};
}

BaseTangent BaseTangent::zero(const BasePoint& x) { return BaseTangent{x, {0.0, 0.0, 0.0}}; }

BaseTangent BaseTangent::make(const BasePoint& x, std::array<double, 3> components) {
  if (x.kind == Manifold::RealLine) {
    components[1] = components[2] = 0.0;
  } else if (x.kind == Manifold::Hyperbolic2) {
    components[2] = 0.0;
  } else {
    double d = dot3(x.c, components);
    double scale = 1.0 + norm3(components);
    if (std::abs(d) > kOnManifoldTol * scale)
      throw std::domain_error("BaseTangent::make: sphere tangent is not orthogonal to the point");
    for (int i = 0; i < 3; ++i) components[i] -= d * x.c[i];
  }
  return BaseTangent{x, components};
}

std::vector<IsometryGenerator> isometry_generators(Manifold kind) {
  std::vector<IsometryGenerator> out;
  int n = kind == Manifold::RealLine ? 1 : 3;
  for (int i = 0; i < n; ++i) out.push_back({kind, i});
  return out;
}

double metric_dot(const BasePoint& x, const BaseTangent& u, const BaseTangent& v) {
  require_attached(x, u, "metric_dot");
  require_attached(x, v, "metric_dot");
  switch (x.kind) {
    case Manifold::RealLine:
      return u.c[0] * v.c[0];
    case Manifold::Sphere2:
      return dot3(u.c, v.c);
    case Manifold::Hyperbolic2: {
      double w = x.c[1];
      return (u.c[0] * v.c[0] + u.c[1] * v.c[1]) / (w * w);
    }
  }
  return 0.0;
}

double metric_norm(const BasePoint& x, const BaseTangent& v) {
  return std::sqrt(metric_dot(x, v, v));
}

double base_distance(const BasePoint& x, const BasePoint& y) {
  require_same_kind(x.kind, y.kind, "base_distance");
  switch (x.kind) {
    case Manifold::RealLine:
      return std::abs(x.c[0] - y.c[0]);
    case Manifold::Sphere2: {
      double c = dot3(x.c, y.c);
      double s = norm3(cross3(x.c, y.c));
      return std::atan2(s, c);
    }
    case Manifold::Hyperbolic2: {
      double du = x.c[0] - y.c[0], dw = x.c[1] - y.c[1];
      double q = (du * du + dw * dw) / (4.0 * x.c[1] * y.c[1]);
      return 2.0 * std::asinh(std::sqrt(q));
    }
  }
  return 0.0;
}

FlowState base_geodesic_flow(const BasePoint& x, const BaseTangent& v, double t) {
  require_attached(x, v, "base_geodesic_flow");
  switch (x.kind) {
    case Manifold::RealLine: {
      BasePoint p = BasePoint::line(x.c[0] + t * v.c[0]);
      return {p, BaseTangent{p, {v.c[0], 0.0, 0.0}}};
    }
    case Manifold::Sphere2: {
      double speed = norm3(v.c);
      double a = speed * t;
      if (speed < 1e-300 || a == 0.0) {
        BasePoint p = x;
        return {p, BaseTangent{p, v.c}};
      }
      double ca = std::cos(a), sa = std::sin(a);
      std::array<double, 3> dir{v.c[0] / speed, v.c[1] / speed, v.c[2] / speed};
      std::array<double, 3> pc, vc;
      for (int i = 0; i < 3; ++i) {
        pc[i] = ca * x.c[i] + sa * dir[i];
        vc[i] = speed * (ca * dir[i] - sa * x.c[i]);
      }
      double n = norm3(pc);
      for (double& pi : pc) pi /= n;
      BasePoint p{Manifold::Sphere2, pc};
      double drift = dot3(pc, vc);
      for (int i = 0; i < 3; ++i) vc[i] -= drift * pc[i];
      return {p, BaseTangent{p, vc}};
    }
    case Manifold::Hyperbolic2: {
      double u0 = x.c[0], w0 = x.c[1];
      double eu = std::hypot(v.c[0], v.c[1]);
      double speed = eu / w0;
      if (speed < 1e-300) {
        BasePoint p = x;
        return {p, BaseTangent{p, v.c}};
      }
      double phi = std::atan2(v.c[1], v.c[0]);
      double th = 0.5 * (phi - std::numbers::pi / 2.0);
      double st = std::sin(th), ct = std::cos(th);
      double L = speed * t;
      double u, w, duL, dwL;  // duL, dwL: chart velocity of the unit-speed curve
      if (L >= 0.0) {
        // scale by 1/s^2 so the formulas stay finite as s = e^L grows
        double q = std::exp(-L);
        double p2 = q * q * ct * ct + st * st;
        w = w0 * q / p2;
        u = u0 + w0 * st * ct * (q * q - 1.0) / p2;
        duL = -2.0 * w0 * st * ct * q * q / (p2 * p2);
        dwL = w0 * (q * q * q * ct * ct - q * st * st) / (p2 * p2);
      } else {
        double s = std::exp(L);
        double p1 = ct * ct + s * s * st * st;
        w = w0 * s / p1;
        u = u0 + w0 * st * ct * (1.0 - s * s) / p1;
        duL = -2.0 * w0 * st * ct * s * s / (p1 * p1);
        dwL = w0 * s * (ct * ct - s * s * st * st) / (p1 * p1);
      }
      if (!std::isfinite(u) || !std::isfinite(w) || w <= 0.0)
        throw std::domain_error("base_geodesic_flow: half-plane endpoint out of range");
      BasePoint p = BasePoint::half_plane(u, w);
      return {p, BaseTangent{p, {speed * duL, speed * dwL, 0.0}}};
    }
  }
  throw std::logic_error("unreachable");
}

BasePoint base_exp(const BasePoint& x, const BaseTangent& v) {
  return base_geodesic_flow(x, v, 1.0).point;
}

BaseTangent base_log(const BasePoint& x, const BasePoint& y) {
  require_same_kind(x.kind, y.kind, "base_log");
  switch (x.kind) {
    case Manifold::RealLine:
      return BaseTangent{x, {y.c[0] - x.c[0], 0.0, 0.0}};
    case Manifold::Sphere2: {
      double c = dot3(x.c, y.c);
      std::array<double, 3> perp;
      for (int i = 0; i < 3; ++i) perp[i] = y.c[i] - c * x.c[i];
      double pn = norm3(perp);
      if (pn < 1e-12) {
        if (c > 0.0) return BaseTangent::zero(x);
        throw CutLocusError("base_log: antipodal points on the sphere");
      }
      double theta = std::atan2(pn, c);
      std::array<double, 3> vc;
      for (int i = 0; i < 3; ++i) vc[i] = perp[i] * (theta / pn);
      return BaseTangent{x, vc};
    }
    case Manifold::Hyperbolic2: {
      double ux = x.c[0], wx = x.c[1], uy = y.c[0], wy = y.c[1];
      double du = ux - uy, dw = wx - wy;
      double q2 = du * du + dw * dw;
      if (q2 == 0.0) return BaseTangent::zero(x);
      double d = 2.0 * std::asinh(std::sqrt(q2 / (4.0 * wx * wy)));
      double sh = std::sinh(d);
      // -d * grad_x d, written with the chart gradient of the distance
      double lu = d * wx * (uy - ux) / (wy * sh);
      double lw = d * (2.0 * wx * (wy - wx) + q2) / (2.0 * wy * sh);
      return BaseTangent{x, {lu, lw, 0.0}};
    }
  }
  throw std::logic_error("unreachable");
}

BaseTangent killing_field(const IsometryGenerator& xi, const BasePoint& x) {
  require_same_kind(xi.kind, x.kind, "killing_field");
  switch (x.kind) {
    case Manifold::RealLine:
      return BaseTangent{x, {1.0, 0.0, 0.0}};
    case Manifold::Sphere2: {
      std::array<double, 3> axis{};
      axis[xi.index] = 1.0;
      return BaseTangent{x, cross3(axis, x.c)};
    }
    case Manifold::Hyperbolic2: {
      double u = x.c[0], w = x.c[1];
      switch (xi.index) {
        case 0: return BaseTangent{x, {1.0, 0.0, 0.0}};
        case 1: return BaseTangent{x, {u, w, 0.0}};
        case 2: return BaseTangent{x, {u * u - w * w, 2.0 * u * w, 0.0}};
      }
      break;
    }
  }
  throw std::invalid_argument("killing_field: bad generator index");
}

namespace {

std::array<double, 3> rodrigues(int axis, double t, const std::array<double, 3>& p) {
  std::array<double, 3> k{};
  k[axis] = 1.0;
  double ct = std::cos(t), st = std::sin(t);
  std::array<double, 3> kxp = cross3(k, p);
  double kdp = dot3(k, p);
  std::array<double, 3> out;
  for (int i = 0; i < 3; ++i) out[i] = ct * p[i] + st * kxp[i] + (1.0 - ct) * kdp * k[i];
  return out;
}

// z -> z / (1 - t z) on the upper half-plane.  With a = 1 - t u, b = -t w,
// the image is ((u a + w b) / |1-tz|^2, w / |1-tz|^2); the imaginary
// numerator collapses to w exactly.
std::array<double, 2> moebius_special(double t, double u, double w) {
  double a = 1.0 - t * u, b = -t * w;
  double den = a * a + b * b;
  return {(u * a + w * b) / den, w / den};
}

}  // namespace

BasePoint isometry_flow(const IsometryGenerator& xi, double t, const BasePoint& x) {
  require_same_kind(xi.kind, x.kind, "isometry_flow");
  switch (x.kind) {
    case Manifold::RealLine:
      return BasePoint::line(x.c[0] + t);
    case Manifold::Sphere2: {
      auto p = rodrigues(xi.index, t, x.c);
      double n = norm3(p);
      return BasePoint{Manifold::Sphere2, {p[0] / n, p[1] / n, p[2] / n}};
    }
    case Manifold::Hyperbolic2: {
      double u = x.c[0], w = x.c[1];
      switch (xi.index) {
        case 0: return BasePoint::half_plane(u + t, w);
        case 1: return BasePoint::half_plane(std::exp(t) * u, std::exp(t) * w);
        case 2: {
          auto z = moebius_special(t, u, w);
          return BasePoint::half_plane(z[0], z[1]);
        }
      }
      break;
    }
  }
  throw std::invalid_argument("isometry_flow: bad generator index");
}

BaseTangent isometry_flow(const IsometryGenerator& xi, double t, const BaseTangent& v) {
  BasePoint moved = isometry_flow(xi, t, v.at);
  switch (v.at.kind) {
    case Manifold::RealLine:
      return BaseTangent{moved, v.c};
    case Manifold::Sphere2: {
      auto vv = rodrigues(xi.index, t, v.c);
      double drift = dot3(moved.c, vv);
      for (int i = 0; i < 3; ++i) vv[i] -= drift * moved.c[i];
      return BaseTangent{moved, vv};
    }
    case Manifold::Hyperbolic2: {
      double u = v.at.c[0], w = v.at.c[1];
      switch (xi.index) {
        case 0:
          return BaseTangent{moved, v.c};
        case 1:
          return BaseTangent{moved, {std::exp(t) * v.c[0], std::exp(t) * v.c[1], 0.0}};
        case 2: {
          // derivative of z / (1 - t z) is 1 / (1 - t z)^2; complex-multiply v by it
          double a = 1.0 - t * u, b = -t * w;
          double den2 = a * a + b * b;
          double ra = (a * a - b * b) / (den2 * den2);  // Re 1/(1-tz)^2
          double rb = (-2.0 * a * b) / (den2 * den2);   // Im 1/(1-tz)^2
          double nu = ra * v.c[0] - rb * v.c[1];
          double nw = rb * v.c[0] + ra * v.c[1];
          return BaseTangent{moved, {nu, nw, 0.0}};
        }
      }
      break;
    }
  }
  throw std::invalid_argument("isometry_flow: bad generator index");
}

std::vector<BaseTangent> tangent_frame(const BasePoint& x) {
  switch (x.kind) {
    case Manifold::RealLine:
      return {BaseTangent{x, {1.0, 0.0, 0.0}}};
    case Manifold::Sphere2: {
      // pick the coordinate axis least aligned with x, orthonormalize
      int k = 0;
      for (int i = 1; i < 3; ++i)
        if (std::abs(x.c[i]) < std::abs(x.c[k])) k = i;
      std::array<double, 3> a{};
      a[k] = 1.0;
      double d = dot3(a, x.c);
      for (int i = 0; i < 3; ++i) a[i] -= d * x.c[i];
      double n = norm3(a);
      for (double& ai : a) ai /= n;
      auto b = cross3(x.c, a);
      return {BaseTangent{x, a}, BaseTangent{x, b}};
    }
    case Manifold::Hyperbolic2: {
      double w = x.c[1];
      return {BaseTangent{x, {w, 0.0, 0.0}}, BaseTangent{x, {0.0, w, 0.0}}};
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace warpgeo
