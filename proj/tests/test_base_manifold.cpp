#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "warpgeo/base_manifold.hpp"
#include "warpgeo/errors.hpp"

using namespace warpgeo;

namespace {
constexpr double kPi = std::numbers::pi;

BaseTangent random_tangent(const BasePoint& x, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  auto frame = tangent_frame(x);
  std::array<double, 3> c{};
  for (const auto& e : frame) {
    double a = g(rng);
    for (int i = 0; i < 3; ++i) c[i] += a * e.c[i];
  }
  return BaseTangent::make(x, c);
}

BasePoint random_point(Manifold kind, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  switch (kind) {
    case Manifold::RealLine:
      return BasePoint::line(g(rng));
    case Manifold::Sphere2: {
      double a = g(rng), b = g(rng), c = g(rng);
      double n = std::sqrt(a * a + b * b + c * c);
      return BasePoint::sphere(a / n, b / n, c / n);
    }
    case Manifold::Hyperbolic2:
      return BasePoint::half_plane(g(rng), std::exp(0.7 * g(rng)));
  }
  return BasePoint::line(0.0);
}
}  // namespace

TEST_CASE("metric_dot on the three manifolds") {
  auto xs = BasePoint::sphere(0, 0, 1);
  auto u = BaseTangent::make(xs, {1, 0, 0});
  CHECK(metric_dot(xs, u, u) == doctest::Approx(1.0).epsilon(1e-14));

  auto xh1 = BasePoint::half_plane(0, 1);
  auto e1 = BaseTangent::make(xh1, {1, 0, 0});
  CHECK(metric_dot(xh1, e1, e1) == doctest::Approx(1.0).epsilon(1e-14));

  auto xh2 = BasePoint::half_plane(0, 2);
  auto e2 = BaseTangent::make(xh2, {1, 0, 0});
  // hand oracle: 1/w^2 at w = 2
  CHECK(metric_dot(xh2, e2, e2) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("base_distance examples") {
  CHECK(base_distance(BasePoint::sphere(0, 0, 1), BasePoint::sphere(1, 0, 0)) ==
        doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(base_distance(BasePoint::half_plane(0, 1), BasePoint::half_plane(0, std::exp(1.0))) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(base_distance(BasePoint::line(3), BasePoint::line(-1)) == doctest::Approx(4.0));
}

TEST_CASE("base_exp examples") {
  CHECK(base_exp(BasePoint::line(1), BaseTangent::make(BasePoint::line(1), {2, 0, 0})).c[0] ==
        doctest::Approx(3.0));

  auto xs = BasePoint::sphere(0, 0, 1);
  auto quarter = base_exp(xs, BaseTangent::make(xs, {kPi / 2, 0, 0}));
  CHECK(quarter.c[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(quarter.c[2]) < 1e-12);

  auto xh = BasePoint::half_plane(0, 1);
  auto up = base_exp(xh, BaseTangent::make(xh, {0, 1, 0}));
  CHECK(up.c[0] == doctest::Approx(0.0));
  CHECK(up.c[1] == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("half-plane exponential agrees with a geodesic ODE integration") {
  // u'' = 2 u' w' / w,  w'' = (w'^2 - u'^2) / w
  auto rhs = [](const std::array<double, 4>& y) -> std::array<double, 4> {
    double w = y[1], ud = y[2], wd = y[3];
    return {ud, wd, 2.0 * ud * wd / w, (wd * wd - ud * ud) / w};
  };
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    double u0 = g(rng), w0 = std::exp(0.5 * g(rng));
    double vu = g(rng), vw = g(rng);
    auto x = BasePoint::half_plane(u0, w0);
    auto v = BaseTangent::make(x, {vu, vw, 0});
    auto end = base_geodesic_flow(x, v, 1.0);
    auto ode = oracles::rk4<4>(rhs, {u0, w0, vu, vw}, 1.0, 4000);
    CHECK(end.point.c[0] == doctest::Approx(ode[0]).epsilon(1e-8));
    CHECK(end.point.c[1] == doctest::Approx(ode[1]).epsilon(1e-8));
    CHECK(end.velocity.c[0] == doctest::Approx(ode[2]).epsilon(1e-7));
    CHECK(end.velocity.c[1] == doctest::Approx(ode[3]).epsilon(1e-7));
  }
}

TEST_CASE("base_log identities") {
  std::mt19937_64 rng(11);
  for (Manifold kind : {Manifold::RealLine, Manifold::Sphere2, Manifold::Hyperbolic2}) {
    auto x = random_point(kind, rng);
    auto zero = base_log(x, x);
    CHECK(metric_norm(x, zero) == doctest::Approx(0.0));
  }
  CHECK(base_log(BasePoint::line(1), BasePoint::line(4)).c[0] == doctest::Approx(3.0));
}

TEST_CASE("exp/log round trip inside the injectivity domain") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (Manifold kind : {Manifold::RealLine, Manifold::Sphere2, Manifold::Hyperbolic2}) {
    for (int trial = 0; trial < 200; ++trial) {
      auto x = random_point(kind, rng);
      auto v = random_tangent(x, rng, 0.8);
      if (kind == Manifold::Sphere2) {
        double n = metric_norm(x, v);
        if (n >= 0.98 * kPi) continue;
      }
      auto y = base_exp(x, v);
      auto back = base_log(x, y);
      double err = 0.0;
      for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(back.c[i] - v.c[i]));
      CHECK(err < 1e-9);
      CHECK(metric_norm(x, back) == doctest::Approx(base_distance(x, y)).epsilon(1e-10));
    }
  }
}

TEST_CASE("sphere antipodal log raises a cut-locus error") {
  auto x = BasePoint::sphere(0, 0, 1);
  auto y = BasePoint::sphere(0, 0, -1);
  CHECK_THROWS_AS(base_log(x, y), CutLocusError);
}

TEST_CASE("killing fields") {
  auto e3 = IsometryGenerator{Manifold::Sphere2, 2};
  auto x = BasePoint::sphere(1, 0, 0);
  auto k = killing_field(e3, x);
  CHECK(k.c[0] == doctest::Approx(0.0));
  CHECK(k.c[1] == doctest::Approx(1.0));
  CHECK(k.c[2] == doctest::Approx(0.0));

  auto pole = BasePoint::sphere(0, 0, 1);
  CHECK(metric_norm(pole, killing_field(e3, pole)) == doctest::Approx(0.0));

  auto line_gen = IsometryGenerator{Manifold::RealLine, 0};
  CHECK(killing_field(line_gen, BasePoint::line(17.0)).c[0] == doctest::Approx(1.0));
}

TEST_CASE("isometry flows preserve distances") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> small(-0.3, 0.3);
  for (Manifold kind : {Manifold::RealLine, Manifold::Sphere2, Manifold::Hyperbolic2}) {
    for (const auto& gen : isometry_generators(kind)) {
      for (int trial = 0; trial < 20; ++trial) {
        auto x = random_point(kind, rng);
        auto y = random_point(kind, rng);
        double t = small(rng);
        double before = base_distance(x, y);
        double after = base_distance(isometry_flow(gen, t, x), isometry_flow(gen, t, y));
        CHECK(after == doctest::Approx(before).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("killing property: flows preserve the metric under finite differences") {
  std::mt19937_64 rng(41);
  for (Manifold kind : {Manifold::RealLine, Manifold::Sphere2, Manifold::Hyperbolic2}) {
    for (const auto& gen : isometry_generators(kind)) {
      for (int trial = 0; trial < 10; ++trial) {
        auto x = random_point(kind, rng);
        auto u = random_tangent(x, rng, 1.0);
        auto v = random_tangent(x, rng, 1.0);
        double g0 = metric_dot(x, u, v);
        double h = 1e-5;
        auto xf = isometry_flow(gen, h, x);
        double gf = metric_dot(xf, isometry_flow(gen, h, u), isometry_flow(gen, h, v));
        CHECK(std::abs(gf - g0) / (1.0 + std::abs(g0)) < 1e-8);
      }
    }
  }
}

TEST_CASE("killing_field is the derivative of the flow") {
  std::mt19937_64 rng(43);
  for (Manifold kind : {Manifold::RealLine, Manifold::Sphere2, Manifold::Hyperbolic2}) {
    for (const auto& gen : isometry_generators(kind)) {
      auto x = random_point(kind, rng);
      auto k = killing_field(gen, x);
      double h = 1e-6;
      auto plus = isometry_flow(gen, h, x);
      auto minus = isometry_flow(gen, -h, x);
      for (int i = 0; i < 3; ++i) {
        double fd = (plus.c[i] - minus.c[i]) / (2.0 * h);
        CHECK(fd == doctest::Approx(k.c[i]).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("tangency invariants hold after operations") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = random_point(Manifold::Sphere2, rng);
    auto v = random_tangent(x, rng, 2.0);
    auto flow = base_geodesic_flow(x, v, 0.7);
    double dot = 0.0, norm = 0.0;
    for (int i = 0; i < 3; ++i) {
      dot += flow.point.c[i] * flow.velocity.c[i];
      norm += flow.point.c[i] * flow.point.c[i];
    }
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-12);
    CHECK(std::abs(dot) < 1e-12 * (1.0 + metric_norm(flow.point, flow.velocity)));
  }
}

TEST_CASE("invalid constructions are rejected") {
  CHECK_THROWS_AS(BasePoint::sphere(1, 1, 0), std::domain_error);
  CHECK_THROWS_AS(BasePoint::half_plane(0, -1), std::domain_error);
  CHECK_THROWS_AS(BaseTangent::make(BasePoint::sphere(0, 0, 1), {0, 0, 1}), std::domain_error);
}
