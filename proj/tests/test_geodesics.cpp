#include <doctest.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "oracles.hpp"
#include "warpgeo/errors.hpp"
#include "warpgeo/geodesics.hpp"

using namespace warpgeo;

namespace {

constexpr double kVmfI1At1 = 0.31303528549933130;

BasePoint default_location(const ModelSpec& m) {
  switch (m.base) {
    case Manifold::RealLine: return BasePoint::line(0.0);
    case Manifold::Sphere2: return BasePoint::sphere(0.0, 0.0, 1.0);
    case Manifold::Hyperbolic2: return BasePoint::half_plane(0.0, 1.0);
  }
  return BasePoint::line(0.0);
}

WarpedTangent random_warped_tangent(const ModelSpec& m, const WarpedPoint& z,
                                    std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  std::array<double, 3> c{};
  for (const auto& e : tangent_frame(z.location)) {
    double a = g(rng);
    for (int i = 0; i < 3; ++i) c[i] += a * e.c[i];
  }
  return WarpedTangent{BaseTangent::make(z.location, c), g(rng)};
}

WarpedPoint random_warped_point(const ModelSpec& m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  BasePoint loc = default_location(m);
  switch (m.base) {
    case Manifold::RealLine: loc = BasePoint::line(g(rng)); break;
    case Manifold::Sphere2: {
      double a = g(rng), b = g(rng), c = g(rng);
      double n = std::sqrt(a * a + b * b + c * c);
      loc = BasePoint::sphere(a / n, b / n, c / n);
      break;
    }
    case Manifold::Hyperbolic2:
      loc = BasePoint::half_plane(0.8 * g(rng), std::exp(0.5 * g(rng)));
      break;
  }
  return WarpedPoint(loc, std::exp(0.5 * g(rng)));
}

double chart_gap(const WarpedPoint& a, const WarpedPoint& b) {
  double m = std::abs(a.sigma - b.sigma);
  for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(a.location.c[i] - b.location.c[i]));
  return m;
}

const ModelSpec kModels[] = {ModelSpec::normal_line(), ModelSpec::von_mises_fisher_s2(),
                             ModelSpec::riemannian_gaussian_h2()};

}  // namespace

TEST_CASE("energy values") {
  auto normal = ModelSpec::normal_line();
  WarpedPoint z(BasePoint::line(0.0), 1.0);
  CHECK(energy(normal, z, WarpedTangent{BaseTangent::zero(z.location), 1.0}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(energy(normal, z, WarpedTangent{BaseTangent::make(z.location, {1, 0, 0}), 0.0}) ==
        doctest::Approx(0.5).epsilon(1e-14));

  auto vmf = ModelSpec::von_mises_fisher_s2();
  WarpedPoint zv(BasePoint::sphere(0, 0, 1), 1.0);
  WarpedTangent unit{BaseTangent::make(zv.location, {1, 0, 0}), 0.0};
  CHECK(energy(vmf, zv, unit) == doctest::Approx(kVmfI1At1).epsilon(1e-12));

  CHECK(energy(normal, z, WarpedTangent::zero(z)) == 0.0);
}

TEST_CASE("moment values") {
  auto normal = ModelSpec::normal_line();
  WarpedPoint z(BasePoint::line(0.0), 1.0);
  auto xi = isometry_generators(Manifold::RealLine)[0];
  CHECK(moment(normal, z, WarpedTangent{BaseTangent::make(z.location, {1, 0, 0}), 0.0}, xi) ==
        doctest::Approx(0.5).epsilon(1e-14));

  // vertical velocities carry no moment
  for (const auto& m : kModels) {
    WarpedPoint zz(default_location(m), 1.3);
    WarpedTangent vert{BaseTangent::zero(zz.location), 0.7};
    for (const auto& gen : isometry_generators(m.base))
      CHECK(moment(m, zz, vert, gen) == doctest::Approx(0.0));
  }

  // the rotation about the mean direction vanishes at the pole
  auto vmf = ModelSpec::von_mises_fisher_s2();
  WarpedPoint pole(BasePoint::sphere(0, 0, 1), 1.0);
  auto e3 = IsometryGenerator{Manifold::Sphere2, 2};
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    auto w = random_warped_tangent(vmf, pole, rng, 1.0);
    CHECK(moment(vmf, pole, w, e3) == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("moment is linear in the velocity") {
  auto vmf = ModelSpec::von_mises_fisher_s2();
  WarpedPoint z(BasePoint::sphere(1, 0, 0), 0.8);
  std::mt19937_64 rng(5);
  auto a = random_warped_tangent(vmf, z, rng, 1.0);
  auto b = random_warped_tangent(vmf, z, rng, 1.0);
  WarpedTangent sum{BaseTangent::make(z.location,
                                      {a.location_part.c[0] + 2 * b.location_part.c[0],
                                       a.location_part.c[1] + 2 * b.location_part.c[1],
                                       a.location_part.c[2] + 2 * b.location_part.c[2]}),
                    a.sigma_part + 2 * b.sigma_part};
  for (const auto& gen : isometry_generators(Manifold::Sphere2)) {
    CHECK(moment(vmf, z, sum, gen) ==
          doctest::Approx(moment(vmf, z, a, gen) + 2 * moment(vmf, z, b, gen)).epsilon(1e-12));
  }
}

TEST_CASE("normal vertical geodesic is sigma(t) = e^t") {
  auto normal = ModelSpec::normal_line();
  WarpedPoint z(BasePoint::line(0.0), 1.0);
  WarpedTangent up{BaseTangent::zero(z.location), 1.0};
  auto path = geodesic_closed_form(normal, z, up);
  for (double t : {0.25, 1.0, 2.0, 4.0}) {
    auto [p, v] = path.evaluate(t);
    CHECK(p.sigma == doctest::Approx(std::exp(t)).epsilon(1e-9));
    CHECK(p.location.c[0] == doctest::Approx(0.0));
  }
  // oracle agrees to 1e-9
  auto [po, vo] = geodesic_ode_oracle(normal, z, up, 1.0);
  CHECK(po.sigma == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("zero initial velocity gives the constant path") {
  for (const auto& m : kModels) {
    WarpedPoint z(default_location(m), 0.9);
    auto path = geodesic_closed_form(m, z, WarpedTangent::zero(z));
    CHECK(path.energy() == 0.0);
    auto [p, v] = path.evaluate(3.0);
    CHECK(chart_gap(p, z) == 0.0);
    CHECK(energy(m, p, v) == 0.0);
  }
}

TEST_CASE("closed form matches the ODE oracle on random starts") {
  std::mt19937_64 rng(101);
  for (const auto& m : kModels) {
    for (int trial = 0; trial < 12; ++trial) {
      WarpedPoint z = random_warped_point(m, rng);
      WarpedTangent w = random_warped_tangent(m, z, rng, 0.6);
      auto path = geodesic_closed_form(m, z, w);
      for (double t : {0.5, 1.0, 2.5, 5.0}) {
        std::optional<std::pair<WarpedPoint, WarpedTangent>> a, b;
        try {
          a = path.evaluate(t);
          b = geodesic_ode_oracle(m, z, w, t);
        } catch (const BoundaryEscapeError&) {
          break;  // vMF vertical-dominated draw; covered by the escape tests
        }
        CHECK(chart_gap(a->first, b->first) < 1e-6);
      }
    }
  }
}

TEST_CASE("oracle conserves energy and moments") {
  std::mt19937_64 rng(211);
  for (const auto& m : kModels) {
    for (int trial = 0; trial < 8; ++trial) {
      WarpedPoint z = random_warped_point(m, rng);
      WarpedTangent w = random_warped_tangent(m, z, rng, 0.7);
      double e0 = energy(m, z, w);
      auto gens = isometry_generators(m.base);
      std::vector<double> j0;
      for (const auto& g : gens) j0.push_back(moment(m, z, w, g));
      for (double t : {1.0, 3.0, 5.0}) {
        std::optional<std::pair<WarpedPoint, WarpedTangent>> st;
        try {
          st = geodesic_ode_oracle(m, z, w, t);
        } catch (const BoundaryEscapeError&) {
          break;
        }
        double e = energy(m, st->first, st->second);
        CHECK(std::abs(e - e0) / ((1.0 + std::abs(e0)) * t) < 1e-8);
        for (std::size_t g = 0; g < gens.size(); ++g) {
          double j = moment(m, st->first, st->second, gens[g]);
          CHECK(std::abs(j - j0[g]) < 1e-8 * (1.0 + std::abs(j0[g])) * t);
        }
      }
    }
  }
}

TEST_CASE("conservation along the closed-form path") {
  std::mt19937_64 rng(307);
  for (const auto& m : kModels) {
    WarpedPoint z = random_warped_point(m, rng);
    WarpedTangent w = random_warped_tangent(m, z, rng, 0.8);
    auto path = geodesic_closed_form(m, z, w);
    double e0 = path.energy();
    auto gens = isometry_generators(m.base);
    std::vector<double> j0;
    for (const auto& g : gens) j0.push_back(moment(m, z, w, g));
    for (double t : {0.7, 1.9, 4.2}) {
      auto [p, v] = path.evaluate(t);
      CHECK(energy(m, p, v) == doctest::Approx(e0).epsilon(1e-8));
      for (std::size_t g = 0; g < gens.size(); ++g)
        CHECK(std::abs(moment(m, p, v, gens[g]) - j0[g]) < 1e-8 * (1.0 + std::abs(j0[g])));
    }
  }
}

TEST_CASE("speed law: base speed scales with I1(sigma0)/I1(sigma)") {
  std::mt19937_64 rng(401);
  for (const auto& m : kModels) {
    WarpedPoint z = random_warped_point(m, rng);
    WarpedTangent w = random_warped_tangent(m, z, rng, 0.5);
    double v0 = model_norm(m, z.location, w.location_part);
    if (v0 == 0.0) continue;
    auto path = geodesic_closed_form(m, z, w);
    double i1_0 = warp_coefficients(m, z.sigma).i1;
    for (double t : {0.5, 1.5, 3.0}) {
      auto [p, v] = path.evaluate(t);
      double expected = v0 * i1_0 / warp_coefficients(m, p.sigma).i1;
      CHECK(model_norm(m, p.location, v.location_part) ==
            doctest::Approx(expected).epsilon(1e-8));
    }
  }
}

TEST_CASE("potential confinement and turning points") {
  auto normal = ModelSpec::normal_line();
  WarpedPoint z(BasePoint::line(0.0), 1.0);
  WarpedTangent w{BaseTangent::make(z.location, {1.0, 0, 0}), 0.8};
  auto path = geodesic_closed_form(normal, z, w);
  REQUIRE(path.turning_points().size() == 1);
  auto profile = path.potential();
  // V at the turning point equals E
  double turn = path.turning_points()[0];
  CHECK(profile.V(turn) == doctest::Approx(profile.energy).epsilon(1e-10));
  for (double t = 0.0; t <= 6.0; t += 0.25) {
    auto [p, v] = path.evaluate(t);
    CHECK(profile.V(p.sigma) <= profile.energy + 1e-12);
  }
}

TEST_CASE("warped_exp basics and affine consistency") {
  std::mt19937_64 rng(509);
  for (const auto& m : kModels) {
    WarpedPoint z = random_warped_point(m, rng);
    CHECK(chart_gap(warped_exp(m, z, WarpedTangent::zero(z)), z) == 0.0);

    WarpedTangent w = random_warped_tangent(m, z, rng, 0.4);
    auto path = geodesic_closed_form(m, z, w);
    for (double t : {0.3, 0.9}) {
      WarpedTangent scaled{BaseTangent{z.location,
                                       {t * w.location_part.c[0], t * w.location_part.c[1],
                                        t * w.location_part.c[2]}},
                           t * w.sigma_part};
      CHECK(chart_gap(warped_exp(m, z, scaled), path.evaluate(t).first) < 1e-9);
    }
  }
}

TEST_CASE("warped_log: identity, vertical pairs and round trips") {
  std::mt19937_64 rng(601);
  for (const auto& m : kModels) {
    WarpedPoint z = random_warped_point(m, rng);
    auto lg = warped_log(m, z, z);
    CHECK(energy(m, z, lg) == 0.0);

    // vertical pair: purely vertical tangent of length |int sqrt(I0)|
    WarpedPoint z2(z.location, z.sigma * 2.3);
    auto vlog = warped_log(m, z, z2);
    CHECK(model_norm(m, z.location, vlog.location_part) == doctest::Approx(0.0));
    double expected = std::abs(vertical_r(m, z.sigma, z2.sigma));
    CHECK(std::sqrt(energy(m, z, vlog)) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(chart_gap(warped_exp(m, z, vlog), z2) < 1e-9);

    // round trips on random nearby pairs
    for (int trial = 0; trial < 6; ++trial) {
      WarpedTangent w = random_warped_tangent(m, z, rng, 0.5);
      WarpedPoint target = warped_exp(m, z, w);
      WarpedTangent rec = warped_log(m, z, target);
      CHECK(chart_gap(warped_exp(m, z, rec), target) < 1e-8);
      double gap = 0.0;
      gap = std::max(gap, std::abs(rec.sigma_part - w.sigma_part));
      for (int i = 0; i < 3; ++i)
        gap = std::max(gap, std::abs(rec.location_part.c[i] - w.location_part.c[i]));
      CHECK(gap < 1e-7);
    }
  }
}

TEST_CASE("rao distance: Poincare closed form for the normal model") {
  auto normal = ModelSpec::normal_line();
  std::mt19937_64 rng(701);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    double x1 = 2.0 * g(rng), x2 = 2.0 * g(rng);
    double s1 = std::exp(0.7 * g(rng)), s2 = std::exp(0.7 * g(rng));
    double lib = rao_distance(normal, WarpedPoint(BasePoint::line(x1), s1),
                              WarpedPoint(BasePoint::line(x2), s2));
    double ref = oracles::poincare_normal_distance(x1, s1, x2, s2);
    CHECK(lib == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("rao distance: metric axioms") {
  std::mt19937_64 rng(809);
  for (const auto& m : kModels) {
    WarpedPoint a = random_warped_point(m, rng);
    CHECK(rao_distance(m, a, a) == 0.0);
    for (int trial = 0; trial < 5; ++trial) {
      WarpedPoint b = random_warped_point(m, rng);
      WarpedPoint c = random_warped_point(m, rng);
      double ab = rao_distance(m, a, b);
      double ba = rao_distance(m, b, a);
      CHECK(ab == doctest::Approx(ba).epsilon(1e-7));
      CHECK(ab > 0.0);
      double ac = rao_distance(m, a, c);
      double cb = rao_distance(m, c, b);
      CHECK(ab <= ac + cb + 1e-8);
    }
  }

  auto normal = ModelSpec::normal_line();
  CHECK(rao_distance(normal, WarpedPoint(BasePoint::line(0), 1.0),
                     WarpedPoint(BasePoint::line(0), std::exp(1.0))) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::sqrt(energy(normal, WarpedPoint(BasePoint::line(0), 1.0),
                         warped_log(normal, WarpedPoint(BasePoint::line(0), 1.0),
                                    WarpedPoint(BasePoint::line(2), 0.5)))) ==
        doctest::Approx(rao_distance(normal, WarpedPoint(BasePoint::line(0), 1.0),
                                     WarpedPoint(BasePoint::line(2), 0.5)))
            .epsilon(1e-7));
}

TEST_CASE("completeness: no escape for the complete models") {
  std::mt19937_64 rng(907);
  for (const auto& m : {ModelSpec::normal_line(), ModelSpec::riemannian_gaussian_h2()}) {
    for (int trial = 0; trial < 5; ++trial) {
      WarpedPoint z = random_warped_point(m, rng);
      WarpedTangent w = random_warped_tangent(m, z, rng, 0.8);
      auto path = geodesic_closed_form(m, z, w);
      CHECK(!path.escape_time().has_value());
      auto [p, v] = path.evaluate(100.0);  // must not throw
      CHECK(p.sigma > 0.0);
    }
  }
}

TEST_CASE("vMF vertical downward geodesic escapes in finite time") {
  auto vmf = ModelSpec::von_mises_fisher_s2();
  WarpedPoint z(BasePoint::sphere(0, 0, 1), 1.0);
  WarpedTangent down{BaseTangent::zero(z.location), -1.0};
  auto path = geodesic_closed_form(vmf, z, down);
  REQUIRE(path.escape_time().has_value());

  // E = I0(1); escape time = int_0^1 sqrt(I0/E) dsigma
  double e = path.energy();
  auto integrand = [&](double s) { return std::sqrt(warp_coefficients(vmf, s).i0 / e); };
  double quad = oracles::simpson(integrand, 1e-12, 1.0, 20000);
  CHECK(*path.escape_time() == doctest::Approx(quad).epsilon(1e-9));

  // evaluation before the escape works, after it throws with the time attached
  auto [p, v] = path.evaluate(*path.escape_time() * 0.999);
  CHECK(p.sigma > 0.0);
  try {
    path.evaluate(*path.escape_time() + 0.1);
    CHECK(false);
  } catch (const BoundaryEscapeError& err) {
    CHECK(err.escape_time() == doctest::Approx(*path.escape_time()).epsilon(1e-12));
  }

  // the ODE oracle reaches sigma < 1e-6 at a consistent time: bisect
  double target = 1e-6;
  double lo = 0.0, hi = *path.escape_time() * 0.99999;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    double sig = geodesic_ode_oracle(vmf, z, down, mid).first.sigma;
    (sig > target ? lo : hi) = mid;
  }
  double t_oracle = 0.5 * (lo + hi);
  double t_quad = oracles::simpson(integrand, target, 1.0, 20000);
  CHECK(std::abs(t_oracle - t_quad) < 1e-4);
}

TEST_CASE("negative time runs the geodesic backwards") {
  auto normal = ModelSpec::normal_line();
  WarpedPoint z(BasePoint::line(0.3), 1.1);
  WarpedTangent w{BaseTangent::make(z.location, {0.4, 0, 0}), 0.2};
  auto path = geodesic_closed_form(normal, z, w);
  auto fwd = path.evaluate(0.7);
  // shooting from the reached state with reversed velocity comes back
  WarpedTangent back{BaseTangent{fwd.first.location,
                                 {-fwd.second.location_part.c[0], 0, 0}},
                     -fwd.second.sigma_part};
  auto ret = geodesic_closed_form(normal, fwd.first, back).evaluate(0.7);
  CHECK(chart_gap(ret.first, z) < 1e-8);
  auto bwd = path.evaluate(-0.7);
  auto [pb, vb] = geodesic_ode_oracle(normal, z, w, -0.7);
  CHECK(chart_gap(bwd.first, pb) < 1e-6);
}
