#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "warpgeo/curvature.hpp"
#include "warpgeo/errors.hpp"

using namespace warpgeo;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return g;
}
}  // namespace

TEST_CASE("extrinsic distance") {
  auto normal = ModelSpec::normal_line();
  // Mahalanobis form |x - y|^2 / (2 sigma^2)
  for (double s : {0.5, 1.0, 3.0}) {
    double d = extrinsic_distance(normal, BasePoint::line(1.0), BasePoint::line(4.0), s);
    CHECK(d * d == doctest::Approx(9.0 / (2.0 * s * s)).epsilon(1e-13));
  }

  auto vmf = ModelSpec::von_mises_fisher_s2();
  CHECK(extrinsic_distance(vmf, BasePoint::sphere(0, 0, 1), BasePoint::sphere(0, 0, 1), 1.0) ==
        doctest::Approx(0.0));
  // antipodal pair at sigma = 1: sqrt(I1) * pi
  double anti = extrinsic_distance(vmf, BasePoint::sphere(0, 0, 1), BasePoint::sphere(0, 0, -1), 1.0);
  CHECK(anti == doctest::Approx(1.75771).epsilon(1e-5));
}

TEST_CASE("extrinsic distance monotonicity in sigma") {
  auto vmf = ModelSpec::von_mises_fisher_s2();
  auto normal = ModelSpec::normal_line();
  auto x1 = BasePoint::sphere(0, 0, 1), y1 = BasePoint::sphere(1, 0, 0);
  auto x2 = BasePoint::line(0.0), y2 = BasePoint::line(1.0);
  double prev_v = 0.0, prev_n = 1e300;
  for (double s : {0.2, 0.5, 1.0, 2.0, 5.0}) {
    double dv = extrinsic_distance(vmf, x1, y1, s);
    double dn = extrinsic_distance(normal, x2, y2, s);
    CHECK(dv > prev_v);  // concentration parameter: the sphere expands
    CHECK(dn < prev_n);  // scale parameter: the line contracts
    prev_v = dv;
    prev_n = dn;
  }
}

TEST_CASE("tangential curvature requires a two-dimensional base") {
  CHECK_THROWS_AS(sectional_tangential(ModelSpec::normal_line(), 1.0), UnsupportedOperation);
}

TEST_CASE("constant-I1 double reduces the Gauss equation to K_M / I1") {
  WarpCoefficients cf{};
  cf.i0 = 0.7;
  cf.i1 = 4.0;
  cf.di0_dsigma = 0.1;
  cf.di1_dsigma = 0.0;
  cf.d2i1_dsigma2 = 0.0;
  CHECK(tangential_from_coefficients(1.0, cf) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(tangential_from_coefficients(-0.5, cf) == doctest::Approx(-0.125).epsilon(1e-15));
}

TEST_CASE("normal model has constant mixed curvature -1") {
  auto normal = ModelSpec::normal_line();
  for (double s : log_grid(1e-2, 1e2, 50))
    CHECK(std::abs(sectional_mixed(normal, s) + 1.0) < 1e-9);
}

TEST_CASE("vMF curvatures are strictly negative") {
  auto vmf = ModelSpec::von_mises_fisher_s2();
  for (double s : {0.1, 1.0, 10.0}) CHECK(sectional_mixed(vmf, s) < 0.0);
  for (double s : log_grid(1e-3, 1e2, 200)) {
    CHECK(sectional_tangential(vmf, s) < 0.0);
    CHECK(sectional_mixed(vmf, s) < 0.0);
  }
}

TEST_CASE("mixed curvature matches finite differences in the r coordinate") {
  for (const auto& m : {ModelSpec::normal_line(), ModelSpec::von_mises_fisher_s2(),
                        ModelSpec::riemannian_gaussian_h2()}) {
    for (double s : {0.3, 1.0, 2.5}) {
      double analytic = sectional_mixed(m, s);
      double fd = oracles::fd_mixed_curvature(m, s);
      CHECK(analytic == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("tangential curvature matches the finite-difference oracle") {
  for (const auto& m : {ModelSpec::von_mises_fisher_s2(), ModelSpec::riemannian_gaussian_h2()}) {
    for (double s : {0.5, 1.0, 2.0}) {
      double analytic = sectional_tangential(m, s);
      double fd = oracles::fd_tangential_curvature(m, s);
      CHECK(analytic == doctest::Approx(fd).epsilon(1e-4));
    }
  }
}

TEST_CASE("curvature scans flag no nonnegative values for the three models") {
  auto grid = log_grid(1e-2, 1e2, 60);
  for (const auto& m : {ModelSpec::normal_line(), ModelSpec::von_mises_fisher_s2(),
                        ModelSpec::riemannian_gaussian_h2()}) {
    auto reports = curvature_scan(m, grid);
    REQUIRE(reports.size() == grid.size());
    for (const auto& rep : reports) {
      CHECK(!rep.nonnegative_found);
      CHECK(rep.mixed < 0.0);
      if (m.dim >= 2) {
        REQUIRE(rep.tangential.has_value());
        CHECK(*rep.tangential < 0.0);
      } else {
        CHECK(!rep.tangential.has_value());
      }
    }
  }
}

TEST_CASE("convexity equivalence: sign of mixed curvature vs d^2/dr^2 sqrt(I1)") {
  for (const auto& m : {ModelSpec::normal_line(), ModelSpec::von_mises_fisher_s2(),
                        ModelSpec::riemannian_gaussian_h2()}) {
    for (double s : log_grid(0.05, 20.0, 25)) {
      double mixed = sectional_mixed(m, s);
      double h = std::max(1e-4, 1e-3 * s);
      auto f = [&](double r) {
        double x = oracles::sigma_at_vertical_offset(m, s, r);
        return std::sqrt(warp_coefficients(m, x).i1);
      };
      double convexity = oracles::diff2(f, 0.0, h);
      CHECK(mixed * convexity <= 0.0);
      if (std::abs(convexity) > 1e-8) CHECK(mixed * convexity < 0.0);
    }
  }
}

TEST_CASE("Gauss equation algebraic identity") {
  for (const auto& m : {ModelSpec::von_mises_fisher_s2(), ModelSpec::riemannian_gaussian_h2()}) {
    for (double s : log_grid(1e-2, 1e2, 40)) {
      auto c = warp_coefficients(m, s);
      double kt = tangential_from_coefficients(m.base_curvature, c);
      double shape = c.di1_dsigma / (c.i1 * std::sqrt(c.i0));
      double lhs = kt + 0.25 * shape * shape;
      CHECK(lhs == doctest::Approx(m.base_curvature / c.i1).epsilon(1e-10));
    }
  }
}

TEST_CASE("shape coefficient definition") {
  auto m = ModelSpec::normal_line();
  for (double s : {0.3, 1.0, 4.0}) {
    auto c = warp_coefficients(m, s);
    // d/dr = I0^{-1/2} d/dsigma, so the normal model has shape -1 at every sigma
    CHECK(shape_coefficient_from(c) == doctest::Approx(-1.0).epsilon(1e-13));
  }
}
