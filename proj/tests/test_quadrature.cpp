#include "doctest.h"
#include "nlf/quadrature.hpp"

#include <cmath>

using namespace nlf;

namespace {
Profile constant_profile(int d) {
  Profile p;
  p.dim = d;
  p.radial = true;
  p.value = [](const Vec&) { return 1.0; };
  return p;
}
}  // namespace

TEST_CASE("gauss legendre integrates polynomials exactly") {
  const auto& gl = gauss_legendre(6);
  double s = 0.0;
  for (const auto& [x, w] : gl) s += w * std::pow(x, 10);
  CHECK(s == doctest::Approx(2.0 / 11.0).epsilon(1e-13));
}

TEST_CASE("radial integral examples") {
  const QuadratureBudget budget;
  CHECK(radial_integral(constant_profile(2), 1.0, 2.0, 2, budget).value == doctest::Approx(3.0 * kPi).epsilon(1e-9));
  // |z|^{-2} |z|^2 on (0, r), d = 1.
  const auto f = power_profile(1, 1.0, 1.0);
  const auto sq = weighted_radial_integral(f, [](double r) { return r * r; }, 0.0, 0.7, 1, budget);
  CHECK(sq.value == doctest::Approx(1.4).epsilon(1e-8));
  const auto tail = radial_integral(power_profile(1, 1.0, 1.0), 1.0, kInf, 1, budget);
  CHECK(tail.value == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(tail.error_estimate < 1e-4);
}

TEST_CASE("singular radial integrals with geometric extrapolation") {
  QuadratureBudget budget;
  budget.rel_tol = 1e-8;
  // int_{B_r} |z|^2 (2-alpha)|z|^{-1-alpha} dz = 2 r^{2-alpha}.
  for (double al : {0.3, 1.0, 1.9}) {
    const auto v = weighted_radial_integral(stable_profile(1, al), [](double r) { return r * r; }, 0.0, 0.5, 1, budget);
    CHECK(v.value == doctest::Approx(2.0 * std::pow(0.5, 2.0 - al)).epsilon(1e-6));
  }
  // d = 2 tail: int_{|z|>1} |z|^{-2-s} = 2 pi / s.
  const auto t = radial_integral(power_profile(2, 1.0, 0.5), 1.0, kInf, 2, budget);
  CHECK(t.value == doctest::Approx(4.0 * kPi).epsilon(1e-5));
}

TEST_CASE("ball union integral in the plane") {
  const auto p = ball_union_profile(2, {Vec{2, 0, 0}, Vec{-2, 0, 0}}, 0.1);
  const auto v = radial_integral(p, 0.0, kInf, 2, QuadratureBudget{});
  CHECK(v.value == doctest::Approx(2.0 * kPi * 0.01).epsilon(1e-8));
}

TEST_CASE("thorn area is resolved exactly by angular breaks") {
  const ThornParams tp(0.5, Alpha(1.0));
  Profile ind = thorn_profile(tp);
  ind.value = [](const Vec& z) { return norm(z) < 1.0 && in_thorn_region(z, 0.5) ? 1.0 : 0.0; };
  // Area of Gamma cap B_1 by a direct oracle: four thorns, each symmetric about an axis.
  // Thorn along x1: |x2| <= |x1|^2 inside the unit disk (for b = 1/2).
  const auto& gl = gauss_legendre(40);
  double x_end = std::sqrt((std::sqrt(5.0) - 1.0) / 2.0);  // x^2 + x^4 = 1
  double area = 0.0;
  for (const auto& [t, w] : gl) {
    const double x = 0.5 * x_end * (t + 1.0);
    area += 0.5 * x_end * w * x * x;
  }
  auto disk_primitive = [](double x) { return 0.5 * (x * std::sqrt(1.0 - x * x) + std::asin(x)); };
  area += disk_primitive(1.0) - disk_primitive(x_end);
  area *= 2.0 * 4.0;  // two sides of the axis, four thorns
  const auto v = radial_integral(ind, 0.0, kInf, 2, QuadratureBudget{});
  CHECK(v.value == doctest::Approx(area).epsilon(1e-7));
}

TEST_CASE("integrate_about respects regions") {
  const QuadratureBudget budget;
  Integrand one = [](const Vec&, Values& out) { out[0] = 1.0; };
  const Ball b(Vec{0.3, 0.1, 0}, 0.5);
  const auto in = integrate_about(Vec{0.1, 0, 0}, 2, Region::inside(b), 1, one, Hints{}, budget);
  CHECK(in.value[0] == doctest::Approx(kPi * 0.25).epsilon(1e-7));
  CHECK(in.error[0] < 1e-5);
  const auto in1 = integrate_about(Vec{0.1, 0, 0}, 1, Region::inside(Ball(Vec{0.3, 0, 0}, 0.5)), 1, one, Hints{}, budget);
  CHECK(in1.value[0] == doctest::Approx(1.0).epsilon(1e-12));
  // Outside a ball, with a decaying integrand: d = 1, int_{|y|>1} y^{-2} = 2.
  Integrand dec = [](const Vec& y, Values& out) { out[0] = 1.0 / (y[0] * y[0]); };
  const auto out = integrate_about(Vec{0.2, 0, 0}, 1, Region::outside(Ball(Vec{}, 1.0)), 1, dec, Hints{}, budget);
  CHECK(out.value[0] == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("adaptive_gk multi-component") {
  auto f = [](double t, Values& v) {
    v[0] = std::sqrt(t);
    v[1] = std::cos(t);
  };
  const auto r = adaptive_gk(f, 2, 0.0, 1.0, 1e-10, 20);
  CHECK(r.value[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(r.value[1] == doctest::Approx(std::sin(1.0)).epsilon(1e-12));
}
