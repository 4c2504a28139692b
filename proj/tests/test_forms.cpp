#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "nlf/forms.hpp"
#include "nlf/quadrature.hpp"

using namespace nlf;

namespace {

// Midpoint rule on the square [a,b]^2 with the diagonal band excluded. The
// removed band contributes ~ hw^{2-alpha} for C^1 functions, so the oracle
// combines two resolutions by Richardson in that exponent.
double tensor_oracle_1d(const std::function<double(double)>& u, double a, double b, double alpha, int n) {
  auto run = [&](int m) {
    const double h = (b - a) / m;
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double x = a + (i + 0.5) * h;
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        const double y = a + (j + 0.5) * h;
        const double du = u(y) - u(x);
        s += du * du * std::pow(std::abs(x - y), -1.0 - alpha);
      }
    }
    return alpha * (2.0 - alpha) * s * h * h;
  };
  const double f1 = run(n), f2 = run(2 * n);
  const double g = std::pow(2.0, 2.0 - alpha);
  return (g * f2 - f1) / (g - 1.0);
}

}  // namespace

TEST_CASE("test functions: support, Lipschitz bounds and cutoff values") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  auto fam = bump_family(2, Ball({}, 0.5), 20, 3);
  fam.push_back(build_cutoff(0.5, 0.25, 2));
  fam.push_back(gaussian(2, {0.1, 0, 0}, 0.3));
  for (const auto& u : fam) {
    for (int t = 0; t < 2000; ++t) {
      const Vec x{U(rng), U(rng), 0}, y{U(rng) * 0.2, U(rng) * 0.2, 0};
      const Vec z = x + y;
      CHECK(std::abs(u(x) - u(z)) <= u.lipschitz_bound * norm(y) * (1 + 1e-12) + 1e-15);
      if (u.support && !u.support->contains(x) && norm(x - u.support->center) > u.support->radius)
        CHECK(u(x) == 0.0);
    }
  }
  const auto tau = build_cutoff(0.5, 0.25);
  CHECK(tau({0.5, 0, 0}) == 1.0);
  CHECK(tau({-0.2, 0, 0}) == 1.0);
  CHECK(tau({0.75, 0, 0}) == 0.0);
  CHECK(tau({-2.0, 0, 0}) == 0.0);
  CHECK(tau({0.625, 0, 0}) == doctest::Approx(0.5));
}

TEST_CASE("L2 norms and transforms of the closed-form families") {
  for (int d = 1; d <= 2; ++d)
    for (int m = 1; m <= 3; ++m) {
      const Vec c{0.1, d == 2 ? -0.2 : 0.0, 0};
      const auto u = polynomial_bump(d, c, 0.7, m);
      QuadratureBudget b;
      b.rel_tol = 1e-9;
      const auto num = l2_norm_sq(u, Ball(c, 0.7), b);
      CHECK(num.value == doctest::Approx(*u.l2_norm_sq).epsilon(1e-7));
      // |u^(0)|^2 = (int u)^2 / (2 pi)^d.
      auto f = [&u](const Vec& y, Values& v) { v[0] = u(y); };
      const double mass = integrate_about(c, d, Region::inside(Ball(c, 0.7)), 1, f, {}, b).value[0];
      CHECK(u.fourier_abs2(0.0) == doctest::Approx(mass * mass / std::pow(2 * kPi, d)).epsilon(1e-6));
    }
  // d = 1 transform against direct cosine quadrature.
  const auto u = polynomial_bump(1, {}, 0.5, 2);
  for (double xi : {0.7, 3.0, 11.0}) {
    const int n = 20000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = -0.5 + (i + 0.5) / n;
      s += u({x, 0, 0}) * std::cos(xi * x) / n;
    }
    CHECK(u.fourier_abs2(xi) == doctest::Approx(s * s / (2 * kPi)).epsilon(1e-6));
  }
  const auto g = dilate(gaussian(1, {}, 1.0), 0.5);
  CHECK(*g.l2_norm_sq == doctest::Approx(std::sqrt(kPi * 0.25)));
  CHECK(g.fourier_abs2(2.0) == doctest::Approx(gaussian(1, {}, 0.5).fourier_abs2(2.0)));
}

TEST_CASE("reference form of a linear function has the exact value 2 alpha / (3 - alpha)") {
  const auto u = custom_function(1, [](const Vec& x) { return x[0]; }, std::nullopt, 1.0, "linear");
  for (double alpha : {0.5, 1.0, 1.5}) {
    const auto e = reference_form(u, alpha, Ball({}, 0.5));
    CHECK(e.value == doctest::Approx(2 * alpha / (3 - alpha)).epsilon(1e-5));
    CHECK(e.error_estimate >= 0.0);
    CHECK_FALSE(e.exhausted);
  }
}

TEST_CASE("reference form against an independent tensor-grid oracle") {
  auto f = [](double x) {
    const double q = 1 - 4 * x * x;
    return q > 0 ? q * q : 0.0;
  };
  const auto u = polynomial_bump(1, {}, 0.5, 2);
  const auto e = reference_form(u, 1.0, Ball({}, 0.5));
  const double oracle = tensor_oracle_1d(f, -0.5, 0.5, 1.0, 800);
  CHECK(e.value == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("fractional kernel ratio and constants") {
  const auto u = polynomial_bump(1, {0.05, 0, 0}, 0.4, 2);
  const auto k = make_fractional_kernel(1, 1.0);
  const auto ek = energy_form(u, k, Ball({}, 0.5));
  const auto ea = reference_form(u, 1.0, Ball({}, 0.5));
  CHECK(ek.value / ea.value == doctest::Approx(1.0 / kPi).epsilon(1e-4));
  CHECK(energy_form(add_constant(u, 3.0), k, Ball({}, 0.5)).value == doctest::Approx(ek.value).epsilon(1e-5));
  CHECK(energy_form(scale_function(u, 2.5), k, Ball({}, 0.5)).value ==
        doctest::Approx(6.25 * ek.value).epsilon(1e-5));
  const auto c = custom_function(1, [](const Vec&) { return 2.0; }, std::nullopt, 0.0, "const");
  CHECK(energy_form(c, k, Ball({}, 0.5)).value == 0.0);
}

TEST_CASE("reference form scales as r^{d-alpha}") {
  const double alpha = 1.3;
  for (int d = 1; d <= 2; ++d) {
    QuadratureBudget b;
    b.rel_tol = d == 1 ? 1e-6 : 1e-3;
    b.angular_order = 6;
    const auto u = polynomial_bump(d, {0.2, d == 2 ? 0.1 : 0.0, 0}, 0.6, 2);
    const double r = 0.3;
    const auto e1 = reference_form(u, alpha, Ball({}, 1.0), b);
    const auto er = reference_form(dilate(u, r), alpha, Ball({}, r), b);
    CHECK(er.value == doctest::Approx(std::pow(r, d - alpha) * e1.value).epsilon(d == 1 ? 1e-5 : 2e-3));
  }
}

TEST_CASE("whole-space form and the Sobolev norm") {
  const double alpha = 1.0;
  const auto g = gaussian(1, {}, 0.4);
  // Frequency side: (2 alpha (2 - alpha) / A) int |xi|^alpha |u^|^2.
  const double A = frac_constant(1, alpha);
  // int |xi| s^2 e^{-s^2 xi^2} dxi = 1 for every s.
  const double expected = 2 * alpha * (2 - alpha) / A;
  const auto e = reference_form_whole(g, alpha);
  CHECK(e.value == doctest::Approx(expected).epsilon(1e-4));
  const auto nrm = sobolev_norm(g, alpha);
  const auto n3 = sobolev_norm(scale_function(g, 3.0), alpha);
  CHECK(n3.value == doctest::Approx(3 * nrm.value).epsilon(1e-6));
  const auto zero = custom_function(1, [](const Vec&) { return 0.0; }, Ball({}, 0.1), 0.0, "zero");
  QuadratureBudget b;
  CHECK(sobolev_norm(zero, alpha).value == 0.0);
  (void)b;
}

TEST_CASE("comparability scans") {
  SUBCASE("fractional kernel gives the exact ratio") {
    const auto fam = bump_family(1, Ball({}, 0.5), 10, 11);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = comparability_scan(make_fractional_kernel(1, 1.0), 1.0, Ball({}, 0.5), fam);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    MESSAGE("10-function d=1 scan: " << secs << " s");
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.min_ratio == doctest::Approx(1 / kPi).epsilon(2e-6));
    CHECK(rep.max_ratio == doctest::Approx(1 / kPi).epsilon(2e-6));
    CHECK(ratio_table_csv(rep).rfind("function_id,alpha,E_k,E_alpha,ratio,err", 0) == 0);
  }
  SUBCASE("zero kernel fails") {
    const auto fam = bump_family(1, Ball({}, 0.5), 3, 2);
    const auto rep = comparability_scan(zero_kernel(1), 1.0, Ball({}, 0.5), fam);
    CHECK(rep.verdict == Verdict::Fail);
    CHECK(rep.max_ratio == 0.0);
  }
  SUBCASE("masked kernel stays in a positive bracket") {
    const auto k = make_masked_kernel(make_fractional_kernel(1, 1.0));
    const auto fam = bump_family(1, Ball({}, 0.25), 8, 5);
    const auto rep = comparability_scan(k, 1.0, Ball({}, 0.25), fam);
    MESSAGE("masked bracket [" << rep.min_ratio << ", " << rep.max_ratio << "]");
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.min_ratio > 0.0);
    CHECK(rep.max_ratio <= 1 / kPi * (1 + 1e-6));
  }
  SUBCASE("large balls are rejected") {
    CHECK_THROWS_AS(comparability_scan(make_fractional_kernel(1, 1.0), 1.0, Ball({}, 1.0), {}), DomainError);
  }
}

TEST_CASE("cutoff condition") {
  const auto k = make_fractional_kernel(1, 1.0);
  const double c4 = u1prime_constant(4, 2, 1);
  CHECK(c4 == doctest::Approx(26.0));
  double base = 0.0;
  for (int j = 2; j <= 6; ++j) {
    const double rho = std::ldexp(1.0, -j);
    const auto rep = check_B(k, 1.0, 0.5, rho, {}, {}, c4);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(rep.empirical_constant <= 2 * c4);
    if (j == 2) base = rep.empirical_constant;
  }
  const auto shifted = check_B(k, 1.0, 0.5, 0.25, default_cutoff_grid(1, 0.5, 0.25, 24, {0.3, 0, 0}), {}, c4,
                               {0.3, 0, 0});
  CHECK(shifted.empirical_constant == doctest::Approx(base).epsilon(1e-6));
  const auto z = check_B(zero_kernel(1), 1.0, 0.5, 0.25, {});
  CHECK(z.empirical_constant == 0.0);
}

TEST_CASE("whitney covers") {
  for (int d = 1; d <= 2; ++d)
    for (double eta : {0.25, 0.5}) {
      const auto w = whitney_cover(d, Ball({}, 1.0), eta);
      const auto a = audit_whitney(w, 10000, 10000, 9);
      CHECK(a.max_containment_excess <= 1e-12);
      CHECK(a.max_overlap <= w.overlap_bound);
      CHECK(a.pair_failures == 0);
      CHECK(a.pairs_tested == 10000);
      CHECK(w.pair_constant > 0.0);
      if (d == 2 && eta == 0.5) CHECK(a.max_overlap <= 32);
      MESSAGE("d=" << d << " eta=" << eta << " balls=" << w.balls.size() << " M=" << w.overlap_bound
                   << " probe max=" << a.max_overlap << " c=" << w.pair_constant);
    }
}

TEST_CASE("box measures: exact self-convolution") {
  const auto q = step_measure({0.0, 1.0}, {1.0});  // 1_{(-1,1)}
  CHECK(q.l1_norm() == doctest::Approx(2.0));
  for (double z : {0.0, 0.5, 1.5, 2.5}) CHECK(q.self_convolution({z, 0, 0}) == doctest::Approx(std::max(0.0, 2 - z)));
  // Cross-check against midpoint convolution in d = 2.
  const ThornParams tp(0.5, Alpha(1.0));
  const auto qn = thorn_q(tp, 0);
  const Vec z{0.35, 0.3, 0};
  const int n = 1200;
  const double L = 0.5, h = 2 * L / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec y{-L + (i + 0.5) * h, -L + (j + 0.5) * h, 0};
      s += qn(y) * qn(z - y) * h * h;
    }
  CHECK(qn.self_convolution(z) == doctest::Approx(s).epsilon(0.02));
}

TEST_CASE("convolution lemma on a unit interval measure") {
  const auto q = step_measure({0.0, 1.0}, {1.0});
  const auto u = polynomial_bump(1, {0.1, 0, 0}, 0.8, 2);
  const auto c = convolution_bound_check(q, u, 1.0);
  MESSAGE("lhs " << c.lhs.value << " rhs " << c.rhs << " slack " << c.slack);
  CHECK(c.verdict == Verdict::Pass);
  CHECK(c.q_l1 == doctest::Approx(2.0));
  CHECK(c.slack >= 0.0);
  const auto k = custom_function(1, [](const Vec&) { return 1.0; }, std::nullopt, 0.0, "one");
  const auto c0 = convolution_bound_check(q, k, 1.0);
  CHECK(c0.lhs.value == 0.0);
  CHECK(c0.rhs == 0.0);
}

TEST_CASE("poincare quotient") {
  const auto u = custom_function(1, [](const Vec& x) { return x[0]; }, std::nullopt, 1.0, "linear");
  QuadratureBudget b1, b2;
  b2.rel_tol = 1e-9;
  const double q1 = poincare_quotient(u, Ball({}, 1.0), 1.0, b1);
  const double q2 = poincare_quotient(u, Ball({}, 1.0), 1.0, b2);
  // Var = 2/3, E^1_{B_1}(x) = 2 * 2^{2} / 2 * ... closed form 2 alpha/(3-alpha) * 2^{3-alpha}.
  CHECK(q1 == doctest::Approx((2.0 / 3.0) / (1.0 * 4.0)).epsilon(1e-5));
  CHECK(q1 == doctest::Approx(q2).epsilon(0.05));
  CHECK(poincare_quotient(add_constant(u, 5.0), Ball({}, 1.0), 1.0) == doctest::Approx(q1).epsilon(1e-6));
  const auto c = custom_function(1, [](const Vec&) { return 1.0; }, std::nullopt, 0.0, "const");
  CHECK_THROWS_AS(poincare_quotient(c, Ball({}, 1.0), 1.0), NumericalError);
}

TEST_CASE("thorn sets and measures") {
  for (double al : {1.0, 1.5})
    for (int n = 0; n <= 3; ++n) {
      const ThornParams tp(0.5, Alpha(al));
      const auto q = thorn_q(tp, n);
      CHECK(q.l1_norm() == doctest::Approx(std::pow(2.0, n * al - 1 - 4)));
      CHECK(q.l1_norm() <= std::pow(2.0, n * al - 2));
    }
  const ThornParams tp(0.5, Alpha(1.0));
  const auto q0 = thorn_q(tp, 0);
  for (double a : {1.25, 1.5, 1.75})
    for (double c : {1.25, 1.5, 1.75}) CHECK(q0.self_convolution({a / 4, c / 4, 0}) >= std::ldexp(1.0, -10));
}

TEST_CASE("convolution lemma on random step measures") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 20; ++t) {
    const int ns = 1 + t % 4;
    const double rho = 0.05 + 0.5 * U(rng);
    std::vector<double> e{0.0}, h;
    for (int i = 0; i < ns; ++i) {
      e.push_back(rho * (i + 1) / ns);
      h.push_back(0.1 + 3 * U(rng));
    }
    const double R = 0.2 + 0.8 * U(rng);
    const double r = R * (0.3 + 0.7 * U(rng));
    const auto u = polynomial_bump(1, {(R + rho - r) * (2 * U(rng) - 1), 0, 0}, r, 1 + t % 3);
    const auto c = convolution_bound_check(step_measure(e, h), u, R);
    CHECK(c.verdict == Verdict::Pass);
    CHECK(c.slack >= 0.0);
  }
}

TEST_CASE("convolution lemma for the thorn measure q_0") {
  QuadratureBudget b;
  b.rel_tol = 1e-2;
  b.angular_order = 6;
  const ThornParams tp(0.5, Alpha(1.5));
  const auto q = thorn_q(tp, 0);
  CHECK(q.l1_norm() <= std::pow(2.0, -2.0));
  const auto c = convolution_bound_check(q, polynomial_bump(2, {0.05, 0.02, 0}, 0.3, 2), 0.3, b);
  CHECK(c.verdict == Verdict::Pass);
  CHECK(c.slack > 0.0);
}

TEST_CASE("cutoff condition for the thorn kernel is uniform in rho") {
  QuadratureBudget b;
  b.rel_tol = 1e-3;
  b.angular_order = 6;
  const double al = 1.5;
  const auto k = make_thorn_kernel(ThornParams(0.5, Alpha(al)));
  double lo = kInf, hi = 0.0;
  for (int j = 2; j <= 6; ++j) {
    const auto rep = check_B(k, al, 0.5, std::ldexp(1.0, -j), {}, b);
    CHECK(rep.verdict == Verdict::Pass);
    lo = std::min(lo, rep.empirical_constant);
    hi = std::max(hi, rep.empirical_constant);
  }
  CHECK(hi <= 2.0 * lo);
  CHECK(lo > 0.0);
}

TEST_CASE("poincare quotient is bounded over a bump family") {
  const auto fam = bump_family(1, Ball({}, 1.0 - 1e-9), 20, 17);
  for (double al : {1.1, 1.5, 1.9}) {
    double worst = 0.0;
    for (const auto& u : fam) worst = std::max(worst, poincare_quotient(u, Ball({}, 1.0), al));
    MESSAGE("alpha=" << al << " max quotient " << worst);
    CHECK(std::isfinite(worst));
    CHECK(worst < 10.0);
  }
}

TEST_CASE("thorn certificate on a small family") {
  QuadratureBudget b;
  b.rel_tol = 1e-2;
  b.angular_order = 6;
  const auto c = thorn_certificate(ThornParams(0.5, Alpha(1.2)), 0.5, b, 3, 2, 3);
  CHECK(c.verdict == Verdict::Pass);
  REQUIRE(c.levels.size() == 4);
  CHECK(c.levels[0].conv_min_on_P >= std::ldexp(1.0, -10));
  for (const auto& l : c.levels) {
    CHECK(l.E_in_Gamma);
    CHECK(l.conv_min_on_P >= l.conv_bound);
    CHECK(l.q_l1_computed == doctest::Approx(l.q_l1_expected));
  }
  CHECK(c.scan.min_ratio > 0.0);
  const auto j = to_json(c);
  CHECK(j["levels"].size() == 4);
}
