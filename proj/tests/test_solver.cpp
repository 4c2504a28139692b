#include "doctest.h"
#include "nlf/forms.hpp"
#include "nlf/solver.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <algorithm>
#include <random>

using namespace nlf;

namespace {

double bump_data(double y) {
  const double s = (y - 2.0) / 0.8;
  return std::abs(s) < 1.0 ? std::pow(1.0 - s * s, 3) : 0.0;
}

std::function<double(const Vec&)> data_1d(double (*f)(double)) {
  return [f](const Vec& y) { return f(y[0]); };
}

}  // namespace

TEST_CASE("Poisson kernel oracle integrates to one") {
  for (double al : {0.6, 1.0, 1.5}) {
    // Mass of P(x, .) on |y| > 1, split at the endpoint singularities by y = 1 + e^t.
    for (double x : {0.0, 0.5}) {
      double s = 0.0;
      const auto& gl = gauss_legendre(12);
      for (int sign : {-1, 1})
        for (int p = 0; p < 800; ++p) {
          const double a = -40.0 + p * 0.1;
          for (const auto& [t, w] : gl) {
            const double tt = a + 0.05 * (t + 1.0);
            s += 0.05 * w * std::exp(tt) * oracle::poisson_kernel_1d_offset(x, sign, std::exp(tt), al);
          }
        }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-4));
    }
  }
}

TEST_CASE("assembly: symmetry, conservation and positive definiteness") {
  const auto k = make_fractional_kernel(1, 1.2);
  const auto op = assemble(k, {}, 1.0, 1.0 / 64, 2.0);
  CHECK(op.A.rows() == 128);
  CHECK((op.A - op.A.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(op.apply_constant(1.0).cwiseAbs().maxCoeff() <= 1e-10 * op.A.diagonal().maxCoeff());
  for (Eigen::Index i = 0; i < op.A.rows(); ++i)
    for (Eigen::Index j = 0; j < op.A.cols(); ++j)
      if (i != j) CHECK(op.A(i, j) <= 0.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.A);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK_THROWS_AS(assemble(k, {}, 1.0, 1.0 / 16, 2.0), DomainError);
  CHECK_THROWS_AS(assemble(k, {}, 1.0, 1.0 / 64, 1.5), DomainError);
}

TEST_CASE("non-invariant kernels assemble symmetrically") {
  const auto op = assemble(make_masked_kernel(make_fractional_kernel(1, 1.0)), {0.3, 0, 0}, 0.5, 1.0 / 64, 1.0);
  CHECK((op.A - op.A.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.A);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12 * es.eigenvalues().maxCoeff());
}

TEST_CASE("discrete quadratic form matches the double integral") {
  const double r = 1.0;
  const auto k = make_fractional_kernel(1, 0.8);
  const auto op = assemble(k, {}, r, r / 128, 2.0);
  const auto u = polynomial_bump(1, {0.1, 0, 0}, 0.6, 2);
  Eigen::VectorXd v(op.A.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = u(op.grid.node(op.interior[static_cast<std::size_t>(i)]));
  QuadratureBudget b;
  b.rel_tol = 1e-6;
  const double exact = energy_form_whole(u, k, b).value;
  CHECK(op.quadratic_form(v) == doctest::Approx(exact).epsilon(0.03));
}

TEST_CASE("constant data gives the constant solution") {
  for (int d : {1, 2}) {
    const auto k = make_fractional_kernel(d, 1.0);
    const auto op = assemble(k, {}, 1.0, 1.0 / 32, 2.0);
    const auto s = solve_dirichlet(op, [](const Vec&) { return 2.5; });
    for (std::size_t i = 0; i < s.interior.size(); ++i) CHECK(s.value(i) == doctest::Approx(2.5).epsilon(1e-10));
    CHECK(s.maximum_principle_holds());
  }
}

TEST_CASE("d = 1 solve against the Poisson-kernel oracle") {
  for (double al : {0.8, 1.0}) {
    const auto k = make_fractional_kernel(1, al);
    const auto op = assemble(k, {}, 1.0, 1.0 / 256, 4.0);
    const auto s = solve_dirichlet(op, data_1d(bump_data));
    CHECK(s.maximum_principle_holds());
    double err = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < s.interior.size(); ++i) {
      const double x = s.node(i)[0];
      const double ex = oracle::poisson_solution_1d(x, al, bump_data, 1.2, 2.8);
      err = std::max(err, std::abs(s.value(i) - ex));
      sup = std::max(sup, std::abs(ex));
    }
    MESSAGE("alpha " << al << " relative sup error " << err / sup);
    CHECK(err <= 0.05 * sup);
  }
  // Nondecreasing odd data: the oracle and the discrete solution are both nondecreasing.
  const auto op = assemble(make_fractional_kernel(1, 1.0), {}, 1.0, 1.0 / 128, 3.0);
  auto clamp3 = [](double y) { return std::clamp(y, -3.0, 3.0); };
  const auto s = solve_dirichlet(op, [&](const Vec& y) { return clamp3(y[0]); });
  CHECK(s.maximum_principle_holds());
  auto ex = [&](double x) {
    return oracle::poisson_solution_1d(x, 1.0, clamp3, 1.0, 3.0) + oracle::poisson_solution_1d(x, 1.0, clamp3, -3.0, -1.0);
  };
  for (std::size_t i = 1; i < s.interior.size(); ++i) {
    if (i % 16 == 0) CHECK(ex(s.node(i)[0]) >= ex(s.node(i - 16)[0]));
    CHECK(s.value(i) >= s.value(i - 1) - 1e-14);
  }
}

TEST_CASE("tail measure of the fractional kernel decays geometrically") {
  const double al = 1.2;
  const auto k = make_fractional_kernel(1, al);
  const auto t = tail_measure(k, {}, 0.5, {Vec{-0.2, 0, 0}, Vec{0, 0, 0}, Vec{0.24, 0, 0}}, 8);
  CHECK(t.verdict == Verdict::Pass);
  CHECK(t.nonincreasing);
  CHECK(t.ratio == doctest::Approx(std::pow(2.0, -al)).epsilon(0.02));
  // Compactly supported envelope: empty tail beyond the support.
  Profile pc = power_profile(1, 1.0, al);
  const auto pv = pc.value;
  pc.value = [pv](const Vec& z) { return norm(z) < 1.0 ? pv(z) : 0.0; };
  pc.support_radius = 1.0;
  pc.radial_breaks = {1.0};
  pc.tail_exponent.reset();
  const auto kc = kernel_from_profile(pc, al);
  const auto tc = tail_measure(kc, {}, 0.25, {Vec{0.1, 0, 0}}, 5);
  CHECK(tc.eta[3] == 0.0);
  CHECK(tc.verdict == Verdict::Pass);
}

TEST_CASE("weak Harnack audit") {
  const auto k = make_fractional_kernel(1, 1.0);
  const auto op = assemble(k, {}, 1.0, 1.0 / 64, 3.0);
  const auto one = weak_harnack_audit(solve_dirichlet(op, [](const Vec&) { return 1.0; }));
  CHECK(one.empirical_c == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(one.tail == 0.0);
  const auto pos = weak_harnack_audit(solve_dirichlet(op, data_1d(bump_data)));
  CHECK(std::isfinite(pos.empirical_c));
  CHECK(pos.empirical_c >= 1.0);
  // Negative data far away contributes a tail term.
  const auto mixed = solve_dirichlet(op, [](const Vec& y) { return y[0] > 0 ? bump_data(y[0]) : -0.1 * bump_data(-y[0]); });
  if (mixed.maximum_principle_holds()) {
    bool nonneg = true;
    for (std::size_t i = 0; i < mixed.interior.size(); ++i) nonneg = nonneg && mixed.value(i) >= 0.0;
    if (nonneg) CHECK(weak_harnack_audit(mixed).tail > 0.0);
  }
  const auto neg = solve_dirichlet(op, [](const Vec&) { return -1.0; });
  CHECK_THROWS_AS(weak_harnack_audit(neg), DomainError);
}

TEST_CASE("oscillation schedule arithmetic") {
  OscillationSchedule s;
  s.d = 1;
  s.c1 = 2.0;
  s.p = 1.0;
  CHECK(s.c2() == doctest::Approx(8.0));
  CHECK(s.kappa() == doctest::Approx(1.0 / 16));
  CHECK(s.beta_cap() == doctest::Approx(std::log(32.0 / 31.0) / std::log(4.0)));
  s.c2_override = 3.0;
  CHECK(s.kappa() == doctest::Approx(1.0 / 6));
}

TEST_CASE("Hoelder estimate on a Poisson-kernel solution") {
  OscillationSchedule sch;
  sch.c1 = 2.0;
  std::vector<double> betas;
  for (double h : {1.0 / 256, 1.0 / 512}) {
    const auto op = assemble(make_fractional_kernel(1, 1.0), {}, 1.0, h, 4.0);
    const auto s = solve_dirichlet(op, data_1d(bump_data));
    const auto rep = holder_estimate(s, sch, {1.0, 0.25, 0.0625, 1.0 / 64});
    CHECK(rep.beta_fit > 0.0);
    CHECK(rep.monotone);
    CHECK(rep.certified);
    betas.push_back(rep.beta_fit);
  }
  CHECK(std::abs(betas[0] - betas[1]) < 0.05);
  const auto op = assemble(make_fractional_kernel(1, 1.0), {}, 1.0, 1.0 / 64, 2.0);
  const auto c = holder_estimate(solve_dirichlet(op, [](const Vec&) { return 1.0; }), sch);
  CHECK(std::isinf(c.beta_fit));
  CHECK_THROWS_AS(holder_estimate(solve_dirichlet(op, [](const Vec&) { return 1.0; }), sch, {1.0, 0.5}), DomainError);
}

TEST_CASE("solution CSV") {
  const auto op = assemble(make_fractional_kernel(1, 1.0), {}, 1.0, 1.0 / 32, 2.0);
  const auto csv = solution_csv(solve_dirichlet(op, [](const Vec&) { return 0.0; }));
  CHECK(csv.rfind("x1,u\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 65);
}
