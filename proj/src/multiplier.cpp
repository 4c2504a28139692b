#include "nlf/multiplier.hpp"

#include <cmath>

#include "nlf/quadrature.hpp"

namespace nlf {

namespace {

// Mean of 4 sin^2(xi.z/2) over the sphere |z| = rho, t = |xi| rho.
double spherical_mean_weight(int d, double t) {
  if (d == 1) {
    const double s = std::sin(0.5 * t);
    return 4.0 * s * s;
  }
  const double t2 = t * t;
  if (d == 2) {
    if (t < 0.1) return 2.0 * (t2 / 4.0 - t2 * t2 / 64.0 + t2 * t2 * t2 / 2304.0);
    return 2.0 * (1.0 - std::cyl_bessel_j(0.0, t));
  }
  if (t < 0.1) return 2.0 * (t2 / 6.0 - t2 * t2 / 120.0 + t2 * t2 * t2 / 5040.0);
  return 2.0 * (1.0 - std::sin(t) / t);
}

}  // namespace

FormValue multiplier(const Profile& L, const Vec& xi, const QuadratureBudget& budget, double cutoff_phase) {
  budget.validate();
  const int d = L.dim;
  const double s = norm(xi);
  if (s == 0.0 || L.is_zero()) return {};
  const double T = cutoff_phase / s;
  const double cap = std::min(T, L.support_radius);
  FormValue out;
  if (cap > L.inner_radius) {
    if (L.radial) {
      out = weighted_radial_integral(
          L, [d, s](double r) { return spherical_mean_weight(d, s * r); }, L.inner_radius, cap, d, budget, {}, s);
    } else {
      if (d > 2) throw DomainError("non-radial multipliers are supported for d <= 2");
      Hints hints;
      hints.floor = L.inner_radius;
      hints.cap = cap;
      hints.radial = L.radial_breaks;
      hints.angular = L.angular_breaks;
      hints.frequency = s;
      const auto& f = L.value;
      Integrand g = [&](const Vec& z, Values& v) {
        const double h = std::sin(0.5 * dot(xi, z));
        v[0] = 4.0 * h * h * f(z);
      };
      out = integrate_about(Vec{}, d, Region::whole(), 1, g, hints, budget).component(0);
    }
  }
  if (L.support_radius > T) {
    FormValue tail = radial_integral(L, T, kInf, d, budget);
    tail.value *= 2.0;
    tail.error_estimate = 2.0 * tail.error_estimate + tail.value / (s * T);
    out += tail;
  }
  return out;
}

std::optional<double> multiplier_closed_form(const Profile& L, const Vec& xi) {
  if (!L.cosine_transform || !L.l1_norm) return std::nullopt;
  return 2.0 * (*L.l1_norm - L.cosine_transform(xi));
}

}  // namespace nlf
